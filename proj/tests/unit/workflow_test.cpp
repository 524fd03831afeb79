#include <gtest/gtest.h>

#include <fstream>

#include "oracles.hpp"
#include "temp_dir.hpp"
#include "wssubst/error.hpp"
#include "wssubst/workflow.hpp"

using namespace wssubst;
using testing_support::TempDir;

namespace {

std::shared_ptr<const Lexicon> core() {
  static auto lex = std::make_shared<const Lexicon>(load_lexicon(WSSUBST_DEFAULT_LEXICON));
  return lex;
}

std::string abs_data(const std::string& rel) {
  return std::filesystem::absolute(oracle::data(rel)).lexically_normal().string();
}

void write(const std::string& path, const std::string& text) {
  std::ofstream(path) << text;
}

nlohmann::json weather_plan() {
  std::ifstream in(oracle::data("plans/weather-plan.json"));
  return nlohmann::json::parse(in);
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::invalid_argument;
}

struct Fixture : ::testing::Test {
  TempDir tmp;
  std::string registry;

  void SetUp() override {
    registry = tmp / "registry.json";
    write(registry, nlohmann::json{{"entries",
                                    {{{"name", "meteo"}, {"wsdlUri", abs_data("wsdl/meteo.wsdl")}},
                                     {{"name", "books"}, {"wsdlUri", abs_data("wsdl/pool/bookstore.wsdl")}}}}}
                        .dump());
  }

  WorkflowService service() {
    Config c;
    c.data_dir = tmp / "sessions";
    c.threads = 2;
    return WorkflowService(c, core());
  }

  std::size_t index_of(const MatchingSession& s, const std::string& name) {
    for (std::size_t i = 0; i < s.ranking.size(); ++i)
      if (s.ranking[i].name == name) return i;
    ADD_FAILURE() << name << " not ranked";
    return 0;
  }
};

}  // namespace

TEST(Registry, DirectoryListsWsdlFilesSorted) {
  auto m = load_registry(oracle::data("wsdl/pool"));
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[0].name, "bookstore");
  EXPECT_EQ(m.entries[1].name, "weather-copy");
  EXPECT_EQ(m.entries[2].name, "weather-renamed");
  for (const auto& e : m.entries) EXPECT_TRUE(std::filesystem::path(e.wsdl_uri).is_absolute());
}

TEST(Registry, ManifestResolvesRelativeUrisAndRejectsDuplicates) {
  TempDir tmp;
  std::filesystem::create_directories(tmp.path() / "sub");
  write(tmp / "sub/a.json", R"({"entries":[{"name":"x","wsdlUri":"../svc.wsdl","metadata":{"owner":"ops"}}]})");
  auto m = load_registry(tmp / "sub/a.json");
  ASSERT_EQ(m.entries.size(), 1u);
  EXPECT_EQ(std::filesystem::path(m.entries[0].wsdl_uri).lexically_normal(),
            (tmp.path() / "svc.wsdl").lexically_normal());
  EXPECT_EQ(m.entries[0].metadata["owner"], "ops");
  EXPECT_EQ(parse_registry_manifest(to_json(m).dump(), tmp / "sub/a.json"), m);

  EXPECT_EQ(code_of([] { parse_registry_manifest(R"([{"wsdlUri":"/a.wsdl"},{"wsdlUri":"/a.wsdl"}])", "/r.json"); }),
            ErrorCode::conflict);
  EXPECT_EQ(code_of([] { parse_registry_manifest("{", "/r.json"); }), ErrorCode::parse);
  EXPECT_EQ(code_of([] { load_registry("/nonexistent/registry.json"); }), ErrorCode::io);
}

TEST(Registry, EmptyDirectoryAndSingleFile) {
  TempDir tmp;
  EXPECT_TRUE(load_registry(tmp.str()).entries.empty());
  auto single = load_registry(oracle::data("wsdl/meteo.wsdl"));
  ASSERT_EQ(single.entries.size(), 1u);
  EXPECT_EQ(single.entries[0].name, "meteo");
}

TEST(Config, LoadsAndResolvesRelativePaths) {
  TempDir tmp;
  write(tmp / "cfg.json", R"({"p1":2,"p2":1,"p3":1,"threshold":0.6,"dataDir":"state","hausdorff":"literal","threads":3})");
  Config base;
  base.lexicon = "/elsewhere/lex";
  auto c = load_config(tmp / "cfg.json", base);
  EXPECT_EQ(c.weights.input, 2.0);
  EXPECT_EQ(c.threshold, 0.6);
  EXPECT_EQ(c.mode, HausdorffMode::literal);
  EXPECT_EQ(c.threads, 3u);
  EXPECT_EQ(c.lexicon, "/elsewhere/lex");
  EXPECT_EQ(std::filesystem::path(c.data_dir), tmp.path() / "state");

  write(tmp / "bad.json", R"({"threshold":1.5})");
  EXPECT_THROW(load_config(tmp / "bad.json").validate(), Error);
  write(tmp / "mode.json", R"({"hausdorff":"sideways"})");
  EXPECT_EQ(code_of([&] { load_config(tmp / "mode.json"); }), ErrorCode::parse);
  EXPECT_EQ(code_of([&] { load_config(tmp / "missing.json"); }), ErrorCode::io);
}

TEST(SessionStateNames, RoundTrip) {
  for (auto s : {SessionState::created, SessionState::ranked, SessionState::candidate_selected,
                 SessionState::matching_drafted, SessionState::confirmed}) {
    EXPECT_EQ(parse_session_state(to_string(s)), s);
  }
  EXPECT_EQ(to_string(SessionState::candidate_selected), "candidateSelected");
  EXPECT_THROW(parse_session_state("done"), Error);
}

TEST_F(Fixture, HappyPathReachesConfirmedAndPersistsEveryState) {
  auto svc = service();
  SessionStore store(svc.config().data_dir);
  auto check_persisted = [&](const MatchingSession& s) {
    auto loaded = store.load(s.id);
    ASSERT_TRUE(loaded.has_value());
    EXPECT_EQ(to_json(*loaded), to_json(s)) << to_string(s.state);
    EXPECT_EQ(to_json(session_from_json(to_json(s))), to_json(s));
  };

  auto s = svc.create_session(abs_data("wsdl/weather.wsdl"), registry);
  EXPECT_EQ(s.state, SessionState::created);
  EXPECT_EQ(s.id.size(), 16u);
  check_persisted(s);

  s = svc.run_ranking(s.id);
  EXPECT_EQ(s.state, SessionState::ranked);
  ASSERT_EQ(s.ranking.size(), 2u);
  EXPECT_EQ(s.ranking[0].name, "meteo");
  EXPECT_GE(s.ranking[0].score, s.ranking[1].score);
  check_persisted(s);

  s = svc.select_candidate(s.id, index_of(s, "meteo"));
  EXPECT_EQ(s.state, SessionState::candidate_selected);
  ASSERT_TRUE(s.table.has_value());
  EXPECT_EQ(s.table->rows.size(), 2u);
  check_persisted(s);

  s = svc.draft_plan(s.id, weather_plan());
  EXPECT_EQ(s.state, SessionState::matching_drafted);
  EXPECT_TRUE(s.report.empty());
  check_persisted(s);

  s = svc.confirm(s.id);
  EXPECT_EQ(s.state, SessionState::confirmed);
  ASSERT_TRUE(s.artifacts.has_value());
  EXPECT_TRUE(dangling_model_references(*s.artifacts).empty());
  check_persisted(s);

  EXPECT_EQ(code_of([&] { svc.run_ranking(s.id); }), ErrorCode::wrong_state);
  EXPECT_EQ(code_of([&] { svc.draft_plan(s.id, weather_plan()); }), ErrorCode::wrong_state);

  // A fresh service over the same directory sees the session.
  auto again = service();
  EXPECT_EQ(again.get(s.id).state, SessionState::confirmed);
  auto ids = again.list();
  EXPECT_NE(std::find(ids.begin(), ids.end(), s.id), ids.end());
}

TEST_F(Fixture, OutOfOrderCallsAreRejected) {
  auto svc = service();
  auto s = svc.create_session(abs_data("wsdl/weather.wsdl"), registry);
  EXPECT_EQ(code_of([&] { svc.select_candidate(s.id, 0); }), ErrorCode::wrong_state);
  EXPECT_EQ(code_of([&] { svc.confirm(s.id); }), ErrorCode::wrong_state);
  s = svc.run_ranking(s.id);
  EXPECT_EQ(code_of([&] { svc.confirm(s.id); }), ErrorCode::wrong_state);
  EXPECT_EQ(code_of([&] { svc.select_candidate(s.id, 7); }), ErrorCode::invalid_argument);
  s = svc.select_candidate(s.id, index_of(s, "meteo"));
  EXPECT_EQ(code_of([&] { svc.confirm(s.id); }), ErrorCode::wrong_state);
  EXPECT_EQ(code_of([&] { svc.get("0123456789abcdef"); }), ErrorCode::not_found);
  EXPECT_EQ(code_of([&] { svc.get("../escape"); }), ErrorCode::not_found);
}

TEST_F(Fixture, InvalidDraftBlocksConfirm) {
  auto svc = service();
  auto s = svc.run_ranking(svc.create_session(abs_data("wsdl/weather.wsdl"), registry).id);
  s = svc.select_candidate(s.id, index_of(s, "meteo"));
  auto plan = weather_plan();
  plan["inputs"].erase(0);
  s = svc.draft_plan(s.id, plan);
  EXPECT_EQ(s.state, SessionState::matching_drafted);
  EXPECT_FALSE(s.report.empty());
  EXPECT_EQ(code_of([&] { svc.confirm(s.id); }), ErrorCode::validation);
  EXPECT_EQ(svc.get(s.id).state, SessionState::matching_drafted);

  // Deleting every entry falls back to candidateSelected.
  auto clear = to_json(s.plan);
  for (const auto* section : {"operations", "inputs", "outputs"})
    for (auto& e : clear[section]) e["expression"] = nullptr;
  s = svc.draft_plan(s.id, clear);
  EXPECT_TRUE(s.plan.empty());
  EXPECT_EQ(s.state, SessionState::candidate_selected);
}

TEST_F(Fixture, ReRankingIsDeterministic) {
  auto svc = service();
  auto s = svc.run_ranking(svc.create_session(abs_data("wsdl/weather.wsdl"), registry).id);
  auto first = to_json(s)["ranking"];
  s = svc.run_ranking(s.id);
  EXPECT_EQ(to_json(s)["ranking"], first);
  s = svc.select_candidate(s.id, 0);
  EXPECT_EQ(code_of([&] { svc.run_ranking(s.id); }), ErrorCode::wrong_state);
  // Selecting another candidate discards the table and draft.
  s = svc.draft_plan(s.id, weather_plan());
  s = svc.select_candidate(s.id, 1);
  EXPECT_TRUE(s.plan.empty());
  EXPECT_EQ(s.state, SessionState::candidate_selected);
  EXPECT_EQ(s.selected, 1u);
}

TEST_F(Fixture, RankingFailuresAreRecorded) {
  write(registry, nlohmann::json{{"entries",
                                  {{{"name", "meteo"}, {"wsdlUri", abs_data("wsdl/meteo.wsdl")}},
                                   {{"name", "junk"}, {"wsdlUri", abs_data("wsdl/not-wsdl.xml")}}}}}
                      .dump());
  auto svc = service();
  auto s = svc.run_ranking(svc.create_session(abs_data("wsdl/weather.wsdl"), registry).id);
  EXPECT_EQ(s.ranking.size(), 1u);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].name, "junk");
}

TEST_F(Fixture, CreateRejectsBadInputs) {
  auto svc = service();
  EXPECT_EQ(code_of([&] { svc.create_session(abs_data("wsdl/not-wsdl.xml"), registry); }), ErrorCode::not_wsdl);
  EXPECT_EQ(code_of([&] { svc.create_session(abs_data("wsdl/weather.wsdl"), tmp / "nope.json"); }),
            ErrorCode::io);
}

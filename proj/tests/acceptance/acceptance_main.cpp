// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include <sys/wait.h>

#include "oracles.hpp"
#include "temp_dir.hpp"
#include "wssubst/annotator.hpp"
#include "wssubst/error.hpp"
#include "wssubst/matcher.hpp"
#include "wssubst/workflow.hpp"

using namespace wssubst;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = true;
  std::string detail;

  void fail(const std::string& why) {
    if (ok) detail = why;
    ok = false;
  }
};

const Lexicon& core() {
  static const Lexicon lex = load_lexicon(WSSUBST_DEFAULT_LEXICON);
  return lex;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(3);
  out << v;
  return out.str();
}

ServiceDescription load(const std::string& rel) { return load_wsdl(oracle::data(rel)); }

// ---------------------------------------------------------------------------

Outcome identity_and_symmetry() {
  Outcome o;
  auto t0 = Clock::now();
  SimilarityEngine engine(core());
  std::vector<ServiceDescription> all;
  for (const char* f : {"wsdl/weather.wsdl", "wsdl/meteo.wsdl", "wsdl/pool/bookstore.wsdl",
                        "wsdl/pool/weather-copy.wsdl", "wsdl/pool/weather-renamed.wsdl",
                        "wsdl/relations/left.wsdl", "wsdl/relations/right.wsdl", "wsdl/imports/main.wsdl"}) {
    all.push_back(load(f));
  }
  std::size_t pairs = 0;
  for (const auto& a : all) {
    double self = engine.service_similarity(a, a);
    if (std::fabs(self - 1.0) > 1e-9) o.fail("Sim(" + a.name + "," + a.name + ") = " + fmt(self));
    for (const auto& b : all) {
      double ab = engine.service_similarity(a, b), ba = engine.service_similarity(b, a);
      if (std::fabs(ab - ba) > 1e-12) o.fail("asymmetric for " + a.name + "/" + b.name);
      ++pairs;
    }
  }
  double secs = seconds_since(t0);
  if (secs > 5.0) o.fail("took " + fmt(secs) + " s");
  if (o.ok) o.detail = std::to_string(pairs) + " pairs in " + fmt(secs) + " s";
  return o;
}

Outcome hausdorff_matrices() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> val(0, 1);
  double worst = 0;
  for (int k = 0; k < 1000; ++k) {
    oracle::Grid g(dim(rng), std::vector<double>(dim(rng)));
    SimilarityMatrix m(g.size(), g[0].size());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = 0; j < g[0].size(); ++j) m(i, j) = g[i][j] = val(rng);
    worst = std::max(worst, std::fabs(hausdorff_similarity(m) - oracle::hausdorff(g)));
  }
  if (worst >= 1e-12) o.fail("max error " + fmt(worst));
  else o.detail = "1000 matrices, max error " + fmt(worst);
  return o;
}

Outcome jaro_winkler_pairs() {
  Outcome o;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> len(0, 12);
  const std::string alphabet = "abcdefgABC";
  double worst = 0;
  for (int k = 0; k < 10000; ++k) {
    std::string a, b;
    for (int i = len(rng); i > 0; --i) a += alphabet[rng() % alphabet.size()];
    for (int i = len(rng); i > 0; --i) b += alphabet[rng() % alphabet.size()];
    worst = std::max(worst, std::fabs(jaro_winkler(a, b) - oracle::jaro_winkler(a, b)));
  }
  double martha = jaro_winkler("martha", "marhta");
  if (worst > 1e-9) o.fail("max error " + fmt(worst));
  if (std::fabs(martha - 0.9611) > 1e-4) o.fail("martha/marhta = " + fmt(martha));
  if (o.ok) o.detail = "10000 pairs, martha/marhta = " + std::to_string(martha);
  return o;
}

Outcome wu_palmer_table() {
  Outcome o;
  auto lex = load_lexicon(oracle::data("lexicon/taxonomy.lex"));
  // depths: root 1, animal/plant 2, dog/cat/tree 3, puppy 4; stone 1, pebble 2.
  struct Row { const char* a; const char* b; double expected; };
  const Row table[] = {
      {"dog", "dog", 1.0},         {"dog", "cat", 4.0 / 6},   {"puppy", "cat", 4.0 / 7},
      {"puppy", "tree", 2.0 / 7},  {"dog", "puppy", 6.0 / 7}, {"animal", "dog", 4.0 / 5},
      {"root", "dog", 2.0 / 4},    {"animal", "plant", 2.0 / 4}, {"dog", "pebble", 0.0},
      {"stone", "pebble", 2.0 / 3}, {"run", "sprint", 2.0 / 3}, {"dog", "run", 0.0},
  };
  for (const auto& r : table) {
    double got = lex.wu_palmer(lex.at(r.a), lex.at(r.b));
    if (got != r.expected && std::fabs(got - r.expected) > 1e-15) {
      o.fail(std::string(r.a) + "/" + r.b + " = " + fmt(got) + ", expected " + fmt(r.expected));
    }
  }
  if (o.ok) o.detail = std::to_string(std::size(table)) + " pairs exact";
  return o;
}

Outcome classifier_and_relations() {
  Outcome o;
  using S = SetRelation;
  using K = RelationKind;
  const S all[] = {S::equal, S::left_subset_of_right, S::right_subset_of_left, S::intersect, S::disjoint};
  auto subset = [](S r) { return r == S::left_subset_of_right || r == S::right_subset_of_left; };
  for (auto in : all) {
    for (auto out : all) {
      K want = K::intersection;
      if (in == S::disjoint || out == S::disjoint) want = K::difference;
      else if (in == S::equal && out == S::equal) want = K::equality;
      else if (in == S::equal && subset(out)) want = K::corestriction;
      else if (out == S::equal && subset(in)) want = K::restriction;
      else if (subset(in) && in == out) want = K::prolongation;
      auto got = classify_operation_pair(in, out).kind;
      if (got != want) {
        o.fail(std::string(to_string(in)) + "/" + std::string(to_string(out)) + " -> " +
               std::string(to_string(got)));
      }
    }
  }

  SimilarityEngine engine(core());
  const std::vector<std::string> vocab = {"city", "town", "country", "name", "temperature", "day",
                                          "forecast", "qxzv", "bmtk", "wyfr", "zip", "weather"};
  std::mt19937 rng(99);
  auto sentence = [&] {
    std::string s;
    for (int n = 1 + rng() % 3; n > 0; --n) s += vocab[rng() % vocab.size()] + " ";
    return s;
  };
  for (int k = 0; k < 500; ++k) {
    DataSet a, b;
    for (int n = rng() % 5; n > 0; --n) { auto s = sentence(); a.add(Leaf{tokenize(s), {s}, {}, false, std::nullopt}); }
    for (int n = rng() % 5; n > 0; --n) { auto s = sentence(); b.add(Leaf{tokenize(s), {s}, {}, false, std::nullopt}); }
    oracle::Grid v(a.size(), std::vector<double>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j)
        v[i][j] = engine.text().sentence_similarity(a.leaves[i].sentence, b.leaves[j].sentence);
    auto got = std::string(to_string(data_set_relation(engine, a, b, 0.5)));
    auto want = oracle::relation(v, a.size(), b.size(), 0.5);
    if (got != want) o.fail("fixture " + std::to_string(k) + ": " + got + " vs " + want);
  }
  if (o.ok) o.detail = "25 combinations, 500 random fixtures";
  return o;
}

Outcome six_relations() {
  Outcome o;
  SimilarityEngine engine(core());
  auto left = load("wsdl/relations/left.wsdl");
  auto right = load("wsdl/relations/right.wsdl");
  auto table = build_correspondence_table(engine, left, right, engine.operation_matrix(left, right));
  const std::pair<const char*, RelationKind> expected[] = {
      {"SameShape", RelationKind::equality},      {"FewerOutputs", RelationKind::corestriction},
      {"MoreInputs", RelationKind::restriction},  {"MoreOfBoth", RelationKind::prolongation},
      {"PartialInputs", RelationKind::intersection}, {"Unrelated", RelationKind::difference}};
  for (const auto& [col, kind] : expected) {
    auto c = table.col_index(col);
    if (!c) {
      o.fail(std::string("missing column ") + col);
      continue;
    }
    auto got = table.at(0, *c).relation.kind;
    if (got != kind) o.fail(std::string(col) + " -> " + std::string(to_string(got)));
  }
  if (o.ok) o.detail = "all six relations produced";
  return o;
}

Outcome ranking_order() {
  Outcome o;
  SimilarityEngine engine(core());
  auto target = load("wsdl/weather.wsdl");
  std::vector<ServiceDescription> pool;
  for (const char* f : {"wsdl/pool/bookstore.wsdl", "wsdl/pool/weather-renamed.wsdl", "wsdl/pool/weather-copy.wsdl"})
    pool.push_back(load(f));
  auto r = engine.rank_candidates(target, pool);
  std::vector<std::string> names;
  for (const auto& c : r.candidates) names.push_back(std::filesystem::path(c.service->source_uri).stem().string());
  std::vector<std::string> want = {"weather-copy", "weather-renamed", "bookstore"};
  if (names != want) {
    std::string got;
    for (const auto& n : names) got += n + " ";
    o.fail("order " + got);
  } else if (!(r.candidates[0].score > r.candidates[1].score && r.candidates[1].score > r.candidates[2].score)) {
    o.fail("scores not strictly decreasing");
  } else {
    o.detail = "copy " + fmt(r.candidates[0].score) + " > renamed " + fmt(r.candidates[1].score) +
               " > bookstore " + fmt(r.candidates[2].score);
  }
  return o;
}

// Random plan over weather -> meteo that validates cleanly.
MatchingPlan random_plan(std::mt19937& rng, const ServiceDescription& from, const ServiceDescription& to) {
  auto pick = [&](const auto& v) -> const auto& { return v[rng() % v.size()]; };
  auto numeric_expr = [&](const std::vector<const Leaf*>& sources) {
    std::vector<const Leaf*> nums;
    for (const auto* l : sources)
      if (is_numeric_type(l->type)) nums.push_back(l);
    DataExpr e = nums.empty() || rng() % 3 == 0 ? DataExpr::literal(double(1 + rng() % 50))
                                                 : DataExpr::path_ref(pick(nums)->path_text());
    static const DataExpr::Kind ops[] = {DataExpr::Kind::add, DataExpr::Kind::subtract,
                                         DataExpr::Kind::multiply, DataExpr::Kind::divide};
    for (int n = rng() % 3; n > 0; --n) {
      DataExpr rhs = nums.empty() || rng() % 2 ? DataExpr::literal(double(1 + rng() % 9))
                                               : DataExpr::path_ref(pick(nums)->path_text());
      e = DataExpr::binary(ops[rng() % 4], std::move(e), std::move(rhs));
    }
    return e;
  };
  auto text_expr = [&](const std::vector<const Leaf*>& sources) {
    DataExpr e = DataExpr::path_ref(pick(sources)->path_text());
    for (int n = rng() % 3; n > 0; --n) {
      DataExpr rhs = rng() % 2 ? DataExpr::literal(std::string(rng() % 2 ? " / " : "\"quoted\" & <x>"))
                               : DataExpr::path_ref(pick(sources)->path_text());
      e = DataExpr::binary(DataExpr::Kind::concat, std::move(e), std::move(rhs));
    }
    return e;
  };
  auto expr_for = [&](const Leaf& target, const std::vector<const Leaf*>& sources) {
    return is_numeric_type(target.type) ? numeric_expr(sources) : text_expr(sources);
  };

  MatchingPlan plan;
  for (const auto& op : from.operations) {
    if (rng() % 4 == 0) continue;
    std::vector<OperationExpr> refs;
    for (const auto& cand : to.operations)
      if (rng() % 2) refs.push_back(OperationExpr::ref(cand.wsdl_id));
    if (refs.empty()) refs.push_back(OperationExpr::ref(pick(to.operations).wsdl_id));
    OperationExpr expr = refs.size() == 1 ? refs[0]
                         : rng() % 2      ? OperationExpr::all_of(refs)
                                          : OperationExpr::any_of(refs);
    plan.set(OperationMatch{op.wsdl_id, expr});

    std::vector<const Leaf*> in_sources;
    for (const auto& l : op.input.leaves) in_sources.push_back(&l);
    std::vector<const Leaf*> out_sources;
    for (const auto& name : referenced_operations(expr)) {
      const auto* cand = to.find_operation(name);
      for (const auto& l : cand->input.leaves) {
        if (l.optional && rng() % 2) continue;
        plan.set(InputMapping{op.wsdl_id, name, l.path_text(), expr_for(l, in_sources)});
      }
      for (const auto& l : cand->output.leaves) out_sources.push_back(&l);
    }
    for (const auto& l : op.output.leaves)
      if (rng() % 3) plan.set(OutputMapping{op.wsdl_id, l.path_text(), expr_for(l, out_sources)});
  }
  if (plan.operations.empty()) return random_plan(rng, from, to);
  plan.normalize();
  return plan;
}

Outcome plan_round_trips() {
  Outcome o;
  auto weather = load("wsdl/weather.wsdl");
  auto meteo = load("wsdl/meteo.wsdl");
  std::mt19937 rng(5150);
  for (int k = 0; k < 50 && o.ok; ++k) {
    auto plan = random_plan(rng, weather, meteo);
    auto report = validate_plan(plan, weather, meteo);
    if (!report.empty()) {
      o.fail("generated plan " + std::to_string(k) + " invalid: " + report.issues[0].message);
      break;
    }
    try {
      auto pair = annotate_pair(weather, meteo, plan);
      auto extracted = extract_plan(pair);
      if (!(extracted.plan == plan)) o.fail("plan " + std::to_string(k) + " differs after extraction");
      if (!extracted.warnings.empty()) o.fail("plan " + std::to_string(k) + ": " + extracted.warnings[0]);
      if (!same_model(weather, parse_wsdl(pair.substituted_doc, pair.substituted_uri)) ||
          !same_model(meteo, parse_wsdl(pair.substituent_doc, pair.substituent_uri))) {
        o.fail("plan " + std::to_string(k) + ": annotated documents changed the model");
      }
    } catch (const Error& e) {
      o.fail("plan " + std::to_string(k) + ": " + e.what());
    }
  }
  if (o.ok) o.detail = "50 random plans";
  return o;
}

struct Captured {
  int status = -1;
  std::string out;
};

Captured run(const std::string& command) {
  Captured c;
  FILE* p = popen((command + " 2>&1").c_str(), "r");
  if (!p) return c;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) c.out.append(buf, n);
  int rc = pclose(p);
  c.status = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return c;
}

std::string shell_arg(const std::string& s) { return "'" + s + "'"; }

Outcome cli_end_to_end() {
  Outcome o;
  testing_support::TempDir tmp;
  auto t0 = Clock::now();
  const std::string cli = shell_arg(WSSUBST_CLI);
  auto target = oracle::data("wsdl/weather.wsdl");
  auto candidate = oracle::data("wsdl/meteo.wsdl");

  auto rank = run(cli + " rank " + shell_arg(target) + " " + shell_arg(oracle::data("wsdl/pool")));
  if (rank.status != 0 || rank.out.rfind("1  1", 0) != 0 || rank.out.find("weather-copy") == std::string::npos)
    o.fail("rank: " + rank.out.substr(0, 200));

  auto match = run(cli + " match " + shell_arg(target) + " " + shell_arg(candidate));
  if (match.status != 0 || match.out.find("similarity ") != 0) o.fail("match: " + match.out.substr(0, 200));

  auto annotate = run(cli + " annotate " + shell_arg(target) + " " + shell_arg(candidate) + " " +
                      shell_arg(oracle::data("plans/weather-plan.json")) + " --out-dir " + shell_arg(tmp.str()));
  if (annotate.status != 0) {
    o.fail("annotate exit " + std::to_string(annotate.status) + ": " + annotate.out.substr(0, 200));
  } else {
    AnnotatedWsdlPair pair;
    auto read = [](const std::filesystem::path& p) {
      std::ifstream in(p);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    pair.substituted_uri = tmp / "weather.annotated.wsdl";
    pair.substituent_uri = tmp / "meteo.annotated.wsdl";
    pair.substituted_doc = read(pair.substituted_uri);
    pair.substituent_doc = read(pair.substituent_uri);
    if (pair.substituted_doc.empty() || pair.substituent_doc.empty()) {
      o.fail("annotated files missing");
    } else {
      auto dangling = dangling_model_references(pair);
      if (!dangling.empty()) o.fail("dangling " + dangling[0]);
      std::size_t refs = 0;
      for (std::size_t p = 0; (p = pair.substituted_doc.find("modelReference=", p)) != std::string::npos; ++p) ++refs;
      if (refs == 0) o.fail("no model references written");
      auto extract = run(cli + " extract " + shell_arg(pair.substituted_uri) + " " + shell_arg(pair.substituent_uri));
      if (extract.status != 0) o.fail("extract: " + extract.out.substr(0, 200));
    }
  }
  double secs = seconds_since(t0);
  if (secs > 10.0) o.fail("took " + fmt(secs) + " s");
  if (o.ok) o.detail = "rank, match, annotate, extract in " + fmt(secs) + " s";
  return o;
}

Outcome weighted_mean_example() {
  Outcome o;
  double v = combine_operation_scores(0.5, 0.5, 1.0, Weights{});
  if (std::fabs(v - 0.75) > 1e-12) o.fail("got " + fmt(v));
  else o.detail = "(0.5, 0.5, 1.0) -> 0.75";
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"service similarity identity and symmetry", identity_and_symmetry},
      {"modified Hausdorff against reference", hausdorff_matrices},
      {"Jaro-Winkler against reference", jaro_winkler_pairs},
      {"Wu-Palmer on reference taxonomy", wu_palmer_table},
      {"relation classifier and set relations", classifier_and_relations},
      {"six operation relations on curated pair", six_relations},
      {"candidate ranking order", ranking_order},
      {"annotation round trip of random plans", plan_round_trips},
      {"command line end to end", cli_end_to_end},
      {"default weighted mean", weighted_mean_example},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.ok ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail << ")" << std::endl;
    failures += !o.ok;
  }
  return failures == 0 ? 0 : 1;
}

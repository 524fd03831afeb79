#include "wssubst/workflow.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "wssubst/error.hpp"

namespace wssubst {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Registry

namespace {

void sort_entries(std::vector<RegistryEntry>& entries) {
  std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    if (a.name != b.name) return a.name < b.name;
    return a.wsdl_uri < b.wsdl_uri;
  });
}

bool looks_like_json(std::string_view text) {
  auto p = text.find_first_not_of(" \t\r\n");
  return p != std::string_view::npos && (text[p] == '{' || text[p] == '[');
}

}  // namespace

RegistryManifest parse_registry_manifest(std::string_view text, const std::string& base_uri) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "malformed registry manifest: " + std::string(e.what()), base_uri);
  }
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("entries")) throw Error(ErrorCode::parse, "registry manifest has no entries", base_uri);
    list = &doc["entries"];
  }
  if (!list->is_array()) throw Error(ErrorCode::parse, "registry entries must be an array", base_uri);

  RegistryManifest manifest;
  std::set<std::string> seen;
  for (const auto& e : *list) {
    if (!e.is_object() || !e.contains("wsdlUri") || !e["wsdlUri"].is_string()) {
      throw Error(ErrorCode::parse, "registry entry without wsdlUri", base_uri);
    }
    RegistryEntry entry;
    entry.wsdl_uri = resolve_uri(base_uri, e["wsdlUri"].get<std::string>());
    entry.name = e.value("name", fs::path(entry.wsdl_uri).stem().string());
    if (e.contains("metadata")) entry.metadata = e["metadata"];
    if (!seen.insert(entry.wsdl_uri).second) {
      throw Error(ErrorCode::conflict, "duplicate registry URI " + entry.wsdl_uri, entry.wsdl_uri);
    }
    manifest.entries.push_back(std::move(entry));
  }
  sort_entries(manifest.entries);
  return manifest;
}

RegistryManifest load_registry(const std::string& uri, const ResourceLoader& loader) {
  if (is_http_uri(uri)) return parse_registry_manifest(loader.fetch(uri), uri);

  fs::path path(to_local_path(uri));
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    RegistryManifest manifest;
    for (const auto& item : fs::directory_iterator(path)) {
      if (!item.is_regular_file() || item.path().extension() != ".wsdl") continue;
      manifest.entries.push_back(
          {item.path().stem().string(), fs::absolute(item.path()).lexically_normal().string(), json::object()});
    }
    sort_entries(manifest.entries);
    return manifest;
  }
  if (!fs::exists(path, ec)) throw Error(ErrorCode::io, "registry not found: " + uri, uri);
  auto text = loader.fetch(path.string());
  if (path.extension() == ".json" || looks_like_json(text)) {
    return parse_registry_manifest(text, fs::absolute(path).string());
  }
  return {{{path.stem().string(), fs::absolute(path).lexically_normal().string(), json::object()}}};
}

json to_json(const RegistryManifest& manifest) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    entries.push_back({{"name", e.name}, {"wsdlUri", e.wsdl_uri}, {"metadata", e.metadata}});
  }
  return {{"entries", entries}};
}

// ---------------------------------------------------------------------------
// Configuration

void Config::validate() const {
  weights.validate();
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "threshold must lie in (0,1)");
  }
}

Config load_config(const std::string& path, Config base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read config " + path, path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "malformed config: " + std::string(e.what()), path);
  }
  try {
    if (j.contains("lexicon")) base.lexicon = resolve_uri(path, j["lexicon"].get<std::string>());
    if (j.contains("dataDir")) base.data_dir = resolve_uri(path, j["dataDir"].get<std::string>());
    base.weights.input = j.value("p1", base.weights.input);
    base.weights.output = j.value("p2", base.weights.output);
    base.weights.name = j.value("p3", base.weights.name);
    base.threshold = j.value("threshold", base.threshold);
    base.threads = j.value("threads", base.threads);
    if (j.contains("hausdorff")) {
      auto m = j["hausdorff"].get<std::string>();
      if (m == "similarity") base.mode = HausdorffMode::similarity;
      else if (m == "literal") base.mode = HausdorffMode::literal;
      else throw Error(ErrorCode::parse, "unknown hausdorff mode '" + m + "'", path);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "bad config value: " + std::string(e.what()), path);
  }
  return base;
}

// ---------------------------------------------------------------------------
// Session serialization

std::string_view to_string(SessionState s) {
  switch (s) {
    case SessionState::created: return "created";
    case SessionState::ranked: return "ranked";
    case SessionState::candidate_selected: return "candidateSelected";
    case SessionState::matching_drafted: return "matchingDrafted";
    case SessionState::confirmed: return "confirmed";
  }
  return "created";
}

SessionState parse_session_state(std::string_view text) {
  for (auto s : {SessionState::created, SessionState::ranked, SessionState::candidate_selected,
                 SessionState::matching_drafted, SessionState::confirmed}) {
    if (to_string(s) == text) return s;
  }
  throw Error(ErrorCode::parse, "unknown session state '" + std::string(text) + "'");
}

namespace {

json matrix_json(const SimilarityMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"values", rows}};
}

SimilarityMatrix matrix_from_json(const json& j) {
  SimilarityMatrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto& values = j.at("values");
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = values.at(i).at(k).get<double>();
  }
  return m;
}

json artifacts_json(const AnnotatedWsdlPair& a) {
  return {{"substitutedUri", a.substituted_uri},
          {"substituentUri", a.substituent_uri},
          {"substituted", a.substituted_doc},
          {"substituent", a.substituent_doc},
          {"manifest", to_json(a.manifest)}};
}

AnnotatedWsdlPair artifacts_from_json(const json& j) {
  AnnotatedWsdlPair a;
  a.substituted_uri = j.at("substitutedUri").get<std::string>();
  a.substituent_uri = j.at("substituentUri").get<std::string>();
  a.substituted_doc = j.at("substituted").get<std::string>();
  a.substituent_doc = j.at("substituent").get<std::string>();
  for (const auto& r : j.at("manifest")) {
    a.manifest.push_back({r.at("document").get<std::string>(), r.at("target").get<std::string>(),
                          r.at("modelReference").get<std::vector<std::string>>(),
                          r.at("attributes").get<std::map<std::string, std::string>>()});
  }
  return a;
}

json failures_json(const std::vector<CandidateFailure>& failures) {
  json out = json::array();
  for (const auto& f : failures) {
    out.push_back({{"name", f.name}, {"wsdlUri", f.source_uri}, {"message", f.message}});
  }
  return out;
}

json base_json(const MatchingSession& s) {
  json j = {{"id", s.id},
            {"targetWsdlUri", s.target_uri},
            {"registryUri", s.registry_uri},
            {"state", to_string(s.state)},
            {"registry", to_json(s.registry)},
            {"failures", failures_json(s.failures)},
            {"selected", s.selected ? json(*s.selected) : json(nullptr)},
            {"table", s.table ? to_json(*s.table) : json(nullptr)},
            {"plan", to_json(s.plan)},
            {"report", to_json(s.report)}};
  return j;
}

}  // namespace

json to_json(const MatchingSession& s) {
  auto j = base_json(s);
  json ranking = json::array();
  for (const auto& r : s.ranking) {
    ranking.push_back({{"name", r.name},
                       {"wsdlUri", r.wsdl_uri},
                       {"score", r.score},
                       {"operationMatrix", matrix_json(r.operation_matrix)}});
  }
  j["ranking"] = std::move(ranking);
  j["artifacts"] = s.artifacts ? artifacts_json(*s.artifacts) : json(nullptr);
  return j;
}

json summary_json(const MatchingSession& s) {
  auto j = base_json(s);
  json ranking = json::array();
  for (std::size_t i = 0; i < s.ranking.size(); ++i) {
    const auto& r = s.ranking[i];
    ranking.push_back({{"index", i}, {"name", r.name}, {"wsdlUri", r.wsdl_uri}, {"score", r.score}});
  }
  j["ranking"] = std::move(ranking);
  j["artifacts"] = s.artifacts ? to_json(s.artifacts->manifest) : json(nullptr);
  return j;
}

MatchingSession session_from_json(const json& j) {
  try {
    MatchingSession s;
    s.id = j.at("id").get<std::string>();
    s.target_uri = j.at("targetWsdlUri").get<std::string>();
    s.registry_uri = j.at("registryUri").get<std::string>();
    s.state = parse_session_state(j.at("state").get<std::string>());
    for (const auto& e : j.at("registry").at("entries")) {
      s.registry.entries.push_back({e.at("name").get<std::string>(), e.at("wsdlUri").get<std::string>(),
                                    e.value("metadata", json::object())});
    }
    for (const auto& r : j.at("ranking")) {
      s.ranking.push_back({r.at("name").get<std::string>(), r.at("wsdlUri").get<std::string>(),
                           r.at("score").get<double>(), matrix_from_json(r.at("operationMatrix"))});
    }
    for (const auto& f : j.at("failures")) {
      s.failures.push_back({f.at("name").get<std::string>(), f.at("wsdlUri").get<std::string>(),
                            f.at("message").get<std::string>()});
    }
    if (!j.at("selected").is_null()) s.selected = j["selected"].get<std::size_t>();
    if (!j.at("table").is_null()) s.table = table_from_json(j["table"]);
    s.plan = plan_from_json(j.at("plan"));
    s.report = report_from_json(j.at("report"));
    if (!j.at("artifacts").is_null()) s.artifacts = artifacts_from_json(j["artifacts"]);
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "malformed session document: " + std::string(e.what()));
  }
}

// ---------------------------------------------------------------------------
// Store

namespace {

bool valid_id(const std::string& id) {
  return !id.empty() && id.size() <= 64 &&
         std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

std::string new_session_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << rng();
  return out.str();
}

}  // namespace

SessionStore::SessionStore(std::string directory) : dir_(std::move(directory)) {}

std::string SessionStore::path_for(const std::string& id) const {
  return (fs::path(dir_) / (id + ".json")).string();
}

void SessionStore::save(const MatchingSession& session) const {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::io, "cannot create data directory " + dir_, ec.message());
  auto target = path_for(session.id);
  auto tmp = target + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp, tmp);
    out << to_json(session).dump(2);
    if (!out) throw Error(ErrorCode::io, "cannot write " + tmp, tmp);
  }
  fs::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::io, "cannot write " + target, ec.message());
}

std::optional<MatchingSession> SessionStore::load(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  std::ifstream in(path_for(id), std::ios::binary);
  if (!in) return std::nullopt;
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "corrupt session file for " + id, e.what());
  }
  return session_from_json(j);
}

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> ids;
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) return ids;
  for (const auto& item : fs::directory_iterator(dir_)) {
    if (item.path().extension() != ".json") continue;
    auto id = item.path().stem().string();
    if (valid_id(id)) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

// ---------------------------------------------------------------------------
// Service

namespace {

[[noreturn]] void wrong_state(const MatchingSession& s, std::string_view action) {
  throw Error(ErrorCode::wrong_state,
              "cannot " + std::string(action) + " in state " + std::string(to_string(s.state)),
              std::string(to_string(s.state)));
}

void require(const MatchingSession& s, std::initializer_list<SessionState> allowed,
             std::string_view action) {
  if (std::find(allowed.begin(), allowed.end(), s.state) == allowed.end()) wrong_state(s, action);
}

}  // namespace

WorkflowService::WorkflowService(Config config, const ResourceLoader& loader)
    : WorkflowService(config, std::make_shared<const Lexicon>(load_lexicon(config.lexicon)), loader) {}

WorkflowService::WorkflowService(Config config, std::shared_ptr<const Lexicon> lexicon,
                                 const ResourceLoader& loader)
    : config_(std::move(config)),
      loader_(loader),
      lexicon_(std::move(lexicon)),
      engine_(*lexicon_, config_.weights, config_.mode),
      store_(config_.data_dir) {
  config_.validate();
}

std::shared_ptr<std::mutex> WorkflowService::lock_for(const std::string& id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_shared<std::mutex>();
  return slot;
}

MatchingSession WorkflowService::get(const std::string& id) const {
  auto s = store_.load(id);
  if (!s) throw Error(ErrorCode::not_found, "no session '" + id + "'", id);
  return std::move(*s);
}

template <typename Fn>
MatchingSession WorkflowService::mutate(const std::string& id, Fn&& fn) {
  auto lock = lock_for(id);
  std::lock_guard guard(*lock);
  auto session = get(id);
  if (session.state == SessionState::confirmed) wrong_state(session, "modify a confirmed session");
  fn(session);
  store_.save(session);
  return session;
}

MatchingSession WorkflowService::create_session(const std::string& target_uri,
                                                const std::string& registry_uri) {
  MatchingSession s;
  s.target_uri = target_uri;
  s.registry_uri = registry_uri;
  load_wsdl(target_uri, loader_);
  s.registry = load_registry(registry_uri, loader_);
  do {
    s.id = new_session_id();
  } while (store_.load(s.id));
  store_.save(s);
  return s;
}

MatchingSession WorkflowService::run_ranking(const std::string& id) {
  return mutate(id, [&](MatchingSession& s) {
    require(s, {SessionState::created, SessionState::ranked}, "rank");
    auto target = load_wsdl(s.target_uri, loader_);

    std::vector<ServiceDescription> pool;
    std::vector<const RegistryEntry*> origin;
    s.failures.clear();
    for (const auto& e : s.registry.entries) {
      try {
        pool.push_back(load_wsdl(e.wsdl_uri, loader_));
        origin.push_back(&e);
      } catch (const Error& err) {
        s.failures.push_back({e.name, e.wsdl_uri, err.what()});
      }
    }
    auto ranking = engine_.rank_candidates(target, pool, config_.threads);
    for (auto& f : ranking.failures) s.failures.push_back(std::move(f));

    s.ranking.clear();
    for (auto& c : ranking.candidates) {
      const auto& entry = *origin[static_cast<std::size_t>(c.service - pool.data())];
      s.ranking.push_back({entry.name, entry.wsdl_uri, c.score, std::move(c.operation_matrix)});
    }
    s.selected.reset();
    s.table.reset();
    s.plan = {};
    s.report = {};
    s.state = SessionState::ranked;
  });
}

std::pair<ServiceDescription, ServiceDescription> WorkflowService::services(
    const MatchingSession& s) const {
  if (!s.selected) wrong_state(s, "load the selected candidate");
  return {load_wsdl(s.target_uri, loader_), load_wsdl(s.ranking.at(*s.selected).wsdl_uri, loader_)};
}

MatchingSession WorkflowService::select_candidate(const std::string& id, std::size_t index) {
  return mutate(id, [&](MatchingSession& s) {
    require(s, {SessionState::ranked, SessionState::candidate_selected, SessionState::matching_drafted},
            "select a candidate");
    if (index >= s.ranking.size()) {
      throw Error(ErrorCode::invalid_argument,
                  "candidate index " + std::to_string(index) + " out of range (ranking has " +
                      std::to_string(s.ranking.size()) + " entries)",
                  std::to_string(index));
    }
    auto target = load_wsdl(s.target_uri, loader_);
    auto candidate = load_wsdl(s.ranking[index].wsdl_uri, loader_);
    s.table = build_correspondence_table(engine_, target, candidate,
                                         s.ranking[index].operation_matrix, config_.threshold);
    s.selected = index;
    s.plan = {};
    s.report = {};
    s.state = SessionState::candidate_selected;
  });
}

MatchingSession WorkflowService::draft_plan(const std::string& id, const json& fragment) {
  return mutate(id, [&](MatchingSession& s) {
    require(s, {SessionState::candidate_selected, SessionState::matching_drafted}, "draft a plan");
    auto [target, candidate] = services(s);
    auto plan = s.plan;
    apply_plan_fragment(plan, fragment);
    plan.normalize();
    s.plan = std::move(plan);
    s.report = validate_plan(s.plan, target, candidate);
    s.state = s.plan.empty() ? SessionState::candidate_selected : SessionState::matching_drafted;
  });
}

MatchingSession WorkflowService::confirm(const std::string& id) {
  return mutate(id, [&](MatchingSession& s) {
    require(s, {SessionState::matching_drafted}, "confirm");
    auto [target, candidate] = services(s);
    s.report = validate_plan(s.plan, target, candidate);
    if (!s.report.empty()) {
      throw Error(ErrorCode::validation,
                  "plan has " + std::to_string(s.report.issues.size()) + " validation issue(s)",
                  to_json(s.report).dump());
    }
    s.artifacts = annotate_pair(target, candidate, s.plan);
    s.state = SessionState::confirmed;
  });
}

}  // namespace wssubst

#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wssubst/annotator.hpp"
#include "wssubst/lexicon.hpp"
#include "wssubst/mapping_language.hpp"
#include "wssubst/matcher.hpp"
#include "wssubst/similarity_engine.hpp"

#ifndef WSSUBST_DEFAULT_LEXICON
#define WSSUBST_DEFAULT_LEXICON "data/lexicon/core.lex"
#endif

namespace wssubst {

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

struct RegistryEntry {
  std::string name;
  std::string wsdl_uri;
  nlohmann::json metadata = nlohmann::json::object();
  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

struct RegistryManifest {
  std::vector<RegistryEntry> entries;  // by name, then URI; URIs distinct
  friend bool operator==(const RegistryManifest&, const RegistryManifest&) = default;
};

/// Directory: one entry per *.wsdl file. JSON file or http URL: a manifest
/// `{"entries":[{"name","wsdlUri","metadata"}]}` with URIs resolved against
/// the manifest location. A single .wsdl file is a one-entry registry.
RegistryManifest load_registry(const std::string& uri,
                               const ResourceLoader& loader = default_loader());
RegistryManifest parse_registry_manifest(std::string_view text, const std::string& base_uri);
nlohmann::json to_json(const RegistryManifest& manifest);

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct Config {
  std::string lexicon = WSSUBST_DEFAULT_LEXICON;
  Weights weights;
  double threshold = kDefaultThreshold;
  std::string data_dir = "wssubst-data";
  HausdorffMode mode = HausdorffMode::similarity;
  unsigned threads = 0;  // 0 = hardware concurrency

  void validate() const;
};

/// Reads `{"lexicon", "p1", "p2", "p3", "threshold", "dataDir", "hausdorff",
/// "threads"}`; absent keys keep their value from `base`.
Config load_config(const std::string& path, Config base = {});

// ---------------------------------------------------------------------------
// Sessions
// ---------------------------------------------------------------------------

enum class SessionState { created, ranked, candidate_selected, matching_drafted, confirmed };

std::string_view to_string(SessionState s);
SessionState parse_session_state(std::string_view text);

struct RankingEntry {
  std::string name;
  std::string wsdl_uri;
  double score = 0.0;
  SimilarityMatrix operation_matrix;  // target x candidate operations
};

struct MatchingSession {
  std::string id;
  std::string target_uri;
  std::string registry_uri;
  SessionState state = SessionState::created;
  RegistryManifest registry;
  std::vector<RankingEntry> ranking;
  std::vector<CandidateFailure> failures;
  std::optional<std::size_t> selected;
  std::optional<CorrespondenceTable> table;
  MatchingPlan plan;
  ValidationReport report;  // from the latest draft
  std::optional<AnnotatedWsdlPair> artifacts;
};

nlohmann::json to_json(const MatchingSession& session);
MatchingSession session_from_json(const nlohmann::json& j);
/// Session without the ranking matrices and artifact bodies.
nlohmann::json summary_json(const MatchingSession& session);

/// One JSON file per session under a directory.
class SessionStore {
 public:
  explicit SessionStore(std::string directory);

  void save(const MatchingSession& session) const;
  std::optional<MatchingSession> load(const std::string& id) const;
  std::vector<std::string> list() const;
  const std::string& directory() const { return dir_; }

 private:
  std::string path_for(const std::string& id) const;
  std::string dir_;
};

/// Session state machine over a shared lexicon and engine. Calls on
/// different sessions run concurrently; calls on one session serialize.
class WorkflowService {
 public:
  explicit WorkflowService(Config config, const ResourceLoader& loader = default_loader());
  WorkflowService(Config config, std::shared_ptr<const Lexicon> lexicon,
                  const ResourceLoader& loader = default_loader());

  const Config& config() const { return config_; }
  const SimilarityEngine& engine() const { return engine_; }
  const Lexicon& lexicon() const { return *lexicon_; }

  MatchingSession create_session(const std::string& target_uri, const std::string& registry_uri);
  MatchingSession run_ranking(const std::string& id);
  MatchingSession select_candidate(const std::string& id, std::size_t index);
  /// Merges the fragment and validates; the report is also stored on the
  /// session.
  MatchingSession draft_plan(const std::string& id, const nlohmann::json& fragment);
  MatchingSession confirm(const std::string& id);

  /// Throws Error{not_found} for unknown ids.
  MatchingSession get(const std::string& id) const;
  std::vector<std::string> list() const { return store_.list(); }

  /// Parsed target and selected candidate of a session past selection.
  std::pair<ServiceDescription, ServiceDescription> services(const MatchingSession& s) const;

 private:
  template <typename Fn>
  MatchingSession mutate(const std::string& id, Fn&& fn);
  std::shared_ptr<std::mutex> lock_for(const std::string& id);

  Config config_;
  const ResourceLoader& loader_;
  std::shared_ptr<const Lexicon> lexicon_;
  SimilarityEngine engine_;
  SessionStore store_;
  std::mutex locks_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
};

}  // namespace wssubst

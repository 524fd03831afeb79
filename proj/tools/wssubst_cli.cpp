// wssubst: rank, match and annotate substitute web services from the shell.

#include <CLI11.hpp>
#include <httplib.h>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "wssubst/annotator.hpp"
#include "wssubst/error.hpp"
#include "wssubst/http_api.hpp"
#include "wssubst/matcher.hpp"
#include "wssubst/workflow.hpp"

namespace fs = std::filesystem;
using namespace wssubst;
using nlohmann::json;

namespace {

struct Flags {
  std::string config_file;
  std::string lexicon;
  double p1 = 0, p2 = 0, p3 = 0, threshold = 0;
  std::string data_dir;
  std::string hausdorff;
  unsigned threads = 0;
};

std::string read_file(const std::string& path) { return default_loader().fetch(path); }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string(), path.string());
}

std::string score_text(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", s);
  return buf;
}

int run_rank(const SimilarityEngine& engine, const Config& cfg, const std::string& target_uri,
             const std::string& registry_uri, bool as_json) {
  auto target = load_wsdl(target_uri);
  auto registry = load_registry(registry_uri);
  std::vector<ServiceDescription> pool;
  std::vector<CandidateFailure> failures;
  for (const auto& e : registry.entries) {
    try {
      pool.push_back(load_wsdl(e.wsdl_uri));
      pool.back().name = e.name;
    } catch (const Error& err) {
      failures.push_back({e.name, e.wsdl_uri, err.what()});
    }
  }
  auto ranking = engine.rank_candidates(target, pool, cfg.threads);
  failures.insert(failures.end(), ranking.failures.begin(), ranking.failures.end());

  if (as_json) {
    json out = {{"target", target.name}, {"candidates", json::array()}, {"failures", json::array()}};
    for (const auto& c : ranking.candidates) {
      out["candidates"].push_back(
          {{"name", c.service->name}, {"wsdlUri", c.service->source_uri}, {"score", c.score}});
    }
    for (const auto& f : failures) {
      out["failures"].push_back({{"name", f.name}, {"wsdlUri", f.source_uri}, {"message", f.message}});
    }
    std::cout << out.dump(2) << '\n';
  } else {
    std::size_t rank = 1;
    for (const auto& c : ranking.candidates) {
      std::cout << rank++ << "  " << score_text(c.score) << "  " << c.service->name << "  "
                << c.service->source_uri << '\n';
    }
    if (ranking.candidates.empty()) std::cout << "no candidates\n";
  }
  for (const auto& f : failures) std::cerr << "skipped " << f.name << ": " << f.message << '\n';
  return 0;
}

int run_match(const SimilarityEngine& engine, const Config& cfg, const std::string& target_uri,
              const std::string& candidate_uri, bool as_json) {
  auto target = load_wsdl(target_uri);
  auto candidate = load_wsdl(candidate_uri);
  SimilarityMatrix mws;
  double score = engine.service_similarity(target, candidate, &mws);
  auto table = build_correspondence_table(engine, target, candidate, mws, cfg.threshold);
  auto suggestions = suggest_matching(table);
  if (as_json) {
    std::cout << json{{"score", score}, {"table", to_json(table)}, {"suggestions", to_json(suggestions)}}
                     .dump(2)
              << '\n';
    return 0;
  }
  std::cout << "similarity " << score_text(score) << "\n\n" << format_table(table) << '\n';
  for (const auto& row : suggestions) {
    std::cout << row.row << ": ";
    if (row.no_suggestion()) {
      std::cout << "no suggestion\n";
      continue;
    }
    for (std::size_t i = 0; i < row.ranked.size(); ++i) {
      const auto& s = row.ranked[i];
      if (i) std::cout << ", ";
      std::cout << s.column << " (" << to_string(s.relation.kind) << ")";
    }
    std::cout << '\n';
  }
  return 0;
}

int run_annotate(const std::string& target_uri, const std::string& candidate_uri,
                 const std::string& plan_path, const std::string& out_dir) {
  auto target = load_wsdl(target_uri);
  auto candidate = load_wsdl(candidate_uri);
  json plan_doc;
  try {
    plan_doc = json::parse(read_file(plan_path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "plan is not JSON: " + std::string(e.what()), plan_path);
  }
  auto plan = plan_from_json(plan_doc);
  auto report = validate_plan(plan, target, candidate);
  if (!report.empty()) {
    for (const auto& i : report.issues) {
      std::cerr << to_string(i.kind) << " [" << i.operation << "]: " << i.message << '\n';
    }
    return 2;
  }
  auto pair = annotate_pair(target, candidate, plan);

  fs::path dir = out_dir.empty() ? fs::current_path() : fs::path(out_dir);
  fs::create_directories(dir);
  auto left_name = fs::path(to_local_path(target_uri)).stem().string();
  auto right_name = fs::path(to_local_path(candidate_uri)).stem().string();
  if (left_name == right_name) {
    left_name = "substituted-" + left_name;
    right_name = "substituent-" + right_name;
  }
  auto left = dir / (left_name + ".annotated.wsdl");
  auto right = dir / (right_name + ".annotated.wsdl");
  write_file(left, pair.substituted_doc);
  write_file(right, pair.substituent_doc);

  auto dangling = dangling_model_references(pair);
  for (const auto& iri : dangling) std::cerr << "dangling reference " << iri << '\n';
  std::cout << left.string() << '\n' << right.string() << '\n';
  return dangling.empty() ? 0 : 1;
}

int run_extract(const std::string& substituted, const std::string& substituent) {
  AnnotatedWsdlPair pair;
  pair.substituted_uri = substituted;
  pair.substituent_uri = substituent;
  pair.substituted_doc = read_file(substituted);
  pair.substituent_doc = read_file(substituent);
  auto extracted = extract_plan(pair);
  for (const auto& w : extracted.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << to_json(extracted.plan).dump(2) << '\n';
  return 0;
}

httplib::Server* g_server = nullptr;

int run_serve(const Config& cfg, const std::string& host, int port) {
  WorkflowService service(cfg);
  httplib::Server server;
  install_routes(server, service);
  g_server = &server;
  std::signal(SIGINT, [](int) {
    if (g_server) g_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_server) g_server->stop();
  });
  if (port == 0) {
    port = server.bind_to_any_port(host);
    if (port < 0) throw Error(ErrorCode::io, "cannot bind " + host);
    std::cout << "listening on http://" << host << ":" << port << std::endl;
    server.listen_after_bind();
  } else {
    if (!server.bind_to_port(host, port)) {
      throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
    }
    std::cout << "listening on http://" << host << ":" << port << std::endl;
    server.listen_after_bind();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Web-service substitution matchmaker"};
  app.require_subcommand(1);
  Flags flags;
  auto* o_config = app.add_option("--config", flags.config_file, "JSON configuration file");
  auto* o_lexicon = app.add_option("--lexicon", flags.lexicon, "Lexicon file or WordNet dict directory");
  auto* o_p1 = app.add_option("--p1", flags.p1, "Input similarity weight");
  auto* o_p2 = app.add_option("--p2", flags.p2, "Output similarity weight");
  auto* o_p3 = app.add_option("--p3", flags.p3, "Name similarity weight");
  auto* o_threshold = app.add_option("--threshold", flags.threshold, "Relation threshold in (0,1)");
  auto* o_threads = app.add_option("--threads", flags.threads, "Ranking threads (0 = all cores)");
  auto* o_hausdorff = app.add_option("--hausdorff", flags.hausdorff, "Set aggregation mode")
                          ->check(CLI::IsMember({"similarity", "literal"}));

  bool as_json = false;
  std::string target, registry, candidate, plan_path, out_dir, host = "127.0.0.1";
  int port = 8080;

  auto* rank = app.add_subcommand("rank", "Rank registry services against a target WSDL");
  rank->add_option("target", target)->required();
  rank->add_option("registry", registry, "Directory, manifest JSON or http URL")->required();
  rank->add_flag("--json", as_json);

  auto* match = app.add_subcommand("match", "Print the correspondence table for two services");
  match->add_option("target", target)->required();
  match->add_option("candidate", candidate)->required();
  match->add_flag("--json", as_json);

  auto* annotate = app.add_subcommand("annotate", "Write the SAWSDL-annotated pair for a plan");
  annotate->add_option("target", target)->required();
  annotate->add_option("candidate", candidate)->required();
  annotate->add_option("plan", plan_path)->required();
  annotate->add_option("--out-dir", out_dir);

  auto* extract = app.add_subcommand("extract", "Read the plan back from an annotated pair");
  extract->add_option("substituted", target)->required();
  extract->add_option("substituent", candidate)->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP session API");
  serve->add_option("--port", port, "0 picks a free port");
  serve->add_option("--host", host);
  auto* o_data_dir = serve->add_option("--data-dir", flags.data_dir, "Session directory");

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg;
    if (*o_config) cfg = load_config(flags.config_file, cfg);
    if (*o_lexicon) cfg.lexicon = flags.lexicon;
    if (*o_p1) cfg.weights.input = flags.p1;
    if (*o_p2) cfg.weights.output = flags.p2;
    if (*o_p3) cfg.weights.name = flags.p3;
    if (*o_threshold) cfg.threshold = flags.threshold;
    if (*o_threads) cfg.threads = flags.threads;
    if (*o_data_dir) cfg.data_dir = flags.data_dir;
    if (*o_hausdorff) {
      cfg.mode = flags.hausdorff == "literal" ? HausdorffMode::literal : HausdorffMode::similarity;
    }
    cfg.validate();

    if (*serve) return run_serve(cfg, host, port);
    if (*annotate) return run_annotate(target, candidate, plan_path, out_dir);
    if (*extract) return run_extract(target, candidate);

    auto lexicon = load_lexicon(cfg.lexicon);
    SimilarityEngine engine(lexicon, cfg.weights, cfg.mode);
    if (*rank) return run_rank(engine, cfg, target, registry, as_json);
    return run_match(engine, cfg, target, candidate, as_json);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.code()) << "): " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

#include "wssubst/http_api.hpp"

#include <httplib.h>

namespace wssubst {

using nlohmann::json;

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::not_found: return 404;
    case ErrorCode::wrong_state:
    case ErrorCode::conflict: return 409;
    case ErrorCode::validation:
    case ErrorCode::not_wsdl:
    case ErrorCode::unresolved_reference:
    case ErrorCode::unsupported_import:
    case ErrorCode::dangling_reference:
    case ErrorCode::empty_input: return 422;
    case ErrorCode::io: return 502;
    case ErrorCode::invalid_argument:
    case ErrorCode::parse:
    case ErrorCode::syntax:
    case ErrorCode::evaluation: return 400;
    case ErrorCode::cycle:
    case ErrorCode::detached_synset:
    case ErrorCode::no_common_ancestor: return 500;
  }
  return 500;
}

json error_body(ErrorCode code, const std::string& message, const std::string& detail) {
  return {{"code", to_string(code)}, {"message", message}, {"detail", detail}};
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, "request body is not JSON", e.what());
  }
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const Error& e) {
      send_json(res, error_body(e.code(), e.what(), e.detail()), http_status(e.code()));
    } catch (const json::exception& e) {
      send_json(res, error_body(ErrorCode::parse, "bad request field", e.what()), 400);
    } catch (const std::exception& e) {
      send_json(res, error_body(ErrorCode::io, "internal error", e.what()), 500);
    }
  };
}

json ranking_json(const MatchingSession& s) {
  return {{"state", to_string(s.state)}, {"candidates", summary_json(s)["ranking"]},
          {"failures", summary_json(s)["failures"]}};
}

json table_json(const MatchingSession& s) {
  if (!s.table) {
    throw Error(ErrorCode::wrong_state, "no candidate selected", std::string(to_string(s.state)));
  }
  return {{"state", to_string(s.state)},
          {"selected", *s.selected},
          {"candidate", s.ranking.at(*s.selected).name},
          {"table", to_json(*s.table)},
          {"suggestions", to_json(suggest_matching(*s.table))}};
}

json plan_json(const MatchingSession& s) {
  return {{"state", to_string(s.state)}, {"plan", to_json(s.plan)}, {"report", to_json(s.report)}};
}

json data_set_json(const DataSet& d) {
  json leaves = json::array();
  for (const auto& l : d.leaves) {
    leaves.push_back({{"path", l.path_text()},
                      {"type", l.type.local},
                      {"numeric", is_numeric_type(l.type)},
                      {"optional", l.optional}});
  }
  return leaves;
}

json service_json(const ServiceDescription& svc) {
  json ops = json::array();
  for (const auto& op : svc.operations) {
    ops.push_back({{"name", op.wsdl_id}, {"input", data_set_json(op.input)},
                   {"output", data_set_json(op.output)}});
  }
  return {{"name", svc.name}, {"targetNamespace", svc.target_namespace}, {"operations", ops}};
}

}  // namespace

void install_routes(httplib::Server& server, WorkflowService& service) {
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    auto code = res.status == 404 ? ErrorCode::not_found : ErrorCode::invalid_argument;
    send_json(res, error_body(code, "no route for " + req.method + " " + req.path, req.path),
              res.status);
  });
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.status = 204;
  });

  server.Post("/sessions", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    auto target = body.at("targetWsdlUri").get<std::string>();
    auto registry = body.at("registryUri").get<std::string>();
    send_json(res, summary_json(service.create_session(target, registry)), 201);
  }));

  server.Get("/sessions", guarded([&](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"sessions", service.list()}});
  }));

  server.Get(R"(/sessions/([^/]+))", guarded([&](const httplib::Request& req, httplib::Response& res) {
    send_json(res, summary_json(service.get(req.matches[1])));
  }));

  server.Post(R"(/sessions/([^/]+)/rank)",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                send_json(res, ranking_json(service.run_ranking(req.matches[1])));
              }));

  server.Get(R"(/sessions/([^/]+)/ranking)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               auto s = service.get(req.matches[1]);
               if (s.state == SessionState::created) {
                 throw Error(ErrorCode::wrong_state, "ranking has not run", "created");
               }
               send_json(res, ranking_json(s));
             }));

  server.Post(R"(/sessions/([^/]+)/select)",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                std::string id = req.matches[1];
                service.get(id);  // unknown ids win over body errors
                auto body = parse_body(req);
                const auto& index = body.at("index");
                if (!index.is_number_integer() || index.get<long long>() < 0) {
                  throw Error(ErrorCode::invalid_argument, "index must be a nonnegative integer",
                              index.dump());
                }
                send_json(res, table_json(service.select_candidate(id, index.get<std::size_t>())));
              }));

  server.Get(R"(/sessions/([^/]+)/table)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, table_json(service.get(req.matches[1])));
             }));

  server.Get(R"(/sessions/([^/]+)/operations)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               auto [target, candidate] = service.services(service.get(req.matches[1]));
               send_json(res, {{"substituted", service_json(target)},
                               {"substituent", service_json(candidate)}});
             }));

  server.Get(R"(/sessions/([^/]+)/plan)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               send_json(res, plan_json(service.get(req.matches[1])));
             }));

  server.Put(R"(/sessions/([^/]+)/plan)",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               std::string id = req.matches[1];
               service.get(id);
               send_json(res, plan_json(service.draft_plan(id, parse_body(req))));
             }));

  server.Post(R"(/sessions/([^/]+)/confirm)",
              guarded([&](const httplib::Request& req, httplib::Response& res) {
                auto s = service.confirm(req.matches[1]);
                send_json(res, {{"state", to_string(s.state)},
                                {"manifest", to_json(s.artifacts->manifest)}});
              }));

  server.Get(R"(/sessions/([^/]+)/artifacts/(substituted|substituent))",
             guarded([&](const httplib::Request& req, httplib::Response& res) {
               auto s = service.get(req.matches[1]);
               if (!s.artifacts) {
                 throw Error(ErrorCode::wrong_state, "session is not confirmed",
                             std::string(to_string(s.state)));
               }
               const auto& doc = req.matches[2] == "substituted" ? s.artifacts->substituted_doc
                                                                 : s.artifacts->substituent_doc;
               res.set_content(doc, "application/xml");
             }));

  server.Post("/evaluate", guarded([&](const httplib::Request& req, httplib::Response& res) {
    auto body = parse_body(req);
    auto expr = parse_data_expr(body.at("expression").get<std::string>());
    Bindings bindings;
    auto given = body.value("bindings", json::object());
    for (const auto& [k, v] : given.items()) {
      bindings[tokenize(k).text()] = value_from_json(v);
    }
    auto value = evaluate(expr, bindings);
    send_json(res, {{"expression", render(expr)}, {"value", to_json(value)},
                    {"text", render_value(value)}});
  }));

  server.Get("/registry", guarded([&](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("uri")) throw Error(ErrorCode::invalid_argument, "missing uri parameter");
    send_json(res, to_json(load_registry(req.get_param_value("uri"))));
  }));
}

}  // namespace wssubst

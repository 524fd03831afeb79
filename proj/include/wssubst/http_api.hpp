#pragma once

#include <string>

#include <json.hpp>

#include "wssubst/error.hpp"
#include "wssubst/workflow.hpp"

namespace httplib {
class Server;
}

namespace wssubst {

/// HTTP status used for each library error code.
int http_status(ErrorCode code);

/// `{"code", "message", "detail"}`
nlohmann::json error_body(ErrorCode code, const std::string& message, const std::string& detail);

/// Registers the session API on `server`. `service` must outlive it.
void install_routes(httplib::Server& server, WorkflowService& service);

}  // namespace wssubst

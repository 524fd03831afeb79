#include "wssubst/error.hpp"

namespace wssubst {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::io: return "io";
    case ErrorCode::parse: return "parse";
    case ErrorCode::not_wsdl: return "not_wsdl";
    case ErrorCode::unresolved_reference: return "unresolved_reference";
    case ErrorCode::unsupported_import: return "unsupported_import";
    case ErrorCode::cycle: return "cycle";
    case ErrorCode::detached_synset: return "detached_synset";
    case ErrorCode::no_common_ancestor: return "no_common_ancestor";
    case ErrorCode::empty_input: return "empty_input";
    case ErrorCode::syntax: return "syntax";
    case ErrorCode::evaluation: return "evaluation";
    case ErrorCode::validation: return "validation";
    case ErrorCode::wrong_state: return "wrong_state";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::conflict: return "conflict";
    case ErrorCode::dangling_reference: return "dangling_reference";
  }
  return "unknown";
}

}  // namespace wssubst

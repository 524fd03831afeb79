#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wssubst {

enum class ErrorCode {
  invalid_argument,
  io,
  parse,
  not_wsdl,
  unresolved_reference,
  unsupported_import,
  cycle,
  detached_synset,
  no_common_ancestor,
  empty_input,
  syntax,
  evaluation,
  validation,
  wrong_state,
  not_found,
  conflict,
  dangling_reference,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. `detail` carries machine-usable context such as the
/// missing QName, the offending URI, or a line position.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string detail = {})
      : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

/// Syntax error in an expression, with a 0-based character offset.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, std::size_t position)
      : Error(ErrorCode::syntax,
              message + " at position " + std::to_string(position),
              std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace wssubst

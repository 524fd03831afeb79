#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "wssubst/wsdl_model.hpp"

namespace wssubst {

// ---------------------------------------------------------------------------
// Operation expressions
//
//   expr   := term ("OR" term)*
//   term   := factor ("AND" factor)*
//   factor := name | "(" expr ")"
// ---------------------------------------------------------------------------

struct OperationExpr {
  enum class Kind { ref, all_of, any_of };  // operation, AND, OR

  Kind kind = Kind::ref;
  std::string operation;                // ref only
  std::vector<OperationExpr> children;  // AND/OR, at least two

  static OperationExpr ref(std::string name);
  static OperationExpr all_of(std::vector<OperationExpr> children);
  static OperationExpr any_of(std::vector<OperationExpr> children);

  friend bool operator==(const OperationExpr&, const OperationExpr&) = default;
};

/// Syntax only; names are not checked.
OperationExpr parse_operation_expr(std::string_view text);
/// Also resolves every name against `substituent` (case-sensitive).
OperationExpr parse_operation_expr(std::string_view text, const ServiceDescription& substituent);
std::string render(const OperationExpr& expr);
/// Distinct operation names in first-occurrence order.
std::vector<std::string> referenced_operations(const OperationExpr& expr);

// ---------------------------------------------------------------------------
// Data-mapping expressions
//
//   expr     := additive ("concat" additive)*
//   additive := term (("+" | "-") term)*
//   term     := unary (("*" | "/") unary)*
//   unary    := "-" unary | primary
//   primary  := "<" path words ">" | number | "\"" text "\"" | "(" expr ")"
// ---------------------------------------------------------------------------

struct DataExpr {
  enum class Kind { path, number, text, add, subtract, multiply, divide, concat };

  Kind kind = Kind::number;
  std::string path;   // path: space-joined lowercase words; text: literal
  double number = 0;  // number literal
  std::vector<DataExpr> operands;  // binary operators: exactly two

  static DataExpr path_ref(std::string path);
  static DataExpr literal(double value);
  static DataExpr literal(std::string text);
  static DataExpr binary(Kind op, DataExpr lhs, DataExpr rhs);

  bool is_binary() const { return kind >= Kind::add; }
  bool is_arithmetic() const { return kind >= Kind::add && kind <= Kind::divide; }

  friend bool operator==(const DataExpr&, const DataExpr&) = default;
};

DataExpr parse_data_expr(std::string_view text);
/// Also requires every path reference to name a leaf of `source`.
DataExpr parse_data_expr(std::string_view text, const DataSet& source);
std::string render(const DataExpr& expr);
std::vector<std::string> path_refs(const DataExpr& expr);

using Value = std::variant<double, std::string>;
using Bindings = std::map<std::string, Value, std::less<>>;

/// Arithmetic needs numbers on both sides; concat renders both as text.
Value evaluate(const DataExpr& expr, const Bindings& bindings);

/// Plain decimal below 1e15 ("250", "0.1"), shortest round-trip form above.
std::string format_number(double value);
std::string render_value(const Value& value);
nlohmann::json to_json(const Value& value);
Value value_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------------------
// Matching plan
// ---------------------------------------------------------------------------

struct OperationMatch {
  std::string substituted;
  OperationExpr expr;
  friend bool operator==(const OperationMatch&, const OperationMatch&) = default;
};

/// Substituent input leaf expressed over the substituted operation's inputs.
struct InputMapping {
  std::string substituted;
  std::string substituent;
  std::string leaf;
  DataExpr expr;
  friend bool operator==(const InputMapping&, const InputMapping&) = default;
};

/// Substituted output leaf expressed over the matched operations' outputs.
struct OutputMapping {
  std::string substituted;
  std::string leaf;
  DataExpr expr;
  friend bool operator==(const OutputMapping&, const OutputMapping&) = default;
};

struct MatchingPlan {
  std::vector<OperationMatch> operations;
  std::vector<InputMapping> inputs;
  std::vector<OutputMapping> outputs;

  bool empty() const { return operations.empty() && inputs.empty() && outputs.empty(); }
  const OperationMatch* find_operation(std::string_view substituted) const;

  /// Upserts keyed by (substituted), (substituted, substituent, leaf) and
  /// (substituted, leaf) respectively.
  void set(OperationMatch m);
  void set(InputMapping m);
  void set(OutputMapping m);

  /// Canonical order: sorted by key. Used before comparisons.
  void normalize();

  friend bool operator==(const MatchingPlan&, const MatchingPlan&) = default;
};

nlohmann::json to_json(const MatchingPlan& plan);
/// Parses expressions syntactically; names are checked by validate_plan.
MatchingPlan plan_from_json(const nlohmann::json& j);

/// Merges a JSON fragment with the same shape as a plan document. Entries
/// whose "expression" is empty or null delete their key. Re-applying the
/// same fragment is a no-op.
void apply_plan_fragment(MatchingPlan& plan, const nlohmann::json& fragment);

struct ValidationIssue {
  enum class Kind { unresolved_reference, uncovered_input, type_clash, foreign_operation, duplicate };
  Kind kind;
  std::string operation;  // substituted operation concerned
  std::string message;
};

std::string_view to_string(ValidationIssue::Kind kind);

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool empty() const { return issues.empty(); }
};

nlohmann::json to_json(const ValidationReport& report);
ValidationReport report_from_json(const nlohmann::json& j);

/// Checks references, input coverage of every matched substituent
/// operation, and numeric use of non-numeric schema leaves.
ValidationReport validate_plan(const MatchingPlan& plan, const ServiceDescription& substituted,
                               const ServiceDescription& substituent);

}  // namespace wssubst

#include "wssubst/mapping_language.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <tuple>

#include "wssubst/error.hpp"

namespace wssubst {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

// ---------------------------------------------------------------------------

class OperationExprParser {
 public:
  explicit OperationExprParser(std::string_view text) : text_(text) {}

  OperationExpr parse() {
    auto e = parse_or();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    if (pos_ >= text_.size()) throw SyntaxError(msg + " (end of input)", text_.size());
    throw SyntaxError(msg, pos_);
  }

  void skip() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool keyword(std::string_view kw) {
    skip();
    if (text_.substr(pos_, kw.size()) != kw) return false;
    auto end = pos_ + kw.size();
    if (end < text_.size() && is_name_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  OperationExpr parse_or() {
    std::vector<OperationExpr> terms;
    terms.push_back(parse_and());
    while (keyword("OR")) terms.push_back(parse_and());
    return terms.size() == 1 ? std::move(terms.front()) : OperationExpr::any_of(std::move(terms));
  }

  OperationExpr parse_and() {
    std::vector<OperationExpr> factors;
    factors.push_back(parse_factor());
    while (keyword("AND")) factors.push_back(parse_factor());
    return factors.size() == 1 ? std::move(factors.front())
                               : OperationExpr::all_of(std::move(factors));
  }

  OperationExpr parse_factor() {
    skip();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      auto e = parse_or();
      skip();
      if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
      ++pos_;
      return e;
    }
    if (pos_ >= text_.size() || !is_name_start(text_[pos_])) fail("expected operation name");
    auto start = pos_;
    while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
    auto name = std::string(text_.substr(start, pos_ - start));
    if (name == "AND" || name == "OR") {
      pos_ = start;
      fail("expected operation name");
    }
    return OperationExpr::ref(std::move(name));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void collect_refs(const OperationExpr& e, std::vector<std::string>& out) {
  if (e.kind == OperationExpr::Kind::ref) {
    if (std::find(out.begin(), out.end(), e.operation) == out.end()) out.push_back(e.operation);
    return;
  }
  for (const auto& c : e.children) collect_refs(c, out);
}

void render_into(const OperationExpr& e, std::string& out, bool parenthesize) {
  if (e.kind == OperationExpr::Kind::ref) {
    out += e.operation;
    return;
  }
  if (parenthesize) out += '(';
  const char* sep = e.kind == OperationExpr::Kind::all_of ? " AND " : " OR ";
  for (std::size_t i = 0; i < e.children.size(); ++i) {
    if (i) out += sep;
    const auto& c = e.children[i];
    // Under OR an AND child binds tighter; every other nesting needs brackets.
    bool child_parens = c.kind != OperationExpr::Kind::ref &&
                        !(e.kind == OperationExpr::Kind::any_of &&
                          c.kind == OperationExpr::Kind::all_of);
    render_into(c, out, child_parens);
  }
  if (parenthesize) out += ')';
}

// ---------------------------------------------------------------------------

class DataExprParser {
 public:
  explicit DataExprParser(std::string_view text) : text_(text) {}

  DataExpr parse() {
    auto e = parse_concat();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    if (pos_ >= text_.size()) throw SyntaxError(msg + " (end of input)", text_.size());
    throw SyntaxError(msg, pos_);
  }

  void skip() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool concat_keyword() {
    skip();
    constexpr std::string_view kw = "concat";
    if (text_.size() - pos_ < kw.size()) return false;
    for (std::size_t k = 0; k < kw.size(); ++k) {
      if (std::tolower(static_cast<unsigned char>(text_[pos_ + k])) != kw[k]) return false;
    }
    auto end = pos_ + kw.size();
    if (end < text_.size() && is_name_char(text_[end])) return false;
    pos_ = end;
    return true;
  }

  DataExpr parse_concat() {
    auto lhs = parse_additive();
    while (concat_keyword()) {
      lhs = DataExpr::binary(DataExpr::Kind::concat, std::move(lhs), parse_additive());
    }
    return lhs;
  }

  DataExpr parse_additive() {
    auto lhs = parse_term();
    for (;;) {
      if (peek('+')) {
        ++pos_;
        lhs = DataExpr::binary(DataExpr::Kind::add, std::move(lhs), parse_term());
      } else if (peek('-')) {
        ++pos_;
        lhs = DataExpr::binary(DataExpr::Kind::subtract, std::move(lhs), parse_term());
      } else {
        return lhs;
      }
    }
  }

  DataExpr parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (peek('*')) {
        ++pos_;
        lhs = DataExpr::binary(DataExpr::Kind::multiply, std::move(lhs), parse_unary());
      } else if (peek('/')) {
        ++pos_;
        lhs = DataExpr::binary(DataExpr::Kind::divide, std::move(lhs), parse_unary());
      } else {
        return lhs;
      }
    }
  }

  DataExpr parse_unary() {
    if (peek('-')) {
      ++pos_;
      auto operand = parse_unary();
      if (operand.kind == DataExpr::Kind::number) {
        operand.number = -operand.number;
        return operand;
      }
      return DataExpr::binary(DataExpr::Kind::subtract, DataExpr::literal(0.0), std::move(operand));
    }
    return parse_primary();
  }

  DataExpr parse_primary() {
    skip();
    if (pos_ >= text_.size()) fail("expected operand");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto e = parse_concat();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return e;
    }
    if (c == '<') {
      auto start = pos_++;
      auto close = text_.find('>', pos_);
      if (close == std::string_view::npos) {
        pos_ = start;
        fail("unterminated path reference");
      }
      auto words = tokenize(text_.substr(pos_, close - pos_));
      if (words.empty()) {
        pos_ = start;
        fail("empty path reference");
      }
      pos_ = close + 1;
      return DataExpr::path_ref(words.text());
    }
    if (c == '"') {
      auto start = pos_++;
      std::string out;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
        out += text_[pos_++];
      }
      if (pos_ >= text_.size()) {
        pos_ = start;
        fail("unterminated string literal");
      }
      ++pos_;
      return DataExpr::literal(std::move(out));
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      auto start = pos_;
      while (pos_ < text_.size() &&
             (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) {
        ++pos_;
      }
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        auto save = pos_++;
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      double value = 0;
      auto lexeme = text_.substr(start, pos_ - start);
      auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
      if (ec != std::errc{} || ptr != lexeme.data() + lexeme.size()) {
        pos_ = start;
        fail("malformed number");
      }
      return DataExpr::literal(value);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

int precedence(const DataExpr& e) {
  switch (e.kind) {
    case DataExpr::Kind::concat: return 1;
    case DataExpr::Kind::add:
    case DataExpr::Kind::subtract: return 2;
    case DataExpr::Kind::multiply:
    case DataExpr::Kind::divide: return 3;
    default: return 4;
  }
}

const char* symbol(DataExpr::Kind k) {
  switch (k) {
    case DataExpr::Kind::add: return " + ";
    case DataExpr::Kind::subtract: return " - ";
    case DataExpr::Kind::multiply: return " * ";
    case DataExpr::Kind::divide: return " / ";
    case DataExpr::Kind::concat: return " concat ";
    default: return "";
  }
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

void render_into(const DataExpr& e, std::string& out) {
  switch (e.kind) {
    case DataExpr::Kind::path:
      out += "<" + e.path + ">";
      return;
    case DataExpr::Kind::number:
      out += format_number(e.number);
      return;
    case DataExpr::Kind::text:
      out += quote(e.path);
      return;
    default:
      break;
  }
  const auto p = precedence(e);
  const auto& lhs = e.operands[0];
  const auto& rhs = e.operands[1];
  bool lp = precedence(lhs) < p;
  bool rp = precedence(rhs) <= p;
  if (lp) out += '(';
  render_into(lhs, out);
  if (lp) out += ')';
  out += symbol(e.kind);
  if (rp) out += '(';
  render_into(rhs, out);
  if (rp) out += ')';
}

void collect_paths(const DataExpr& e, std::vector<std::string>& out) {
  if (e.kind == DataExpr::Kind::path) {
    if (std::find(out.begin(), out.end(), e.path) == out.end()) out.push_back(e.path);
    return;
  }
  for (const auto& o : e.operands) collect_paths(o, out);
}

}  // namespace

OperationExpr OperationExpr::ref(std::string name) {
  OperationExpr e;
  e.kind = Kind::ref;
  e.operation = std::move(name);
  return e;
}

OperationExpr OperationExpr::all_of(std::vector<OperationExpr> children) {
  OperationExpr e;
  e.kind = Kind::all_of;
  e.children = std::move(children);
  return e;
}

OperationExpr OperationExpr::any_of(std::vector<OperationExpr> children) {
  OperationExpr e;
  e.kind = Kind::any_of;
  e.children = std::move(children);
  return e;
}

OperationExpr parse_operation_expr(std::string_view text) {
  return OperationExprParser(text).parse();
}

OperationExpr parse_operation_expr(std::string_view text, const ServiceDescription& substituent) {
  auto e = parse_operation_expr(text);
  for (const auto& name : referenced_operations(e)) {
    if (!substituent.find_operation(name)) {
      throw Error(ErrorCode::unresolved_reference,
                  "unknown operation '" + name + "' in " + substituent.name, name);
    }
  }
  return e;
}

std::string render(const OperationExpr& expr) {
  std::string out;
  render_into(expr, out, false);
  return out;
}

std::vector<std::string> referenced_operations(const OperationExpr& expr) {
  std::vector<std::string> out;
  collect_refs(expr, out);
  return out;
}

DataExpr DataExpr::path_ref(std::string path) {
  DataExpr e;
  e.kind = Kind::path;
  e.path = std::move(path);
  return e;
}

DataExpr DataExpr::literal(double value) {
  DataExpr e;
  e.kind = Kind::number;
  e.number = value;
  return e;
}

DataExpr DataExpr::literal(std::string text) {
  DataExpr e;
  e.kind = Kind::text;
  e.path = std::move(text);
  return e;
}

DataExpr DataExpr::binary(Kind op, DataExpr lhs, DataExpr rhs) {
  DataExpr e;
  e.kind = op;
  e.operands.push_back(std::move(lhs));
  e.operands.push_back(std::move(rhs));
  return e;
}

DataExpr parse_data_expr(std::string_view text) { return DataExprParser(text).parse(); }

DataExpr parse_data_expr(std::string_view text, const DataSet& source) {
  auto e = parse_data_expr(text);
  for (const auto& p : path_refs(e)) {
    if (!source.find(p)) {
      throw Error(ErrorCode::unresolved_reference, "unresolved path reference <" + p + ">", p);
    }
  }
  return e;
}

std::string render(const DataExpr& expr) {
  std::string out;
  render_into(expr, out);
  return out;
}

std::vector<std::string> path_refs(const DataExpr& expr) {
  std::vector<std::string> out;
  collect_paths(expr, out);
  return out;
}

std::string format_number(double value) {
  if (std::isnan(value) || std::isinf(value)) {
    throw Error(ErrorCode::evaluation, "non-finite number");
  }
  if (value == 0) value = 0;  // no "-0"
  char buf[64];
  auto fmt = std::fabs(value) < 1e15 ? std::chars_format::fixed : std::chars_format::general;
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, fmt);
  if (ec != std::errc{}) throw Error(ErrorCode::evaluation, "cannot format number");
  return std::string(buf, ptr);
}

std::string render_value(const Value& value) {
  if (const auto* d = std::get_if<double>(&value)) return format_number(*d);
  return std::get<std::string>(value);
}

nlohmann::json to_json(const Value& value) {
  if (const auto* d = std::get_if<double>(&value)) return *d;
  return std::get<std::string>(value);
}

Value value_from_json(const nlohmann::json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error(ErrorCode::invalid_argument, "binding values must be numbers or strings");
}

Value evaluate(const DataExpr& expr, const Bindings& bindings) {
  switch (expr.kind) {
    case DataExpr::Kind::number: return expr.number;
    case DataExpr::Kind::text: return expr.path;
    case DataExpr::Kind::path: {
      auto it = bindings.find(expr.path);
      if (it == bindings.end()) {
        throw Error(ErrorCode::evaluation, "missing binding for <" + expr.path + ">", expr.path);
      }
      return it->second;
    }
    default: break;
  }
  auto lhs = evaluate(expr.operands[0], bindings);
  auto rhs = evaluate(expr.operands[1], bindings);
  if (expr.kind == DataExpr::Kind::concat) return render_value(lhs) + render_value(rhs);
  const auto* a = std::get_if<double>(&lhs);
  const auto* b = std::get_if<double>(&rhs);
  if (!a || !b) {
    throw Error(ErrorCode::evaluation, "arithmetic on non-numeric value in " + render(expr));
  }
  switch (expr.kind) {
    case DataExpr::Kind::add: return *a + *b;
    case DataExpr::Kind::subtract: return *a - *b;
    case DataExpr::Kind::multiply: return *a * *b;
    case DataExpr::Kind::divide:
      if (*b == 0) throw Error(ErrorCode::evaluation, "division by zero in " + render(expr));
      return *a / *b;
    default: break;
  }
  throw Error(ErrorCode::evaluation, "unknown operator");
}

// ---------------------------------------------------------------------------

const OperationMatch* MatchingPlan::find_operation(std::string_view substituted) const {
  for (const auto& m : operations) {
    if (m.substituted == substituted) return &m;
  }
  return nullptr;
}

void MatchingPlan::set(OperationMatch m) {
  for (auto& x : operations) {
    if (x.substituted == m.substituted) {
      x = std::move(m);
      return;
    }
  }
  operations.push_back(std::move(m));
}

void MatchingPlan::set(InputMapping m) {
  for (auto& x : inputs) {
    if (x.substituted == m.substituted && x.substituent == m.substituent && x.leaf == m.leaf) {
      x = std::move(m);
      return;
    }
  }
  inputs.push_back(std::move(m));
}

void MatchingPlan::set(OutputMapping m) {
  for (auto& x : outputs) {
    if (x.substituted == m.substituted && x.leaf == m.leaf) {
      x = std::move(m);
      return;
    }
  }
  outputs.push_back(std::move(m));
}

void MatchingPlan::normalize() {
  std::sort(operations.begin(), operations.end(),
            [](const auto& a, const auto& b) { return a.substituted < b.substituted; });
  std::sort(inputs.begin(), inputs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.substituted, a.substituent, a.leaf) <
           std::tie(b.substituted, b.substituent, b.leaf);
  });
  std::sort(outputs.begin(), outputs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.substituted, a.leaf) < std::tie(b.substituted, b.leaf);
  });
}

namespace {

std::string_view semantics(const OperationExpr& e) {
  switch (e.kind) {
    case OperationExpr::Kind::ref: return "single";
    case OperationExpr::Kind::all_of: return "invoke all, merge outputs";
    case OperationExpr::Kind::any_of: return "preference order fallback";
  }
  return "single";
}

std::string normalized_leaf(const nlohmann::json& entry) {
  return tokenize(entry.at("leaf").get<std::string>()).text();
}

bool is_deletion(const nlohmann::json& entry) {
  auto it = entry.find("expression");
  return it == entry.end() || it->is_null() ||
         (it->is_string() && it->get<std::string>().find_first_not_of(" \t\r\n") ==
                                 std::string::npos);
}

}  // namespace

nlohmann::json to_json(const MatchingPlan& plan) {
  nlohmann::json ops = nlohmann::json::array(), ins = nlohmann::json::array(),
                 outs = nlohmann::json::array();
  for (const auto& m : plan.operations) {
    ops.push_back({{"substituted", m.substituted},
                   {"expression", render(m.expr)},
                   {"semantics", semantics(m.expr)}});
  }
  for (const auto& m : plan.inputs) {
    ins.push_back({{"substituted", m.substituted},
                   {"substituent", m.substituent},
                   {"leaf", m.leaf},
                   {"expression", render(m.expr)}});
  }
  for (const auto& m : plan.outputs) {
    outs.push_back({{"substituted", m.substituted}, {"leaf", m.leaf}, {"expression", render(m.expr)}});
  }
  return {{"operations", ops}, {"inputs", ins}, {"outputs", outs}};
}

MatchingPlan plan_from_json(const nlohmann::json& j) {
  MatchingPlan plan;
  apply_plan_fragment(plan, j);
  return plan;
}

void apply_plan_fragment(MatchingPlan& plan, const nlohmann::json& fragment) {
  if (!fragment.is_object()) throw Error(ErrorCode::invalid_argument, "plan must be a JSON object");
  try {
    for (const auto& e : fragment.value("operations", nlohmann::json::array())) {
      auto key = e.at("substituted").get<std::string>();
      if (is_deletion(e)) {
        std::erase_if(plan.operations, [&](const auto& m) { return m.substituted == key; });
      } else {
        plan.set(OperationMatch{key, parse_operation_expr(e.at("expression").get<std::string>())});
      }
    }
    for (const auto& e : fragment.value("inputs", nlohmann::json::array())) {
      auto sub = e.at("substituted").get<std::string>();
      auto target = e.at("substituent").get<std::string>();
      auto leaf = normalized_leaf(e);
      if (is_deletion(e)) {
        std::erase_if(plan.inputs, [&](const auto& m) {
          return m.substituted == sub && m.substituent == target && m.leaf == leaf;
        });
      } else {
        plan.set(InputMapping{sub, target, leaf,
                              parse_data_expr(e.at("expression").get<std::string>())});
      }
    }
    for (const auto& e : fragment.value("outputs", nlohmann::json::array())) {
      auto sub = e.at("substituted").get<std::string>();
      auto leaf = normalized_leaf(e);
      if (is_deletion(e)) {
        std::erase_if(plan.outputs,
                      [&](const auto& m) { return m.substituted == sub && m.leaf == leaf; });
      } else {
        plan.set(OutputMapping{sub, leaf, parse_data_expr(e.at("expression").get<std::string>())});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed plan: ") + e.what());
  }
}

std::string_view to_string(ValidationIssue::Kind kind) {
  switch (kind) {
    case ValidationIssue::Kind::unresolved_reference: return "unresolved_reference";
    case ValidationIssue::Kind::uncovered_input: return "uncovered_input";
    case ValidationIssue::Kind::type_clash: return "type_clash";
    case ValidationIssue::Kind::foreign_operation: return "foreign_operation";
    case ValidationIssue::Kind::duplicate: return "duplicate";
  }
  return "unknown";
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& i : report.issues) {
    out.push_back({{"kind", to_string(i.kind)}, {"operation", i.operation}, {"message", i.message}});
  }
  return out;
}

ValidationReport report_from_json(const nlohmann::json& j) {
  using K = ValidationIssue::Kind;
  ValidationReport report;
  for (const auto& e : j) {
    auto name = e.at("kind").get<std::string>();
    std::optional<K> kind;
    for (auto k : {K::unresolved_reference, K::uncovered_input, K::type_clash, K::foreign_operation,
                   K::duplicate}) {
      if (to_string(k) == name) kind = k;
    }
    if (!kind) throw Error(ErrorCode::parse, "unknown validation issue '" + name + "'");
    report.issues.push_back(
        {*kind, e.value("operation", ""), e.at("message").get<std::string>()});
  }
  return report;
}

namespace {

using LeafLookup = std::function<const Leaf*(const std::string&)>;

// Arithmetic directly over a path whose schema type is a non-numeric
// built-in; unknown (non-XSD) types are not judged.
void check_types(const DataExpr& e, const LeafLookup& lookup, const std::string& op,
                 const std::string& where, ValidationReport& report) {
  if (e.is_arithmetic()) {
    for (const auto& o : e.operands) {
      if (o.kind == DataExpr::Kind::text) {
        report.issues.push_back({ValidationIssue::Kind::type_clash, op,
                                 where + ": arithmetic on text literal " + render(o)});
      }
      if (o.kind != DataExpr::Kind::path) continue;
      const auto* leaf = lookup(o.path);
      if (leaf && leaf->type.ns == kXsdNamespace && !is_numeric_type(leaf->type)) {
        report.issues.push_back({ValidationIssue::Kind::type_clash, op,
                                 where + ": arithmetic on <" + o.path + "> of type xsd:" +
                                     leaf->type.local});
      }
    }
  }
  for (const auto& o : e.operands) check_types(o, lookup, op, where, report);
}

void check_target_type(const DataExpr& e, const Leaf& target, const std::string& op,
                       const std::string& where, ValidationReport& report) {
  if (e.kind == DataExpr::Kind::concat && is_numeric_type(target.type)) {
    report.issues.push_back({ValidationIssue::Kind::type_clash, op,
                             where + ": text concatenation assigned to numeric leaf of type xsd:" +
                                 target.type.local});
  }
}

}  // namespace

ValidationReport validate_plan(const MatchingPlan& plan, const ServiceDescription& substituted,
                               const ServiceDescription& substituent) {
  using K = ValidationIssue::Kind;
  ValidationReport report;
  std::set<std::string> seen;

  for (const auto& m : plan.operations) {
    if (!seen.insert(m.substituted).second) {
      report.issues.push_back({K::duplicate, m.substituted,
                               "more than one operation expression for " + m.substituted});
    }
    if (!substituted.find_operation(m.substituted)) {
      report.issues.push_back({K::unresolved_reference, m.substituted,
                               "unknown substituted operation '" + m.substituted + "'"});
      continue;
    }
    for (const auto& name : referenced_operations(m.expr)) {
      const auto* target = substituent.find_operation(name);
      if (!target) {
        report.issues.push_back({K::unresolved_reference, m.substituted,
                                 "unknown substituent operation '" + name + "'"});
        continue;
      }
      std::vector<std::string> missing;
      for (const auto& leaf : target->input.leaves) {
        if (leaf.optional) continue;
        bool covered = std::any_of(plan.inputs.begin(), plan.inputs.end(), [&](const auto& in) {
          return in.substituted == m.substituted && in.substituent == name &&
                 in.leaf == leaf.path_text();
        });
        if (!covered) missing.push_back("<" + leaf.path_text() + ">");
      }
      if (!missing.empty()) {
        std::string list;
        for (const auto& s : missing) list += (list.empty() ? "" : ", ") + s;
        report.issues.push_back(
            {K::uncovered_input, m.substituted, "uncovered input leaves of " + name + ": " + list});
      }
    }
  }

  for (const auto& in : plan.inputs) {
    std::string where = in.substituted + " -> " + in.substituent + " <" + in.leaf + ">";
    const auto* source = substituted.find_operation(in.substituted);
    const auto* match = plan.find_operation(in.substituted);
    if (!source) {
      report.issues.push_back({K::unresolved_reference, in.substituted,
                               where + ": unknown substituted operation"});
      continue;
    }
    if (!match) {
      report.issues.push_back({K::foreign_operation, in.substituted,
                               where + ": no operation expression for " + in.substituted});
      continue;
    }
    auto refs = referenced_operations(match->expr);
    if (std::find(refs.begin(), refs.end(), in.substituent) == refs.end()) {
      report.issues.push_back({K::foreign_operation, in.substituted,
                               where + ": " + in.substituent + " is not in the operation expression"});
      continue;
    }
    const auto* target = substituent.find_operation(in.substituent);
    if (!target) continue;  // reported above
    const auto* target_leaf = target->input.find(in.leaf);
    if (!target_leaf) {
      report.issues.push_back({K::unresolved_reference, in.substituted,
                               where + ": unknown input leaf of " + in.substituent});
    }
    for (const auto& p : path_refs(in.expr)) {
      if (!source->input.find(p)) {
        report.issues.push_back({K::unresolved_reference, in.substituted,
                                 where + ": <" + p + "> is not an input of " + in.substituted});
      }
    }
    LeafLookup lookup = [&](const std::string& p) { return source->input.find(p); };
    check_types(in.expr, lookup, in.substituted, where, report);
    if (target_leaf) check_target_type(in.expr, *target_leaf, in.substituted, where, report);
  }

  for (const auto& out : plan.outputs) {
    std::string where = out.substituted + " <" + out.leaf + ">";
    const auto* source = substituted.find_operation(out.substituted);
    const auto* match = plan.find_operation(out.substituted);
    if (!source) {
      report.issues.push_back({K::unresolved_reference, out.substituted,
                               where + ": unknown substituted operation"});
      continue;
    }
    if (!match) {
      report.issues.push_back({K::foreign_operation, out.substituted,
                               where + ": no operation expression for " + out.substituted});
      continue;
    }
    const auto* target_leaf = source->output.find(out.leaf);
    if (!target_leaf) {
      report.issues.push_back({K::unresolved_reference, out.substituted,
                               where + ": unknown output leaf of " + out.substituted});
    }
    auto refs = referenced_operations(match->expr);
    LeafLookup lookup = [&](const std::string& p) -> const Leaf* {
      for (const auto& name : refs) {
        if (const auto* op = substituent.find_operation(name)) {
          if (const auto* l = op->output.find(p)) return l;
        }
      }
      return nullptr;
    };
    for (const auto& p : path_refs(out.expr)) {
      if (lookup(p)) continue;
      bool elsewhere = std::any_of(substituent.operations.begin(), substituent.operations.end(),
                                   [&](const Operation& op) { return op.output.find(p) != nullptr; });
      report.issues.push_back(
          {elsewhere ? K::foreign_operation : K::unresolved_reference, out.substituted,
           where + ": <" + p + ">" +
               (elsewhere ? " belongs to an operation outside the expression"
                          : " is not an output of the matched operations")});
    }
    check_types(out.expr, lookup, out.substituted, where, report);
    if (target_leaf) check_target_type(out.expr, *target_leaf, out.substituted, where, report);
  }
  return report;
}

}  // namespace wssubst

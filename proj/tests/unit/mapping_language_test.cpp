#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "wssubst/error.hpp"
#include "wssubst/mapping_language.hpp"

using namespace wssubst;

namespace {

using K = DataExpr::Kind;

std::size_t syntax_position(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SyntaxError& e) {
    return e.position();
  }
  ADD_FAILURE() << "no syntax error";
  return std::string::npos;
}

OperationExpr random_op_expr(std::mt19937& rng, int depth) {
  static const char* names[] = {"getCity", "getTemp", "getAll", "Lookup_2", "a.b-c"};
  if (depth == 0 || rng() % 3 == 0) return OperationExpr::ref(names[rng() % 5]);
  std::vector<OperationExpr> kids;
  for (int n = 2 + rng() % 2; n > 0; --n) kids.push_back(random_op_expr(rng, depth - 1));
  return rng() % 2 ? OperationExpr::all_of(std::move(kids)) : OperationExpr::any_of(std::move(kids));
}

// Flattens same-kind nesting, which the parser never produces.
OperationExpr canonical(OperationExpr e) {
  if (e.kind == OperationExpr::Kind::ref) return e;
  std::vector<OperationExpr> kids;
  for (auto& c : e.children) {
    auto k = canonical(std::move(c));
    if (k.kind == e.kind) {
      for (auto& g : k.children) kids.push_back(std::move(g));
    } else {
      kids.push_back(std::move(k));
    }
  }
  e.children = std::move(kids);
  return e;
}

DataExpr random_data_expr(std::mt19937& rng, int depth) {
  static const char* paths[] = {"city name", "zip", "temperature", "day count"};
  if (depth == 0 || rng() % 4 == 0) {
    switch (rng() % 3) {
      case 0: return DataExpr::path_ref(paths[rng() % 4]);
      case 1: return DataExpr::literal(static_cast<double>(rng() % 1000) / 4.0);
      default: return DataExpr::literal(std::string(rng() % 2 ? "a \"q\" b" : "x\\y"));
    }
  }
  static const K ops[] = {K::add, K::subtract, K::multiply, K::divide, K::concat};
  return DataExpr::binary(ops[rng() % 5], random_data_expr(rng, depth - 1), random_data_expr(rng, depth - 1));
}

std::string random_arithmetic(std::mt19937& rng, int depth) {
  if (depth == 0 || rng() % 3 == 0) return std::to_string(1 + rng() % 9);
  static const char ops[] = {'+', '-', '*', '/'};
  std::string s = random_arithmetic(rng, depth - 1) + " " + ops[rng() % 4] + " " + random_arithmetic(rng, depth - 1);
  return rng() % 3 == 0 ? "(" + s + ")" : s;
}

ServiceDescription load(const char* rel) { return load_wsdl(oracle::data(rel)); }

MatchingPlan weather_plan() {
  std::ifstream in(oracle::data("plans/weather-plan.json"));
  return plan_from_json(nlohmann::json::parse(in));
}

bool has_issue(const ValidationReport& r, ValidationIssue::Kind kind) {
  for (const auto& i : r.issues)
    if (i.kind == kind) return true;
  return false;
}

}  // namespace

TEST(OperationExpr, ParseExamples) {
  auto e = parse_operation_expr("getCity AND getTemp OR getAll");
  ASSERT_EQ(e.kind, OperationExpr::Kind::any_of);
  ASSERT_EQ(e.children.size(), 2u);
  EXPECT_EQ(e.children[0], OperationExpr::all_of({OperationExpr::ref("getCity"), OperationExpr::ref("getTemp")}));
  EXPECT_EQ(e.children[1], OperationExpr::ref("getAll"));
  EXPECT_EQ(render(e), "getCity AND getTemp OR getAll");

  auto p = parse_operation_expr("getCity AND (getTemp OR getAll)");
  EXPECT_EQ(p.kind, OperationExpr::Kind::all_of);
  EXPECT_EQ(render(p), "getCity AND (getTemp OR getAll)");
  EXPECT_EQ(parse_operation_expr("  (Solo) "), OperationExpr::ref("Solo"));
  EXPECT_EQ(referenced_operations(parse_operation_expr("a AND b OR a")), (std::vector<std::string>{"a", "b"}));
  // Keywords are case-sensitive; "and" is a name.
  EXPECT_EQ(parse_operation_expr("ANDroid"), OperationExpr::ref("ANDroid"));
}

TEST(OperationExpr, SyntaxErrorsCarryPosition) {
  EXPECT_EQ(syntax_position([] { parse_operation_expr("getCity AND"); }), 11u);
  EXPECT_EQ(syntax_position([] { parse_operation_expr("getCity getTemp"); }), 8u);
  EXPECT_EQ(syntax_position([] { parse_operation_expr("(a OR b"); }), 7u);
  EXPECT_EQ(syntax_position([] { parse_operation_expr("AND"); }), 0u);
  EXPECT_EQ(syntax_position([] { parse_operation_expr(""); }), 0u);
  try {
    parse_operation_expr("a OR");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos);
    EXPECT_EQ(e.code(), ErrorCode::syntax);
  }
}

TEST(OperationExpr, NamesResolveAgainstSubstituent) {
  auto meteo = load("wsdl/meteo.wsdl");
  EXPECT_NO_THROW(parse_operation_expr("CurrentWeather OR WeatherForecast", meteo));
  try {
    parse_operation_expr("CurrentWeather AND currentweather", meteo);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::unresolved_reference);
    EXPECT_EQ(e.detail(), "currentweather");
  }
}

TEST(OperationExpr, RenderParseRoundTrip) {
  std::mt19937 rng(21);
  for (int k = 0; k < 500; ++k) {
    auto e = canonical(random_op_expr(rng, 4));
    auto text = render(e);
    EXPECT_EQ(parse_operation_expr(text), e) << text;
    EXPECT_EQ(render(parse_operation_expr(text)), text);
  }
}

TEST(DataExpr, ParseExamples) {
  auto e = parse_data_expr("<City Name> concat \", \" concat <country>");
  EXPECT_EQ(e.kind, K::concat);
  EXPECT_EQ(path_refs(e), (std::vector<std::string>{"city name", "country"}));
  EXPECT_EQ(render(e), "<city name> concat \", \" concat <country>");

  auto a = parse_data_expr("1 + 2 * 3");
  EXPECT_EQ(a.kind, K::add);
  EXPECT_EQ(a.operands[1].kind, K::multiply);
  EXPECT_EQ(parse_data_expr("-4").number, -4.0);
  EXPECT_EQ(render(parse_data_expr("(1 - 2) - 3")), "1 - 2 - 3");
  EXPECT_EQ(render(parse_data_expr("1 - (2 - 3)")), "1 - (2 - 3)");
  EXPECT_EQ(parse_data_expr("<a> CONCAT <b>").kind, K::concat);
  EXPECT_EQ(parse_data_expr("2.5e2").number, 250.0);
}

TEST(DataExpr, SyntaxErrors) {
  EXPECT_EQ(syntax_position([] { parse_data_expr("<zip"); }), 0u);
  EXPECT_EQ(syntax_position([] { parse_data_expr("1 +"); }), 3u);
  EXPECT_EQ(syntax_position([] { parse_data_expr("1 2"); }), 2u);
  EXPECT_EQ(syntax_position([] { parse_data_expr("\"open"); }), 0u);
  EXPECT_EQ(syntax_position([] { parse_data_expr("<>"); }), 0u);
  EXPECT_EQ(syntax_position([] { parse_data_expr("1..2"); }), 0u);
}

TEST(DataExpr, PathsResolveAgainstSource) {
  auto weather = load("wsdl/weather.wsdl");
  const auto& in = weather.operations[0].input;
  EXPECT_NO_THROW(parse_data_expr("<get weather city name>", in));
  EXPECT_THROW(parse_data_expr("<get weather zip>", in), Error);
}

TEST(DataExpr, RenderParseRoundTrip) {
  std::mt19937 rng(8);
  for (int k = 0; k < 1000; ++k) {
    auto e = random_data_expr(rng, 4);
    auto text = render(e);
    EXPECT_EQ(parse_data_expr(text), e) << text;
  }
}

TEST(DataExpr, PrecedenceAgreesWithShuntingYard) {
  std::mt19937 rng(13);
  for (int k = 0; k < 2000; ++k) {
    auto text = random_arithmetic(rng, 4);
    double want = oracle::shunting_yard(text);
    auto parsed = parse_data_expr(text);
    bool zero_divisor = false;
    std::function<void(const DataExpr&)> scan = [&](const DataExpr& e) {
      for (const auto& o : e.operands) scan(o);
      if (e.kind == K::divide && std::get<double>(evaluate(e.operands[1], {})) == 0) zero_divisor = true;
    };
    try {
      scan(parsed);
    } catch (const Error&) {
      zero_divisor = true;  // nested division by zero
    }
    if (zero_divisor) {
      EXPECT_THROW(evaluate(parsed, {}), Error) << text;
      continue;
    }
    EXPECT_DOUBLE_EQ(std::get<double>(evaluate(parsed, {})), want) << text;
  }
}

TEST(DataExpr, EvaluateExamples) {
  Bindings b{{"price", 200.0}, {"tax", 50.0}, {"city", std::string("Oslo")}};
  EXPECT_EQ(render_value(evaluate(parse_data_expr("<price> + <tax>"), b)), "250");
  EXPECT_EQ(render_value(evaluate(parse_data_expr("<city> concat \"-\" concat <price> / 8"), b)), "Oslo-25");
  EXPECT_EQ(render_value(evaluate(parse_data_expr("-<tax> * 2"), b)), "-100");
  EXPECT_THROW(evaluate(parse_data_expr("<price> / (<tax> - 50)"), b), Error);
  EXPECT_THROW(evaluate(parse_data_expr("<city> + 1"), b), Error);
  try {
    evaluate(parse_data_expr("<missing>"), b);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::evaluation);
    EXPECT_EQ(e.detail(), "missing");
  }
}

TEST(DataExpr, FormatNumber) {
  EXPECT_EQ(format_number(250), "250");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(2.5), "2.5");
  EXPECT_EQ(format_number(1e20), "1e+20");
  EXPECT_THROW(format_number(std::nan("")), Error);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    double v = u(rng);
    EXPECT_EQ(std::stod(format_number(v)), v);
  }
}

TEST(MatchingPlan, JsonRoundTripAndSemantics) {
  auto plan = weather_plan();
  EXPECT_EQ(plan.operations.size(), 2u);
  EXPECT_EQ(plan.inputs.size(), 4u);
  EXPECT_EQ(plan.outputs.size(), 6u);
  auto json = to_json(plan);
  EXPECT_EQ(json["operations"][0]["semantics"], "single");
  EXPECT_EQ(plan_from_json(json), plan);

  MatchingPlan p;
  p.set(OperationMatch{"X", parse_operation_expr("a AND b")});
  p.set(OperationMatch{"Y", parse_operation_expr("a OR b")});
  auto j = to_json(p);
  EXPECT_EQ(j["operations"][0]["semantics"], "invoke all, merge outputs");
  EXPECT_EQ(j["operations"][1]["semantics"], "preference order fallback");
  EXPECT_THROW(plan_from_json(nlohmann::json::array()), Error);
  EXPECT_THROW(plan_from_json({{"operations", {{{"expression", "a"}}}}}), Error);
}

TEST(MatchingPlan, FragmentsUpsertDeleteAndAreIdempotent) {
  auto plan = weather_plan();
  nlohmann::json frag = {
      {"operations", {{{"substituted", "GetWeather"}, {"expression", "CurrentWeather OR WeatherForecast"}}}},
      {"outputs", {{{"substituted", "GetWeather"}, {"leaf", "Get Weather Response Humidity"}, {"expression", nullptr}}}}};
  apply_plan_fragment(plan, frag);
  auto once = plan;
  apply_plan_fragment(plan, frag);
  EXPECT_EQ(plan, once);
  EXPECT_EQ(plan.operations.size(), 2u);
  EXPECT_EQ(plan.find_operation("GetWeather")->expr.kind, OperationExpr::Kind::any_of);
  EXPECT_EQ(plan.outputs.size(), 5u);

  apply_plan_fragment(plan, {{"operations", {{{"substituted", "GetForecast"}, {"expression", "  "}}}}});
  EXPECT_EQ(plan.operations.size(), 1u);
}

TEST(MatchingPlan, NormalizeIsOrderIndependent) {
  auto plan = weather_plan();
  auto shuffled = plan;
  std::mt19937 rng(2);
  std::shuffle(shuffled.inputs.begin(), shuffled.inputs.end(), rng);
  std::shuffle(shuffled.outputs.begin(), shuffled.outputs.end(), rng);
  std::reverse(shuffled.operations.begin(), shuffled.operations.end());
  plan.normalize();
  shuffled.normalize();
  EXPECT_EQ(plan, shuffled);
}

TEST(Validation, WeatherPlanIsClean) {
  auto report = validate_plan(weather_plan(), load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"));
  for (const auto& i : report.issues) ADD_FAILURE() << to_string(i.kind) << ": " << i.message;
}

TEST(Validation, UncoveredInput) {
  auto plan = weather_plan();
  apply_plan_fragment(plan, {{"inputs",
                              {{{"substituted", "GetWeather"},
                                {"substituent", "CurrentWeather"},
                                {"leaf", "current weather country"},
                                {"expression", ""}}}}});
  auto report = validate_plan(plan, load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"));
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].kind, ValidationIssue::Kind::uncovered_input);
  EXPECT_EQ(report.issues[0].operation, "GetWeather");
  EXPECT_NE(report.issues[0].message.find("<current weather country>"), std::string::npos);
  // Optional leaves (units) never need coverage.
  EXPECT_EQ(report.issues[0].message.find("units"), std::string::npos);
}

TEST(Validation, TypeClashOnTextArithmetic) {
  auto plan = weather_plan();
  apply_plan_fragment(plan, {{"inputs",
                              {{{"substituted", "GetWeather"},
                                {"substituent", "CurrentWeather"},
                                {"leaf", "current weather city"},
                                {"expression", "<get weather city name> + 1"}}}}});
  auto report = validate_plan(plan, load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"));
  EXPECT_TRUE(has_issue(report, ValidationIssue::Kind::type_clash));
  auto back = report_from_json(to_json(report));
  ASSERT_EQ(back.issues.size(), report.issues.size());
  EXPECT_EQ(back.issues[0].message, report.issues[0].message);
}

TEST(Validation, UnknownNamesAndForeignOperations) {
  auto weather = load("wsdl/weather.wsdl");
  auto meteo = load("wsdl/meteo.wsdl");
  MatchingPlan plan;
  plan.set(OperationMatch{"GetWeather", parse_operation_expr("NoSuchOp")});
  plan.set(OperationMatch{"Missing", parse_operation_expr("CurrentWeather")});
  plan.set(InputMapping{"GetForecast", "WeatherForecast", "weather forecast city",
                        parse_data_expr("<get forecast city name>")});
  auto report = validate_plan(plan, weather, meteo);
  EXPECT_TRUE(has_issue(report, ValidationIssue::Kind::unresolved_reference));
  EXPECT_TRUE(has_issue(report, ValidationIssue::Kind::foreign_operation));
  EXPECT_THROW(report_from_json({{{"kind", "bogus"}, {"message", "x"}}}), Error);
}

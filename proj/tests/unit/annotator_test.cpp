#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>

#include "oracles.hpp"
#include "wssubst/annotator.hpp"
#include "wssubst/error.hpp"
#include "wssubst/xml.hpp"

using namespace wssubst;

namespace {

ServiceDescription load(const char* rel) { return load_wsdl(oracle::data(rel)); }

MatchingPlan weather_plan() {
  std::ifstream in(oracle::data("plans/weather-plan.json"));
  return plan_from_json(nlohmann::json::parse(in));
}

// Namespace-qualified attribute lookup written against the raw DOM.
std::optional<std::string> qualified(const xml::Node& node, std::string_view ns, std::string_view local) {
  for (const auto& a : node.attributes) {
    auto colon = a.name.find(':');
    if (colon == std::string::npos) continue;
    auto prefix = a.name.substr(0, colon);
    if (prefix == "xmlns") continue;
    auto it = node.scope().find(prefix);
    if (it != node.scope().end() && it->second == ns && a.name.substr(colon + 1) == local) return a.value;
  }
  return std::nullopt;
}

const xml::Node* port_operation(const xml::Node& root, std::string_view name) {
  for (const auto* pt : root.elements(kWsdlNamespace, "portType"))
    for (const auto* op : pt->elements(kWsdlNamespace, "operation"))
      if (op->attribute_or("name") == name) return op;
  return nullptr;
}

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::vector<std::string> op_refs(const std::string& doc, std::string_view op) {
  auto parsed = xml::parse(doc);
  const auto* node = port_operation(parsed.root, op);
  if (!node) return {"<missing operation>"};
  auto v = qualified(*node, kSawsdlNamespace, "modelReference");
  return v ? split(*v) : std::vector<std::string>{};
}

MatchingPlan single_equality_plan() {
  MatchingPlan plan;
  apply_plan_fragment(plan, {{"operations", {{{"substituted", "GetWeather"}, {"expression", "CurrentWeather"}}}},
                             {"inputs",
                              {{{"substituted", "GetWeather"},
                                {"substituent", "CurrentWeather"},
                                {"leaf", "current weather city"},
                                {"expression", "<get weather city name>"}},
                               {{"substituted", "GetWeather"},
                                {"substituent", "CurrentWeather"},
                                {"leaf", "current weather country"},
                                {"expression", "<get weather country name>"}}}}});
  return plan;
}

}  // namespace

TEST(Annotator, IriShapes) {
  EXPECT_EQ(operation_iri("http://example.com/meteo", "CurrentWeather"), "http://example.com/meteo#CurrentWeather");
  EXPECT_EQ(leaf_iri("urn:x", "Op", "input", "city name"), "urn:x#Op/input/city_name");
}

TEST(Annotator, WeatherPlanRoundTrips) {
  auto weather = load("wsdl/weather.wsdl");
  auto meteo = load("wsdl/meteo.wsdl");
  auto plan = weather_plan();
  auto pair = annotate_pair(weather, meteo, plan);
  EXPECT_FALSE(pair.manifest.empty());
  EXPECT_TRUE(dangling_model_references(pair).empty());

  auto extracted = extract_plan(pair);
  EXPECT_TRUE(extracted.warnings.empty());
  plan.normalize();
  EXPECT_EQ(extracted.plan, plan);
  EXPECT_EQ(to_json(extracted.plan), to_json(plan));
}

TEST(Annotator, AnnotatedDocumentsReparseToSameModel) {
  auto weather = load("wsdl/weather.wsdl");
  auto meteo = load("wsdl/meteo.wsdl");
  auto pair = annotate_pair(weather, meteo, weather_plan());
  EXPECT_TRUE(same_model(weather, parse_wsdl(pair.substituted_doc, pair.substituted_uri)));
  EXPECT_TRUE(same_model(meteo, parse_wsdl(pair.substituent_doc, pair.substituent_uri)));
}

TEST(Annotator, SingleEqualityPlanWritesOneOperationIriEachWay) {
  auto pair = annotate_pair(load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"), single_equality_plan());
  EXPECT_EQ(op_refs(pair.substituted_doc, "GetWeather"),
            (std::vector<std::string>{"http://example.com/meteo#CurrentWeather"}));
  EXPECT_EQ(op_refs(pair.substituent_doc, "CurrentWeather"),
            (std::vector<std::string>{"http://example.org/weather#GetWeather"}));
  EXPECT_TRUE(op_refs(pair.substituted_doc, "GetForecast").empty());
  EXPECT_TRUE(op_refs(pair.substituent_doc, "WeatherForecast").empty());
}

TEST(Annotator, ConjunctionWritesBothIris) {
  auto plan = single_equality_plan();
  apply_plan_fragment(plan, {{"operations", {{{"substituted", "GetWeather"}, {"expression", "CurrentWeather AND WeatherForecast"}}}},
                             {"inputs",
                              {{{"substituted", "GetWeather"},
                                {"substituent", "WeatherForecast"},
                                {"leaf", "weather forecast city"},
                                {"expression", "<get weather city name>"}},
                               {{"substituted", "GetWeather"},
                                {"substituent", "WeatherForecast"},
                                {"leaf", "weather forecast day count"},
                                {"expression", "1"}}}}});
  auto pair = annotate_pair(load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"), plan);
  EXPECT_EQ(op_refs(pair.substituted_doc, "GetWeather"),
            (std::vector<std::string>{"http://example.com/meteo#CurrentWeather",
                                      "http://example.com/meteo#WeatherForecast"}));
  auto doc = xml::parse(pair.substituted_doc);
  auto expr = qualified(*port_operation(doc.root, "GetWeather"), kSubstNamespace, "opExpr");
  ASSERT_TRUE(expr.has_value());
  EXPECT_EQ(*expr, "CurrentWeather AND WeatherForecast");
  plan.normalize();
  EXPECT_EQ(extract_plan(pair).plan, plan);
}

TEST(Annotator, UsesExactSawsdlNamespace) {
  auto pair = annotate_pair(load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"), single_equality_plan());
  auto doc = xml::parse(pair.substituted_doc);
  bool found = false;
  for (const auto& [prefix, uri] : doc.root.scope()) found = found || uri == "http://www.w3.org/ns/sawsdl";
  EXPECT_TRUE(found);
}

TEST(Annotator, RefusesEmptyOrInvalidPlans) {
  auto weather = load("wsdl/weather.wsdl");
  auto meteo = load("wsdl/meteo.wsdl");
  try {
    annotate_pair(weather, meteo, MatchingPlan{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::validation);
    EXPECT_STREQ(e.what(), "nothing to annotate");
  }
  auto plan = single_equality_plan();
  plan.inputs.pop_back();
  EXPECT_THROW(annotate_pair(weather, meteo, plan), Error);
}

TEST(Annotator, MissingExpressionAttributeDegradesWithWarning) {
  auto pair = annotate_pair(load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"), single_equality_plan());
  pair.substituted_doc = std::regex_replace(pair.substituted_doc, std::regex(R"( [A-Za-z0-9_]+:opExpr="[^"]*")"), "");
  auto extracted = extract_plan(pair);
  ASSERT_EQ(extracted.warnings.size(), 1u);
  ASSERT_NE(extracted.plan.find_operation("GetWeather"), nullptr);
  EXPECT_EQ(extracted.plan.find_operation("GetWeather")->expr, OperationExpr::ref("CurrentWeather"));
}

TEST(Annotator, DanglingReferenceIsAnError) {
  auto pair = annotate_pair(load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"), single_equality_plan());
  pair.substituted_doc =
      std::regex_replace(pair.substituted_doc, std::regex(R"(meteo#CurrentWeather(?=["\s]))"), "meteo#Vanished");
  auto dangling = dangling_model_references(pair);
  ASSERT_FALSE(dangling.empty());
  EXPECT_EQ(dangling.front(), "http://example.com/meteo#Vanished");
  try {
    extract_plan(pair);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dangling_reference);
  }
}

TEST(Annotator, ManifestListsBothDocuments) {
  auto pair = annotate_pair(load("wsdl/weather.wsdl"), load("wsdl/meteo.wsdl"), single_equality_plan());
  bool substituted = false, substituent = false;
  for (const auto& r : pair.manifest) {
    substituted = substituted || r.document == "substituted";
    substituent = substituent || r.document == "substituent";
  }
  EXPECT_TRUE(substituted);
  EXPECT_TRUE(substituent);
  EXPECT_EQ(to_json(pair.manifest).size(), pair.manifest.size());
}

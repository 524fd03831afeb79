#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wssubst/mapping_language.hpp"
#include "wssubst/wsdl_model.hpp"

namespace wssubst {

inline constexpr std::string_view kSawsdlNamespace = "http://www.w3.org/ns/sawsdl";
/// Extension attributes carrying the plan expressions (opExpr, inMap, outMap).
inline constexpr std::string_view kSubstNamespace = "urn:x-wssubst:matching:1";

/// `<targetNamespace>#<operation>`
std::string operation_iri(std::string_view target_namespace, std::string_view operation);
/// `<targetNamespace>#<operation>/<input|output>/<leaf_words>`
std::string leaf_iri(std::string_view target_namespace, std::string_view operation,
                     std::string_view direction, std::string_view leaf_path);

struct AnnotationRecord {
  std::string document;  // "substituted" | "substituent"
  std::string target;    // e.g. "operation GetWeather", "element get weather city name"
  std::vector<std::string> model_references;
  std::map<std::string, std::string> attributes;  // extension attribute local name -> value
};

struct AnnotatedWsdlPair {
  std::string substituted_doc;
  std::string substituent_doc;
  std::string substituted_uri;  // base URIs for import resolution on reparse
  std::string substituent_uri;
  std::vector<AnnotationRecord> manifest;
};

nlohmann::json to_json(const std::vector<AnnotationRecord>& manifest);

/// Writes the plan into both documents as sawsdl:modelReference IRIs plus
/// extension attributes. Requires a plan that validates cleanly.
AnnotatedWsdlPair annotate_pair(const ServiceDescription& substituted,
                                const ServiceDescription& substituent, const MatchingPlan& plan);

struct ExtractedPlan {
  MatchingPlan plan;  // normalized
  std::vector<std::string> warnings;
};

/// Reads a plan back from an annotated pair. Operations that carry peer IRIs
/// but no expression attribute degrade to a bare match (AND over the IRIs)
/// with a warning. Throws Error{dangling_reference} for IRIs that do not
/// resolve in the peer document.
ExtractedPlan extract_plan(const AnnotatedWsdlPair& pair,
                           const ResourceLoader& loader = default_loader());

/// Model references in either document that point into the peer namespace
/// but name no peer operation or leaf.
std::vector<std::string> dangling_model_references(const AnnotatedWsdlPair& pair,
                                                   const ResourceLoader& loader = default_loader());

}  // namespace wssubst

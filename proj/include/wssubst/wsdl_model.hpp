#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wssubst/resource.hpp"
#include "wssubst/text_similarity.hpp"

namespace wssubst {

inline constexpr std::string_view kWsdlNamespace = "http://schemas.xmlsoap.org/wsdl/";
inline constexpr std::string_view kWsdl20Namespace = "http://www.w3.org/ns/wsdl";
inline constexpr std::string_view kXsdNamespace = "http://www.w3.org/2001/XMLSchema";

/// Expansion depth at which recursive schema types are cut off.
inline constexpr std::size_t kSchemaDepthCap = 8;
/// Maximum nesting of wsdl:import / xsd:import / xsd:include chains.
inline constexpr std::size_t kImportDepthLimit = 16;

struct QName {
  std::string ns;
  std::string local;

  bool empty() const { return local.empty(); }
  std::string str() const { return ns.empty() ? local : "{" + ns + "}" + local; }
  friend bool operator==(const QName&, const QName&) = default;
  friend auto operator<=>(const QName&, const QName&) = default;
};

/// True for the XML Schema built-in numeric types.
bool is_numeric_type(const QName& type);

/// Where a schema declaration lives: the document URI plus element-child
/// indices from that document's root.
struct NodeLocator {
  std::string document;
  std::vector<std::size_t> path;
  friend bool operator==(const NodeLocator&, const NodeLocator&) = default;
};

struct SchemaElementTree {
  enum class Kind { complex, simple };

  std::string name;
  Kind kind = Kind::simple;
  std::vector<SchemaElementTree> children;
  QName type;  // built-in base type for simple nodes, declared type otherwise
  bool optional = false;
  bool attribute = false;
  bool truncated = false;  // recursion cap reached below this node
  std::optional<NodeLocator> declaration;
};

/// One root-to-leaf path of a flattened element.
struct Leaf {
  Sentence sentence;
  std::vector<std::string> element_path;  // raw names, root first
  QName type;
  bool optional = false;
  std::optional<NodeLocator> declaration;

  std::string path_text() const { return sentence.text(); }
};

struct DataSet {
  std::vector<Leaf> leaves;  // sentences pairwise distinct, first occurrence kept
  std::string source_element;
  std::vector<std::string> warnings;

  bool empty() const { return leaves.empty(); }
  std::size_t size() const { return leaves.size(); }
  std::vector<Sentence> sentences() const;
  /// Looks a leaf up by its space-joined sentence text.
  const Leaf* find(std::string_view path_text) const;
  /// Adds a leaf unless an equal sentence is present.
  bool add(Leaf leaf);
};

struct Operation {
  std::string name;
  Sentence name_sentence;
  DataSet input;
  DataSet output;
  std::string wsdl_id;
  std::string port_type;
  std::vector<std::string> faults;  // message names; not part of the data sets
};

struct ServiceDescription {
  std::string name;
  std::vector<Operation> operations;
  std::string source_uri;
  std::string raw_document;
  std::string target_namespace;
  std::vector<std::string> warnings;

  const Operation* find_operation(std::string_view wsdl_id) const;
};

/// Model equality: names, namespace, operations and their leaf sentences,
/// types and optionality. Source location, raw bytes and declaration
/// locators are ignored.
bool same_model(const ServiceDescription& a, const ServiceDescription& b);
bool same_data_set(const DataSet& a, const DataSet& b);

/// One sentence per leaf; root included, root-first, tokenized.
DataSet flatten_element(const SchemaElementTree& tree);

/// Parses a WSDL 1.1 document. Imports are resolved relative to `base_uri`
/// through `loader`.
ServiceDescription parse_wsdl(std::string_view document, const std::string& base_uri,
                              const ResourceLoader& loader = default_loader());

/// Fetches `uri` and parses it.
ServiceDescription load_wsdl(const std::string& uri,
                             const ResourceLoader& loader = default_loader());

}  // namespace wssubst

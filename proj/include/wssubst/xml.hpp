#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wssubst::xml {

using NamespaceMap = std::map<std::string, std::string>;  // prefix -> URI, "" = default

struct Attribute {
  std::string name;  // as written, possibly prefixed
  std::string value;
};

/// Minimal mutable DOM node. Prefixed names are kept verbatim and written back
/// as-is; namespace URIs are resolved once after parsing and cached per element.
class Node {
 public:
  enum class Kind { element, text, comment, processing_instruction };

  static Node element(std::string name);
  static Node text(std::string value);

  Kind kind = Kind::element;
  std::string name;   // element qname / PI target
  std::string value;  // text, comment, PI data
  std::vector<Attribute> attributes;
  std::vector<Node> children;

  bool is_element() const { return kind == Kind::element; }

  std::string_view local_name() const;
  std::string_view prefix() const;
  const std::string& namespace_uri() const { return ns_; }
  const NamespaceMap& scope() const;

  bool is(std::string_view ns, std::string_view local) const {
    return is_element() && ns_ == ns && local_name() == local;
  }

  const std::string* attribute(std::string_view name) const;
  std::string attribute_or(std::string_view name, std::string fallback = {}) const;
  void set_attribute(std::string_view name, std::string value);
  bool remove_attribute(std::string_view name);

  /// Element children only, in document order.
  std::vector<const Node*> elements() const;
  std::vector<Node*> elements();
  std::vector<const Node*> elements(std::string_view ns, std::string_view local) const;
  const Node* first(std::string_view ns, std::string_view local) const;

  /// Concatenated descendant text.
  std::string text_content() const;

  /// Resolves a QName-valued attribute ("tns:Foo") against this element's
  /// in-scope bindings. Unprefixed names take the default namespace.
  std::pair<std::string, std::string> resolve_qname(std::string_view qname) const;

  /// Recomputes namespace URIs and scopes for this subtree.
  void resolve_namespaces(const std::shared_ptr<const NamespaceMap>& parent_scope = nullptr);

 private:
  std::string ns_;
  std::shared_ptr<const NamespaceMap> scope_;
};

struct Document {
  Node root;
};

/// Parses a well-formed XML document. Throws Error{parse} with line/column.
Document parse(std::string_view bytes);

/// Serializes as UTF-8 with an XML declaration.
std::string serialize(const Document& doc);

std::string escape(std::string_view raw, bool attribute);

/// Follows element-child indices from the root. Returns nullptr when the path
/// no longer exists.
const Node* node_at(const Node& root, const std::vector<std::size_t>& path);
Node* node_at(Node& root, const std::vector<std::size_t>& path);

}  // namespace wssubst::xml

#include "wssubst/wsdl_model.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <map>
#include <set>
#include <unordered_map>

#include "wssubst/error.hpp"
#include "wssubst/xml.hpp"

namespace wssubst {

namespace {

using xml::Node;

struct LoadedDocument {
  std::string uri;
  xml::Document doc;
  std::unordered_map<const Node*, std::vector<std::size_t>> paths;
};

void index_paths(const Node& node, std::vector<std::size_t>& prefix,
                 std::unordered_map<const Node*, std::vector<std::size_t>>& out) {
  out.emplace(&node, prefix);
  std::size_t k = 0;
  for (const auto& c : node.children) {
    if (!c.is_element()) continue;
    prefix.push_back(k++);
    index_paths(c, prefix, out);
    prefix.pop_back();
  }
}

struct Located {
  const Node* node = nullptr;
  const LoadedDocument* doc = nullptr;
  std::string schema_ns;  // targetNamespace of the declaring schema
};

bool is_xsd(const Node& n, std::string_view local) { return n.is(kXsdNamespace, local); }

class WsdlReader {
 public:
  explicit WsdlReader(const ResourceLoader& loader) : loader_(loader) {}

  ServiceDescription read(std::string_view bytes, const std::string& base_uri);

 private:
  const LoadedDocument& add_document(std::string uri, xml::Document doc) {
    auto& d = docs_.emplace_back(LoadedDocument{std::move(uri), std::move(doc), {}});
    std::vector<std::size_t> prefix;
    index_paths(d.doc.root, prefix, d.paths);
    return d;
  }

  xml::Document fetch_xml(const std::string& uri) {
    std::string bytes;
    try {
      bytes = loader_.fetch(uri);
    } catch (const Error& e) {
      throw Error(ErrorCode::unsupported_import, "cannot resolve import " + uri + ": " + e.what(),
                  uri);
    }
    return xml::parse(bytes);
  }

  void read_definitions(const LoadedDocument& d, std::size_t depth);
  void read_schema(const Node& schema, const LoadedDocument& d, std::string ns, std::size_t depth);

  Operation build_operation(const Node& op, const std::string& port_type);
  DataSet build_message_data(const QName& message);

  SchemaElementTree build_element(const Located& decl, std::size_t depth);
  void build_content(const Located& type_or_group, std::size_t depth, SchemaElementTree& into);
  void build_particles(const Located& container, std::size_t depth, SchemaElementTree& into);
  void build_particle(const Located& particle, std::size_t depth, SchemaElementTree& into);
  void add_attribute(const Located& attr, SchemaElementTree& into);
  QName builtin_base(const QName& type, std::size_t guard = 0);

  Located lookup(const std::map<QName, Located>& table, const QName& name, std::string_view what) {
    auto it = table.find(name);
    if (it == table.end()) {
      throw Error(ErrorCode::unresolved_reference,
                  "unresolved " + std::string(what) + " reference " + name.str(), name.str());
    }
    return it->second;
  }

  QName qname_attr(const Node& n, std::string_view attr) {
    const auto* v = n.attribute(attr);
    if (!v) return {};
    auto [ns, local] = n.resolve_qname(*v);
    return {ns, local};
  }

  std::optional<NodeLocator> locator(const Located& l) const {
    auto it = l.doc->paths.find(l.node);
    if (it == l.doc->paths.end()) return std::nullopt;
    return NodeLocator{l.doc->uri, it->second};
  }

  const ResourceLoader& loader_;
  std::deque<LoadedDocument> docs_;
  std::set<std::string> visited_;
  std::map<QName, Located> messages_, elements_, complex_types_, simple_types_, groups_,
      attribute_groups_, attributes_;
  std::vector<std::pair<const Node*, const LoadedDocument*>> port_types_;
  std::vector<std::string> warnings_;
};

void WsdlReader::read_definitions(const LoadedDocument& d, std::size_t depth) {
  const Node& root = d.doc.root;
  std::string tns = root.attribute_or("targetNamespace");
  for (const auto& child : root.children) {
    if (!child.is_element()) continue;
    if (child.is(kWsdlNamespace, "import")) {
      const auto* loc = child.attribute("location");
      if (!loc) continue;
      auto uri = resolve_uri(d.uri, *loc);
      if (depth + 1 > kImportDepthLimit) {
        throw Error(ErrorCode::unsupported_import, "import depth limit exceeded at " + uri, uri);
      }
      if (!visited_.insert(uri).second) continue;
      auto doc = fetch_xml(uri);
      if (doc.root.is(kWsdlNamespace, "definitions")) {
        read_definitions(add_document(uri, std::move(doc)), depth + 1);
      } else if (doc.root.is(kXsdNamespace, "schema")) {
        const auto& sd = add_document(uri, std::move(doc));
        read_schema(sd.doc.root, sd, sd.doc.root.attribute_or("targetNamespace"), depth + 1);
      } else {
        throw Error(ErrorCode::unsupported_import, "unsupported import " + uri, uri);
      }
    } else if (child.is(kWsdlNamespace, "types")) {
      for (const auto* s : child.elements(kXsdNamespace, "schema")) {
        read_schema(*s, d, s->attribute_or("targetNamespace"), depth);
      }
    } else if (child.is(kWsdlNamespace, "message")) {
      messages_[{tns, child.attribute_or("name")}] = Located{&child, &d, tns};
    } else if (child.is(kWsdlNamespace, "portType")) {
      port_types_.emplace_back(&child, &d);
    }
  }
}

void WsdlReader::read_schema(const Node& schema, const LoadedDocument& d, std::string ns,
                             std::size_t depth) {
  for (const auto& child : schema.children) {
    if (!child.is_element()) continue;
    const auto name = child.attribute_or("name");
    if (is_xsd(child, "import") || is_xsd(child, "include") || is_xsd(child, "redefine")) {
      const auto* loc = child.attribute("schemaLocation");
      if (!loc) continue;
      auto uri = resolve_uri(d.uri, *loc);
      if (depth + 1 > kImportDepthLimit) {
        throw Error(ErrorCode::unsupported_import, "import depth limit exceeded at " + uri, uri);
      }
      if (!visited_.insert(uri).second) continue;
      auto doc = fetch_xml(uri);
      if (!doc.root.is(kXsdNamespace, "schema")) {
        throw Error(ErrorCode::unsupported_import, "unsupported import " + uri + ": not a schema",
                    uri);
      }
      const auto& sd = add_document(uri, std::move(doc));
      std::string child_ns = sd.doc.root.attribute_or("targetNamespace");
      // Chameleon include: a namespace-less schema adopts the includer's.
      if (child_ns.empty() && !is_xsd(child, "import")) child_ns = ns;
      read_schema(sd.doc.root, sd, child_ns, depth + 1);
    } else if (is_xsd(child, "element")) {
      elements_[{ns, name}] = Located{&child, &d, ns};
    } else if (is_xsd(child, "complexType")) {
      complex_types_[{ns, name}] = Located{&child, &d, ns};
    } else if (is_xsd(child, "simpleType")) {
      simple_types_[{ns, name}] = Located{&child, &d, ns};
    } else if (is_xsd(child, "group")) {
      groups_[{ns, name}] = Located{&child, &d, ns};
    } else if (is_xsd(child, "attributeGroup")) {
      attribute_groups_[{ns, name}] = Located{&child, &d, ns};
    } else if (is_xsd(child, "attribute")) {
      attributes_[{ns, name}] = Located{&child, &d, ns};
    }
  }
}

QName WsdlReader::builtin_base(const QName& type, std::size_t guard) {
  if (type.ns == kXsdNamespace || guard > kSchemaDepthCap * 4) return type;
  auto it = simple_types_.find(type);
  if (it == simple_types_.end()) return type;
  const Node& st = *it->second.node;
  if (const auto* r = st.first(kXsdNamespace, "restriction")) {
    if (r->attribute("base")) return builtin_base(qname_attr(*r, "base"), guard + 1);
  }
  if (st.first(kXsdNamespace, "list") || st.first(kXsdNamespace, "union")) {
    return {std::string(kXsdNamespace), "string"};
  }
  return type;
}

void WsdlReader::add_attribute(const Located& attr, SchemaElementTree& into) {
  Located decl = attr;
  bool optional = attr.node->attribute_or("use") != "required";
  if (attr.node->attribute("ref")) {
    decl = lookup(attributes_, qname_attr(*attr.node, "ref"), "attribute");
  }
  SchemaElementTree leaf;
  leaf.name = decl.node->attribute_or("name");
  leaf.kind = SchemaElementTree::Kind::simple;
  leaf.attribute = true;
  leaf.optional = optional;
  leaf.declaration = locator(decl);
  if (decl.node->attribute("type")) {
    leaf.type = builtin_base(qname_attr(*decl.node, "type"));
  } else if (const auto* st = decl.node->first(kXsdNamespace, "simpleType")) {
    const auto* r = st->first(kXsdNamespace, "restriction");
    leaf.type = r && r->attribute("base") ? builtin_base(qname_attr(*r, "base"))
                                          : QName{std::string(kXsdNamespace), "string"};
  } else {
    leaf.type = {std::string(kXsdNamespace), "anySimpleType"};
  }
  into.children.push_back(std::move(leaf));
}

void WsdlReader::build_particle(const Located& particle, std::size_t depth,
                                SchemaElementTree& into) {
  const Node& c = *particle.node;
  if (is_xsd(c, "element")) {
    into.children.push_back(build_element(particle, depth + 1));
  } else if (is_xsd(c, "sequence") || is_xsd(c, "choice") || is_xsd(c, "all")) {
    build_particles(particle, depth, into);
  } else if (is_xsd(c, "group") && c.attribute("ref")) {
    build_particles(lookup(groups_, qname_attr(c, "ref"), "group"), depth, into);
  } else if (is_xsd(c, "attribute")) {
    add_attribute(particle, into);
  } else if (is_xsd(c, "attributeGroup") && c.attribute("ref")) {
    build_particles(lookup(attribute_groups_, qname_attr(c, "ref"), "attributeGroup"), depth,
                    into);
  }
}

void WsdlReader::build_particles(const Located& container, std::size_t depth,
                                 SchemaElementTree& into) {
  for (const auto& c : container.node->children) {
    if (c.is_element()) build_particle({&c, container.doc, container.schema_ns}, depth, into);
  }
}

void WsdlReader::build_content(const Located& type, std::size_t depth, SchemaElementTree& into) {
  for (const auto& c : type.node->children) {
    if (!c.is_element()) continue;
    if (!is_xsd(c, "complexContent") && !is_xsd(c, "simpleContent")) {
      build_particle({&c, type.doc, type.schema_ns}, depth, into);
      continue;
    }
    for (const auto& d : c.children) {
      if (!d.is_element()) continue;
      bool extension = is_xsd(d, "extension");
      if (!extension && !is_xsd(d, "restriction")) continue;
      auto base = qname_attr(d, "base");
      if (extension && base.ns != kXsdNamespace && !base.empty()) {
        if (auto it = complex_types_.find(base); it != complex_types_.end()) {
          build_content(it->second, depth, into);
        }
      }
      if (is_xsd(c, "simpleContent") && into.type.empty()) into.type = builtin_base(base);
      build_particles({&d, type.doc, type.schema_ns}, depth, into);
    }
  }
}

SchemaElementTree WsdlReader::build_element(const Located& site, std::size_t depth) {
  Located decl = site;
  if (site.node->attribute("ref")) {
    decl = lookup(elements_, qname_attr(*site.node, "ref"), "element");
  }
  SchemaElementTree tree;
  tree.name = decl.node->attribute_or("name");
  tree.optional = site.node->attribute_or("minOccurs") == "0";
  tree.declaration = locator(decl);

  const Node* inline_complex = decl.node->first(kXsdNamespace, "complexType");
  const Node* inline_simple = decl.node->first(kXsdNamespace, "simpleType");
  std::optional<Located> complex;
  if (decl.node->attribute("type")) {
    auto type = qname_attr(*decl.node, "type");
    if (type.ns == kXsdNamespace) {
      tree.type = type;
    } else if (auto it = complex_types_.find(type); it != complex_types_.end()) {
      tree.type = type;
      complex = it->second;
    } else if (simple_types_.count(type)) {
      tree.type = builtin_base(type);
    } else {
      throw Error(ErrorCode::unresolved_reference, "unresolved type reference " + type.str(),
                  type.str());
    }
  } else if (inline_complex) {
    complex = Located{inline_complex, decl.doc, decl.schema_ns};
  } else if (inline_simple) {
    const auto* r = inline_simple->first(kXsdNamespace, "restriction");
    tree.type = r && r->attribute("base") ? builtin_base(qname_attr(*r, "base"))
                                          : QName{std::string(kXsdNamespace), "string"};
  } else {
    tree.type = {std::string(kXsdNamespace), "anyType"};
  }

  if (complex) {
    tree.kind = SchemaElementTree::Kind::complex;
    if (depth >= kSchemaDepthCap) {
      tree.truncated = true;
      return tree;
    }
    SchemaElementTree content;
    build_content(*complex, depth, content);
    tree.children = std::move(content.children);
    if (tree.children.empty()) {
      // simpleContent without attributes, or an empty type: a data-carrying leaf.
      tree.kind = SchemaElementTree::Kind::simple;
      tree.type = content.type.empty() ? tree.type : content.type;
    }
  }
  return tree;
}

DataSet WsdlReader::build_message_data(const QName& message) {
  DataSet out;
  if (message.empty()) return out;
  auto msg = lookup(messages_, message, "message");
  auto parts = msg.node->elements(kWsdlNamespace, "part");
  out.source_element = message.local;
  for (const auto* part : parts) {
    SchemaElementTree tree;
    if (part->attribute("element")) {
      auto el = lookup(elements_, qname_attr(*part, "element"), "element");
      tree = build_element(el, 0);
      if (parts.size() == 1) out.source_element = tree.name;
    } else if (part->attribute("type")) {
      auto type = qname_attr(*part, "type");
      tree.name = part->attribute_or("name");
      if (auto it = complex_types_.find(type); it != complex_types_.end()) {
        tree.kind = SchemaElementTree::Kind::complex;
        tree.type = type;
        build_content(it->second, 0, tree);
        if (tree.children.empty()) tree.kind = SchemaElementTree::Kind::simple;
      } else if (type.ns == kXsdNamespace || simple_types_.count(type)) {
        tree.type = builtin_base(type);
      } else {
        throw Error(ErrorCode::unresolved_reference, "unresolved type reference " + type.str(),
                    type.str());
      }
    } else {
      continue;
    }
    auto flat = flatten_element(tree);
    for (auto& l : flat.leaves) out.add(std::move(l));
    for (auto& w : flat.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

Operation WsdlReader::build_operation(const Node& op, const std::string& port_type) {
  Operation o;
  o.name = op.attribute_or("name");
  o.name_sentence = tokenize(o.name);
  o.wsdl_id = o.name;
  o.port_type = port_type;
  if (const auto* in = op.first(kWsdlNamespace, "input")) {
    o.input = build_message_data(qname_attr(*in, "message"));
  }
  if (const auto* out = op.first(kWsdlNamespace, "output")) {
    o.output = build_message_data(qname_attr(*out, "message"));
  }
  for (const auto* f : op.elements(kWsdlNamespace, "fault")) {
    o.faults.push_back(f->resolve_qname(f->attribute_or("message")).second);
  }
  return o;
}

ServiceDescription WsdlReader::read(std::string_view bytes, const std::string& base_uri) {
  auto doc = xml::parse(bytes);
  if (doc.root.is(kWsdl20Namespace, "description")) {
    throw Error(ErrorCode::not_wsdl, "not a WSDL document: WSDL 2.0 is not supported", base_uri);
  }
  if (!doc.root.is(kWsdlNamespace, "definitions")) {
    throw Error(ErrorCode::not_wsdl, "not a WSDL document", base_uri);
  }
  visited_.insert(base_uri);
  const auto& main = add_document(base_uri, std::move(doc));
  read_definitions(main, 0);

  ServiceDescription svc;
  svc.source_uri = base_uri;
  svc.raw_document = std::string(bytes);
  svc.target_namespace = main.doc.root.attribute_or("targetNamespace");

  std::set<std::string> seen;
  for (const auto& [pt, d] : port_types_) {
    auto pt_name = pt->attribute_or("name");
    for (const auto* op : pt->elements(kWsdlNamespace, "operation")) {
      auto name = op->attribute_or("name");
      if (name.empty()) continue;
      if (!seen.insert(name).second) {
        svc.warnings.push_back("duplicate operation '" + name + "' in portType " + pt_name + " ignored");
        continue;
      }
      auto operation = build_operation(*op, pt_name);
      for (const auto& w : operation.input.warnings) svc.warnings.push_back(name + ": " + w);
      for (const auto& w : operation.output.warnings) svc.warnings.push_back(name + ": " + w);
      svc.operations.push_back(std::move(operation));
    }
  }
  if (svc.operations.empty()) throw Error(ErrorCode::empty_input, "no operations found", base_uri);

  if (const auto* s = main.doc.root.first(kWsdlNamespace, "service"); s && s->attribute("name")) {
    svc.name = *s->attribute("name");
  } else if (const auto* n = main.doc.root.attribute("name")) {
    svc.name = *n;
  } else if (!port_types_.empty()) {
    svc.name = port_types_.front().first->attribute_or("name");
  }
  if (svc.name.empty()) svc.name = std::filesystem::path(to_local_path(base_uri)).stem().string();
  return svc;
}

}  // namespace

bool is_numeric_type(const QName& type) {
  static const std::set<std::string, std::less<>> numeric = {
      "byte",          "decimal",         "double",           "float",
      "int",           "integer",         "long",             "negativeInteger",
      "nonNegativeInteger", "nonPositiveInteger", "positiveInteger", "short",
      "unsignedByte",  "unsignedInt",     "unsignedLong",     "unsignedShort"};
  return type.ns == kXsdNamespace && numeric.count(type.local) > 0;
}

std::vector<Sentence> DataSet::sentences() const {
  std::vector<Sentence> out;
  out.reserve(leaves.size());
  for (const auto& l : leaves) out.push_back(l.sentence);
  return out;
}

const Leaf* DataSet::find(std::string_view path_text) const {
  for (const auto& l : leaves) {
    if (l.path_text() == path_text) return &l;
  }
  return nullptr;
}

bool DataSet::add(Leaf leaf) {
  if (leaf.sentence.empty()) return false;
  for (const auto& l : leaves) {
    if (l.sentence == leaf.sentence) return false;
  }
  leaves.push_back(std::move(leaf));
  return true;
}

DataSet flatten_element(const SchemaElementTree& tree) {
  DataSet out;
  out.source_element = tree.name;
  std::vector<const SchemaElementTree*> path;
  bool optional_above = false;

  auto visit = [&](auto&& self, const SchemaElementTree& node, bool optional) -> void {
    path.push_back(&node);
    optional = optional || node.optional;
    if (node.children.empty()) {
      Leaf leaf;
      std::string joined;
      for (const auto* p : path) {
        if (!joined.empty()) joined += ' ';
        joined += p->name;
        leaf.element_path.push_back(p->name);
      }
      leaf.sentence = tokenize(joined);
      leaf.type = node.type;
      leaf.optional = optional;
      leaf.declaration = node.declaration;
      if (node.truncated) {
        out.warnings.push_back("recursive expansion truncated at '" + joined + "'");
      }
      out.add(std::move(leaf));
    } else {
      for (const auto& c : node.children) self(self, c, optional);
    }
    path.pop_back();
  };
  visit(visit, tree, optional_above);
  return out;
}

const Operation* ServiceDescription::find_operation(std::string_view wsdl_id) const {
  for (const auto& op : operations) {
    if (op.wsdl_id == wsdl_id) return &op;
  }
  return nullptr;
}

bool same_data_set(const DataSet& a, const DataSet& b) {
  if (a.leaves.size() != b.leaves.size()) return false;
  for (std::size_t i = 0; i < a.leaves.size(); ++i) {
    const auto& x = a.leaves[i];
    const auto& y = b.leaves[i];
    if (!(x.sentence == y.sentence) || x.type != y.type || x.optional != y.optional ||
        x.element_path != y.element_path) {
      return false;
    }
  }
  return true;
}

bool same_model(const ServiceDescription& a, const ServiceDescription& b) {
  if (a.name != b.name || a.target_namespace != b.target_namespace ||
      a.operations.size() != b.operations.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.operations.size(); ++i) {
    const auto& x = a.operations[i];
    const auto& y = b.operations[i];
    if (x.name != y.name || x.wsdl_id != y.wsdl_id || x.port_type != y.port_type ||
        x.faults != y.faults || !same_data_set(x.input, y.input) ||
        !same_data_set(x.output, y.output)) {
      return false;
    }
  }
  return true;
}

ServiceDescription parse_wsdl(std::string_view document, const std::string& base_uri,
                              const ResourceLoader& loader) {
  WsdlReader reader(loader);
  return reader.read(document, base_uri);
}

ServiceDescription load_wsdl(const std::string& uri, const ResourceLoader& loader) {
  return parse_wsdl(loader.fetch(uri), uri, loader);
}

}  // namespace wssubst

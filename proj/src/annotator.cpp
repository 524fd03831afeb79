#include "wssubst/annotator.hpp"

#include <algorithm>
#include <sstream>

#include "wssubst/error.hpp"
#include "wssubst/xml.hpp"

namespace wssubst {

namespace {

using xml::Node;

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (const auto& s : items) {
    if (!out.empty()) out += sep;
    out += s;
  }
  return out;
}

std::vector<std::string> split_iris(std::string_view list) {
  std::vector<std::string> out;
  std::istringstream in{std::string(list)};
  std::string iri;
  while (in >> iri) out.push_back(iri);
  return out;
}

void add_unique(std::vector<std::string>& v, const std::string& s) {
  if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
}

std::string ensure_prefix(Node& root, std::string_view uri, std::string_view preferred) {
  for (const auto& [p, u] : root.scope()) {
    if (!p.empty() && u == uri) return p;
  }
  std::string prefix(preferred);
  for (int n = 1; root.scope().count(prefix); ++n) prefix = std::string(preferred) + std::to_string(n);
  root.set_attribute("xmlns:" + prefix, std::string(uri));
  root.resolve_namespaces();
  return prefix;
}

const std::string* find_attribute(const Node& node, std::string_view ns, std::string_view local) {
  for (const auto& a : node.attributes) {
    auto colon = a.name.find(':');
    if (colon == std::string::npos) continue;
    std::string p = a.name.substr(0, colon);
    if (p == "xmlns") continue;
    auto it = node.scope().find(p);
    if (it != node.scope().end() && it->second == ns && a.name.substr(colon + 1) == local) {
      return &a.value;
    }
  }
  return nullptr;
}

template <typename NodeT, typename Fn>
void for_each_port_operation(NodeT& root, Fn&& fn) {
  for (auto& pt : root.children) {
    if (!pt.is(kWsdlNamespace, "portType")) continue;
    for (auto& op : pt.children) {
      if (op.is(kWsdlNamespace, "operation")) fn(op);
    }
  }
}

Node* find_port_operation(Node& root, std::string_view name) {
  Node* found = nullptr;
  for_each_port_operation(root, [&](Node& op) {
    if (!found && op.attribute_or("name") == name) found = &op;
  });
  return found;
}

Node* child_element(Node& parent, std::string_view local) {
  for (auto& c : parent.children) {
    if (c.is(kWsdlNamespace, local)) return &c;
  }
  return nullptr;
}

std::string leaf_fragment(std::string_view leaf_path) {
  std::string out(leaf_path);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

// Whether `iri` names an operation or leaf of `peer`. IRIs outside the peer
// namespace count as resolved.
bool resolves(const std::string& iri, const ServiceDescription& peer) {
  auto base = peer.target_namespace + "#";
  if (!iri.starts_with(base)) return true;
  auto fragment = iri.substr(base.size());
  auto first = fragment.find('/');
  if (first == std::string::npos) return peer.find_operation(fragment) != nullptr;
  const auto* op = peer.find_operation(fragment.substr(0, first));
  if (!op) return false;
  auto second = fragment.find('/', first + 1);
  if (second == std::string::npos) return false;
  auto direction = fragment.substr(first + 1, second - first - 1);
  auto leaf = fragment.substr(second + 1);
  std::replace(leaf.begin(), leaf.end(), '_', ' ');
  if (direction == "input") return op->input.find(leaf) != nullptr;
  if (direction == "output") return op->output.find(leaf) != nullptr;
  return false;
}

struct DocumentWriter {
  const ServiceDescription& service;
  std::string role;
  xml::Document doc;
  std::string sawsdl;
  std::string subst;
  // Schema declarations in this document keyed by locator path.
  std::map<std::vector<std::size_t>, std::pair<std::string, std::vector<std::string>>> leaf_refs;

  DocumentWriter(const ServiceDescription& svc, std::string r)
      : service(svc), role(std::move(r)), doc(xml::parse(svc.raw_document)) {
    sawsdl = ensure_prefix(doc.root, kSawsdlNamespace, "sawsdl");
    subst = ensure_prefix(doc.root, kSubstNamespace, "subst");
  }

  Node& operation(const std::string& name) {
    Node* op = find_port_operation(doc.root, name);
    if (!op) {
      throw Error(ErrorCode::not_found,
                  "operation '" + name + "' missing from " + role + " document", name);
    }
    return *op;
  }

  void add_model_references(Node& node, const std::vector<std::string>& iris) {
    auto attr = sawsdl + ":modelReference";
    std::vector<std::string> merged;
    if (const auto* existing = node.attribute(attr)) merged = split_iris(*existing);
    for (const auto& i : iris) add_unique(merged, i);
    node.set_attribute(attr, join(merged, " "));
  }

  void reference_leaf(const Leaf& leaf, const std::string& iri) {
    if (!leaf.declaration || leaf.declaration->document != service.source_uri) return;
    auto& slot = leaf_refs[leaf.declaration->path];
    slot.first = leaf.path_text();
    add_unique(slot.second, iri);
  }

  void flush_leaf_refs(std::vector<AnnotationRecord>& manifest) {
    for (const auto& [path, entry] : leaf_refs) {
      Node* decl = xml::node_at(doc.root, path);
      if (!decl) continue;
      add_model_references(*decl, entry.second);
      manifest.push_back({role, "element " + decl->attribute_or("name") + " (" + entry.first + ")",
                          entry.second, {}});
    }
  }
};

}  // namespace

std::string operation_iri(std::string_view target_namespace, std::string_view operation) {
  return std::string(target_namespace) + "#" + std::string(operation);
}

std::string leaf_iri(std::string_view target_namespace, std::string_view operation,
                     std::string_view direction, std::string_view leaf_path) {
  return operation_iri(target_namespace, operation) + "/" + std::string(direction) + "/" +
         leaf_fragment(leaf_path);
}

nlohmann::json to_json(const std::vector<AnnotationRecord>& manifest) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : manifest) {
    out.push_back({{"document", r.document},
                   {"target", r.target},
                   {"modelReference", r.model_references},
                   {"attributes", r.attributes}});
  }
  return out;
}

AnnotatedWsdlPair annotate_pair(const ServiceDescription& substituted,
                                const ServiceDescription& substituent, const MatchingPlan& plan) {
  if (plan.operations.empty()) throw Error(ErrorCode::validation, "nothing to annotate");
  auto report = validate_plan(plan, substituted, substituent);
  if (!report.empty()) {
    throw Error(ErrorCode::validation,
                "plan does not validate: " + report.issues.front().message,
                to_json(report).dump());
  }

  DocumentWriter left(substituted, "substituted");
  DocumentWriter right(substituent, "substituent");
  AnnotatedWsdlPair pair;
  pair.substituted_uri = substituted.source_uri;
  pair.substituent_uri = substituent.source_uri;

  std::map<std::string, std::vector<std::string>> reverse_refs;  // substituent op -> IRIs

  for (const auto& m : plan.operations) {
    auto refs = referenced_operations(m.expr);
    std::vector<std::string> iris;
    for (const auto& r : refs) {
      iris.push_back(operation_iri(substituent.target_namespace, r));
      add_unique(reverse_refs[r], operation_iri(substituted.target_namespace, m.substituted));
    }
    Node& op = left.operation(m.substituted);
    left.add_model_references(op, iris);
    auto expr_text = render(m.expr);
    op.set_attribute(left.subst + ":opExpr", expr_text);
    pair.manifest.push_back({"substituted", "operation " + m.substituted, iris, {{"opExpr", expr_text}}});

    nlohmann::json out_map = nlohmann::json::array();
    const auto& source_op = *substituted.find_operation(m.substituted);
    for (const auto& o : plan.outputs) {
      if (o.substituted != m.substituted) continue;
      out_map.push_back({{"leaf", o.leaf}, {"expr", render(o.expr)}});
      const auto* target_leaf = source_op.output.find(o.leaf);
      auto target_iri = leaf_iri(substituted.target_namespace, m.substituted, "output", o.leaf);
      for (const auto& p : path_refs(o.expr)) {
        for (const auto& r : refs) {
          const auto* peer_op = substituent.find_operation(r);
          const auto* peer_leaf = peer_op->output.find(p);
          if (!peer_leaf) continue;
          left.reference_leaf(*target_leaf, leaf_iri(substituent.target_namespace, r, "output", p));
          right.reference_leaf(*peer_leaf, target_iri);
          break;
        }
      }
    }
    if (!out_map.empty()) {
      Node* output = child_element(op, "output");
      if (!output) {
        throw Error(ErrorCode::not_found, "operation '" + m.substituted + "' has no output element");
      }
      output->set_attribute(left.subst + ":outMap", out_map.dump());
      pair.manifest.push_back({"substituted", "output of " + m.substituted, {},
                               {{"outMap", out_map.dump()}}});
    }
  }

  for (const auto& [name, iris] : reverse_refs) {
    Node& op = right.operation(name);
    right.add_model_references(op, iris);
    pair.manifest.push_back({"substituent", "operation " + name, iris, {}});

    nlohmann::json in_map = nlohmann::json::array();
    const auto& target_op = *substituent.find_operation(name);
    for (const auto& in : plan.inputs) {
      if (in.substituent != name) continue;
      in_map.push_back({{"for", in.substituted}, {"leaf", in.leaf}, {"expr", render(in.expr)}});
      const auto* target_leaf = target_op.input.find(in.leaf);
      const auto& source_op = *substituted.find_operation(in.substituted);
      auto target_iri = leaf_iri(substituent.target_namespace, name, "input", in.leaf);
      for (const auto& p : path_refs(in.expr)) {
        const auto* src_leaf = source_op.input.find(p);
        right.reference_leaf(*target_leaf,
                             leaf_iri(substituted.target_namespace, in.substituted, "input", p));
        left.reference_leaf(*src_leaf, target_iri);
      }
    }
    if (!in_map.empty()) {
      Node* input = child_element(op, "input");
      if (!input) throw Error(ErrorCode::not_found, "operation '" + name + "' has no input element");
      input->set_attribute(right.subst + ":inMap", in_map.dump());
      pair.manifest.push_back({"substituent", "input of " + name, {}, {{"inMap", in_map.dump()}}});
    }
  }

  left.flush_leaf_refs(pair.manifest);
  right.flush_leaf_refs(pair.manifest);
  pair.substituted_doc = xml::serialize(left.doc);
  pair.substituent_doc = xml::serialize(right.doc);
  return pair;
}

ExtractedPlan extract_plan(const AnnotatedWsdlPair& pair, const ResourceLoader& loader) {
  auto substituted = parse_wsdl(pair.substituted_doc, pair.substituted_uri, loader);
  auto substituent = parse_wsdl(pair.substituent_doc, pair.substituent_uri, loader);
  auto left = xml::parse(pair.substituted_doc);
  auto right = xml::parse(pair.substituent_doc);
  ExtractedPlan result;

  auto check = [](const std::string& iri, const ServiceDescription& peer) {
    if (!resolves(iri, peer)) {
      throw Error(ErrorCode::dangling_reference, "dangling model reference " + iri, iri);
    }
  };
  auto garbled = [](const std::string& what, const std::string& op, const std::string& why) {
    return Error(ErrorCode::parse, "garbled " + what + " on " + op + ": " + why, op);
  };

  const std::string peer_base = substituent.target_namespace + "#";
  for_each_port_operation(left.root, [&](const Node& op) {
    auto name = op.attribute_or("name");
    std::vector<std::string> peers;
    if (const auto* refs = find_attribute(op, kSawsdlNamespace, "modelReference")) {
      for (const auto& iri : split_iris(*refs)) {
        check(iri, substituent);
        if (iri.starts_with(peer_base) && iri.find('/', peer_base.size()) == std::string::npos) {
          peers.push_back(iri.substr(peer_base.size()));
        }
      }
    }
    const auto* expr = find_attribute(op, kSubstNamespace, "opExpr");
    if (expr) {
      OperationExpr parsed;
      try {
        parsed = parse_operation_expr(*expr);
      } catch (const Error& e) {
        throw garbled("opExpr", name, e.what());
      }
      for (const auto& r : referenced_operations(parsed)) {
        if (!substituent.find_operation(r)) {
          throw Error(ErrorCode::dangling_reference,
                      "opExpr on " + name + " names unknown operation " + r, r);
        }
      }
      result.plan.set(OperationMatch{name, std::move(parsed)});
    } else if (!peers.empty()) {
      std::vector<OperationExpr> refs;
      for (const auto& p : peers) refs.push_back(OperationExpr::ref(p));
      result.plan.set(OperationMatch{
          name, refs.size() == 1 ? std::move(refs.front()) : OperationExpr::all_of(std::move(refs))});
      result.warnings.push_back("operation " + name +
                                " has model references but no expression; using a bare match");
    }
    for (const auto& c : op.children) {
      if (!c.is(kWsdlNamespace, "output")) continue;
      const auto* map = find_attribute(c, kSubstNamespace, "outMap");
      if (!map) continue;
      try {
        for (const auto& e : nlohmann::json::parse(*map)) {
          result.plan.set(OutputMapping{name, e.at("leaf").get<std::string>(),
                                        parse_data_expr(e.at("expr").get<std::string>())});
        }
      } catch (const nlohmann::json::exception& e) {
        throw garbled("outMap", name, e.what());
      } catch (const SyntaxError& e) {
        throw garbled("outMap", name, e.what());
      }
    }
  });

  for_each_port_operation(right.root, [&](const Node& op) {
    auto name = op.attribute_or("name");
    if (const auto* refs = find_attribute(op, kSawsdlNamespace, "modelReference")) {
      for (const auto& iri : split_iris(*refs)) check(iri, substituted);
    }
    for (const auto& c : op.children) {
      if (!c.is(kWsdlNamespace, "input")) continue;
      const auto* map = find_attribute(c, kSubstNamespace, "inMap");
      if (!map) continue;
      try {
        for (const auto& e : nlohmann::json::parse(*map)) {
          result.plan.set(InputMapping{e.at("for").get<std::string>(), name,
                                       e.at("leaf").get<std::string>(),
                                       parse_data_expr(e.at("expr").get<std::string>())});
        }
      } catch (const nlohmann::json::exception& e) {
        throw garbled("inMap", name, e.what());
      } catch (const SyntaxError& e) {
        throw garbled("inMap", name, e.what());
      }
    }
  });

  result.plan.normalize();
  return result;
}

std::vector<std::string> dangling_model_references(const AnnotatedWsdlPair& pair,
                                                   const ResourceLoader& loader) {
  auto substituted = parse_wsdl(pair.substituted_doc, pair.substituted_uri, loader);
  auto substituent = parse_wsdl(pair.substituent_doc, pair.substituent_uri, loader);
  std::vector<std::string> out;
  auto scan = [&](auto&& self, const Node& node, const ServiceDescription& peer) -> void {
    if (!node.is_element()) return;
    if (const auto* refs = find_attribute(node, kSawsdlNamespace, "modelReference")) {
      for (const auto& iri : split_iris(*refs)) {
        if (!resolves(iri, peer)) out.push_back(iri);
      }
    }
    for (const auto& c : node.children) self(self, c, peer);
  };
  auto left = xml::parse(pair.substituted_doc);
  auto right = xml::parse(pair.substituent_doc);
  scan(scan, left.root, substituent);
  scan(scan, right.root, substituted);
  return out;
}

}  // namespace wssubst

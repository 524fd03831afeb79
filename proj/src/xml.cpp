#include "wssubst/xml.hpp"

#include <expat.h>

#include <algorithm>

#include "wssubst/error.hpp"

namespace wssubst::xml {

namespace {

const std::shared_ptr<const NamespaceMap>& initial_scope() {
  static const auto scope = std::make_shared<const NamespaceMap>(
      NamespaceMap{{"xml", "http://www.w3.org/XML/1998/namespace"}});
  return scope;
}

struct ParseState {
  std::vector<Node*> stack;
  Document doc;
  bool has_root = false;
  std::string error;
};

void append_text(ParseState& st, std::string_view data) {
  if (st.stack.empty()) return;
  Node& parent = *st.stack.back();
  if (!parent.children.empty() && parent.children.back().kind == Node::Kind::text) {
    parent.children.back().value.append(data);
  } else {
    parent.children.push_back(Node::text(std::string(data)));
  }
}

void XMLCALL on_start(void* user, const XML_Char* name, const XML_Char** atts) {
  auto& st = *static_cast<ParseState*>(user);
  Node node = Node::element(name);
  for (int i = 0; atts[i] != nullptr; i += 2) {
    node.attributes.push_back({atts[i], atts[i + 1]});
  }
  if (st.stack.empty()) {
    st.doc.root = std::move(node);
    st.has_root = true;
    st.stack.push_back(&st.doc.root);
  } else {
    Node& parent = *st.stack.back();
    parent.children.push_back(std::move(node));
    st.stack.push_back(&parent.children.back());
  }
}

void XMLCALL on_end(void* user, const XML_Char*) {
  auto& st = *static_cast<ParseState*>(user);
  st.stack.pop_back();
}

void XMLCALL on_text(void* user, const XML_Char* s, int len) {
  append_text(*static_cast<ParseState*>(user), std::string_view(s, static_cast<std::size_t>(len)));
}

void XMLCALL on_comment(void* user, const XML_Char* data) {
  auto& st = *static_cast<ParseState*>(user);
  if (st.stack.empty()) return;
  Node c;
  c.kind = Node::Kind::comment;
  c.value = data;
  st.stack.back()->children.push_back(std::move(c));
}

void XMLCALL on_pi(void* user, const XML_Char* target, const XML_Char* data) {
  auto& st = *static_cast<ParseState*>(user);
  if (st.stack.empty()) return;
  Node pi;
  pi.kind = Node::Kind::processing_instruction;
  pi.name = target;
  pi.value = data;
  st.stack.back()->children.push_back(std::move(pi));
}

void write_node(const Node& node, std::string& out) {
  switch (node.kind) {
    case Node::Kind::text:
      out += escape(node.value, false);
      return;
    case Node::Kind::comment:
      out += "<!--";
      out += node.value;
      out += "-->";
      return;
    case Node::Kind::processing_instruction:
      out += "<?";
      out += node.name;
      if (!node.value.empty()) {
        out += ' ';
        out += node.value;
      }
      out += "?>";
      return;
    case Node::Kind::element:
      break;
  }
  out += '<';
  out += node.name;
  for (const auto& a : node.attributes) {
    out += ' ';
    out += a.name;
    out += "=\"";
    out += escape(a.value, true);
    out += '"';
  }
  if (node.children.empty()) {
    out += "/>";
    return;
  }
  out += '>';
  for (const auto& c : node.children) write_node(c, out);
  out += "</";
  out += node.name;
  out += '>';
}

}  // namespace

Node Node::element(std::string name) {
  Node n;
  n.kind = Kind::element;
  n.name = std::move(name);
  return n;
}

Node Node::text(std::string value) {
  Node n;
  n.kind = Kind::text;
  n.value = std::move(value);
  return n;
}

std::string_view Node::local_name() const {
  std::string_view n = name;
  auto colon = n.find(':');
  return colon == std::string_view::npos ? n : n.substr(colon + 1);
}

std::string_view Node::prefix() const {
  std::string_view n = name;
  auto colon = n.find(':');
  return colon == std::string_view::npos ? std::string_view{} : n.substr(0, colon);
}

const NamespaceMap& Node::scope() const {
  return scope_ ? *scope_ : *initial_scope();
}

const std::string* Node::attribute(std::string_view attr) const {
  for (const auto& a : attributes) {
    if (a.name == attr) return &a.value;
  }
  return nullptr;
}

std::string Node::attribute_or(std::string_view attr, std::string fallback) const {
  const auto* v = attribute(attr);
  return v ? *v : fallback;
}

void Node::set_attribute(std::string_view attr, std::string value) {
  for (auto& a : attributes) {
    if (a.name == attr) {
      a.value = std::move(value);
      return;
    }
  }
  attributes.push_back({std::string(attr), std::move(value)});
}

bool Node::remove_attribute(std::string_view attr) {
  auto it = std::find_if(attributes.begin(), attributes.end(),
                         [&](const Attribute& a) { return a.name == attr; });
  if (it == attributes.end()) return false;
  attributes.erase(it);
  return true;
}

std::vector<const Node*> Node::elements() const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c.is_element()) out.push_back(&c);
  }
  return out;
}

std::vector<Node*> Node::elements() {
  std::vector<Node*> out;
  for (auto& c : children) {
    if (c.is_element()) out.push_back(&c);
  }
  return out;
}

std::vector<const Node*> Node::elements(std::string_view ns, std::string_view local) const {
  std::vector<const Node*> out;
  for (const auto& c : children) {
    if (c.is(ns, local)) out.push_back(&c);
  }
  return out;
}

const Node* Node::first(std::string_view ns, std::string_view local) const {
  for (const auto& c : children) {
    if (c.is(ns, local)) return &c;
  }
  return nullptr;
}

std::string Node::text_content() const {
  if (kind == Kind::text) return value;
  std::string out;
  for (const auto& c : children) {
    if (c.kind == Kind::text || c.kind == Kind::element) out += c.text_content();
  }
  return out;
}

std::pair<std::string, std::string> Node::resolve_qname(std::string_view qname) const {
  auto colon = qname.find(':');
  std::string prefix_part = colon == std::string_view::npos ? "" : std::string(qname.substr(0, colon));
  std::string local = std::string(colon == std::string_view::npos ? qname : qname.substr(colon + 1));
  const auto& sc = scope();
  auto it = sc.find(prefix_part);
  if (it == sc.end()) {
    if (prefix_part.empty()) return {"", local};
    throw Error(ErrorCode::unresolved_reference,
                "undeclared namespace prefix '" + prefix_part + "'", std::string(qname));
  }
  return {it->second, local};
}

void Node::resolve_namespaces(const std::shared_ptr<const NamespaceMap>& parent_scope) {
  if (!is_element()) return;
  const auto& base = parent_scope ? parent_scope : initial_scope();
  std::shared_ptr<NamespaceMap> own;
  for (const auto& a : attributes) {
    if (a.name == "xmlns" || a.name.starts_with("xmlns:")) {
      if (!own) own = std::make_shared<NamespaceMap>(*base);
      std::string p = a.name == "xmlns" ? "" : a.name.substr(6);
      if (a.value.empty() && !p.empty()) {
        own->erase(p);
      } else {
        (*own)[p] = a.value;
      }
    }
  }
  scope_ = own ? std::shared_ptr<const NamespaceMap>(std::move(own)) : base;
  std::string p(prefix());
  auto it = scope_->find(p);
  ns_ = it == scope_->end() ? std::string{} : it->second;
  for (auto& c : children) c.resolve_namespaces(scope_);
}

Document parse(std::string_view bytes) {
  ParseState st;
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate(nullptr), &XML_ParserFree);
  if (!parser) throw Error(ErrorCode::io, "cannot allocate XML parser");
  XML_SetUserData(parser.get(), &st);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  XML_SetCommentHandler(parser.get(), on_comment);
  XML_SetProcessingInstructionHandler(parser.get(), on_pi);
  if (XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    auto line = XML_GetCurrentLineNumber(parser.get());
    auto col = XML_GetCurrentColumnNumber(parser.get());
    std::string where = "line " + std::to_string(line) + ", column " + std::to_string(col);
    throw Error(ErrorCode::parse,
                std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get())) +
                    " (" + where + ")",
                where);
  }
  if (!st.has_root) throw Error(ErrorCode::parse, "malformed XML: no root element");
  st.doc.root.resolve_namespaces();
  return std::move(st.doc);
}

std::string escape(std::string_view raw, bool attribute) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
        } else {
          out += c;
        }
        break;
      case '\n':
        if (attribute) {
          out += "&#10;";
        } else {
          out += c;
        }
        break;
      case '\t':
        if (attribute) {
          out += "&#9;";
        } else {
          out += c;
        }
        break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string serialize(const Document& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  write_node(doc.root, out);
  out += '\n';
  return out;
}

const Node* node_at(const Node& root, const std::vector<std::size_t>& path) {
  const Node* cur = &root;
  for (std::size_t idx : path) {
    auto kids = cur->elements();
    if (idx >= kids.size()) return nullptr;
    cur = kids[idx];
  }
  return cur;
}

Node* node_at(Node& root, const std::vector<std::size_t>& path) {
  Node* cur = &root;
  for (std::size_t idx : path) {
    auto kids = cur->elements();
    if (idx >= kids.size()) return nullptr;
    cur = kids[idx];
  }
  return cur;
}

}  // namespace wssubst::xml

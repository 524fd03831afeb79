#include "wssubst/resource.hpp"

#include <httplib.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "wssubst/error.hpp"

namespace wssubst {

namespace fs = std::filesystem;

namespace {

struct HttpLocation {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

HttpLocation split_http(std::string_view uri) {
  auto scheme_end = uri.find("://");
  auto path_start = uri.find('/', scheme_end + 3);
  if (path_start == std::string_view::npos) return {std::string(uri), "/"};
  return {std::string(uri.substr(0, path_start)), std::string(uri.substr(path_start))};
}

std::string normalize_http_path(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string seg;
  while (std::getline(ss, seg, '/')) {
    if (seg.empty() || seg == ".") continue;
    if (seg == "..") {
      if (!parts.empty()) parts.pop_back();
      continue;
    }
    parts.push_back(seg);
  }
  std::string out;
  for (const auto& p : parts) out += "/" + p;
  if (!path.empty() && path.back() == '/') out += "/";
  return out.empty() ? "/" : out;
}

}  // namespace

bool is_http_uri(std::string_view uri) { return uri.starts_with("http://"); }

std::string to_local_path(std::string_view uri) {
  if (uri.starts_with("file://")) return std::string(uri.substr(7));
  return std::string(uri);
}

std::string resolve_uri(std::string_view base, std::string_view reference) {
  if (reference.find("://") != std::string_view::npos) return std::string(reference);
  if (is_http_uri(base)) {
    auto loc = split_http(base);
    if (reference.starts_with("/")) return loc.origin + normalize_http_path(std::string(reference));
    auto dir = loc.path.substr(0, loc.path.rfind('/') + 1);
    return loc.origin + normalize_http_path(dir + std::string(reference));
  }
  fs::path ref(std::string{reference});
  if (ref.is_absolute()) return ref.lexically_normal().string();
  fs::path b(to_local_path(base));
  return (b.parent_path() / ref).lexically_normal().string();
}

std::string ResourceLoader::fetch(const std::string& uri) const {
  if (is_http_uri(uri)) {
    auto loc = split_http(uri);
    httplib::Client client(loc.origin);
    client.set_connection_timeout(5);
    client.set_read_timeout(10);
    auto res = client.Get(loc.path);
    if (!res) {
      throw Error(ErrorCode::io, "cannot reach " + uri, httplib::to_string(res.error()));
    }
    if (res->status != 200) {
      throw Error(ErrorCode::io, "HTTP " + std::to_string(res->status) + " fetching " + uri, uri);
    }
    return res->body;
  }
  if (uri.find("://") != std::string::npos && !uri.starts_with("file://")) {
    throw Error(ErrorCode::io, "unsupported URI scheme: " + uri, uri);
  }
  std::string path = to_local_path(uri);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path, path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

const ResourceLoader& default_loader() {
  static const ResourceLoader loader;
  return loader;
}

}  // namespace wssubst

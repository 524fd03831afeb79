#pragma once

#include <string>
#include <string_view>

namespace wssubst {

/// Loads documents by location: plain paths, file:// URIs and http:// URLs.
class ResourceLoader {
 public:
  virtual ~ResourceLoader() = default;
  virtual std::string fetch(const std::string& uri) const;
};

const ResourceLoader& default_loader();

bool is_http_uri(std::string_view uri);

/// Resolves `reference` relative to `base` (RFC 3986 merge for http, path
/// joining otherwise). Absolute references are returned unchanged.
std::string resolve_uri(std::string_view base, std::string_view reference);

/// Strips a file:// scheme when present.
std::string to_local_path(std::string_view uri);

}  // namespace wssubst

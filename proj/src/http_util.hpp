// Internal helpers shared by the HTTP-backed components. Not installed.
#pragma once

#include <string>

#include "harf/errors.hpp"

namespace harf::detail {

struct ParsedUrl {
  std::string host;
  int port = 80;
  std::string path = "/";
};

// Accepts plain-HTTP endpoints of the form http://host[:port][/path].
inline ParsedUrl parse_http_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind("https://", 0) == 0)
    throw InvariantViolation("https endpoints are not supported: '" + url +
                             "'");
  if (url.rfind(scheme, 0) != 0)
    throw InvariantViolation("endpoint must look like http://host[:port]/path, got '" +
                             url + "'");
  std::string rest = url.substr(scheme.size());
  ParsedUrl out;
  std::size_t slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) out.path = rest.substr(slash);
  std::size_t colon = authority.find(':');
  if (colon == std::string::npos) {
    out.host = authority;
  } else {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      out.port = -1;
    }
    if (out.port <= 0 || out.port > 65535)
      throw InvariantViolation("bad port in endpoint '" + url + "'");
  }
  if (out.host.empty())
    throw InvariantViolation("missing host in endpoint '" + url + "'");
  return out;
}

// Runs `attempt` up to `attempts` times, swallowing TransportError until the
// last try. Anything else propagates immediately.
template <typename F>
auto with_retries(int attempts, F&& attempt) {
  for (int i = 1;; ++i) {
    try {
      return attempt();
    } catch (const TransportError&) {
      if (i >= attempts) throw;
    }
  }
}

}  // namespace harf::detail

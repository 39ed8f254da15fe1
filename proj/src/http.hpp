#pragma once

// Internal JSON-over-HTTP helper shared by the remote embedder and the remote
// completion provider.

#include <chrono>
#include <string>

namespace kaping::detail {

// Environment variable holding the bearer token for remote services.
inline constexpr const char* kTokenEnvVar = "KAPING_API_TOKEN";

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // begins with '/'
};

// Throws kaping::Error(config) for URLs without a scheme or host.
Endpoint parse_endpoint(const std::string& url);

struct HttpResult {
  int status = 0;  // 0 when the request never got a response
  std::string body;
  std::string error;
};

HttpResult post_json(const Endpoint& endpoint, const std::string& body,
                     std::chrono::milliseconds timeout);

}  // namespace kaping::detail

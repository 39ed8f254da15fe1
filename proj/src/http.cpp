#include "http.hpp"

#include <cstdlib>

#include "kaping/error.hpp"

#include "httplib.h"

namespace kaping::detail {

Endpoint parse_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos || scheme_end == 0) {
    throw Error(ErrorKind::config, "endpoint '" + url + "' has no scheme");
  }
  auto path_start = url.find('/', scheme_end + 3);
  Endpoint ep;
  ep.origin = url.substr(0, path_start);
  ep.path = path_start == std::string::npos ? "/" : url.substr(path_start);
  if (ep.origin.size() <= scheme_end + 3) {
    throw Error(ErrorKind::config, "endpoint '" + url + "' has no host");
  }
  return ep;
}

HttpResult post_json(const Endpoint& endpoint, const std::string& body,
                     std::chrono::milliseconds timeout) {
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  if (const char* token = std::getenv(kTokenEnvVar); token && *token) {
    client.set_bearer_token_auth(token);
  }
  HttpResult result;
  auto res = client.Post(endpoint.path, body, "application/json");
  if (!res) {
    result.error = httplib::to_string(res.error());
    return result;
  }
  result.status = res->status;
  result.body = res->body;
  return result;
}

}  // namespace kaping::detail

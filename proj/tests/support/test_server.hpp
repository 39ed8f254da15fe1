#pragma once

// Loopback HTTP server for exercising the remote clients.

#include <string>
#include <thread>

#include "httplib.h"

namespace kaping::testing {

class TestServer {
 public:
  explicit TestServer(const std::string& path, httplib::Server::Handler handler) {
    server_.Post(path, std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~TestServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path) const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

}  // namespace kaping::testing

#pragma once

#include <stdexcept>
#include <string>

namespace kaping {

enum class ErrorKind {
  invalid_argument,
  io,
  parse,
  dangling_reference,
  config,
  transport,
  oversize,
};

const char* to_string(ErrorKind kind);

// Base for every error the library raises. The C API maps `kind()` onto a
// status code, so the kind must be meaningful on its own.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Remote service failure. `http_status` is 0 when no response arrived.
class TransportError : public Error {
 public:
  TransportError(const std::string& message, int http_status, int attempts)
      : Error(ErrorKind::transport, message),
        http_status_(http_status),
        attempts_(attempts) {}

  int http_status() const noexcept { return http_status_; }
  int attempts() const noexcept { return attempts_; }

 private:
  int http_status_;
  int attempts_;
};

}  // namespace kaping

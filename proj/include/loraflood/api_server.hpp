#pragma once

// Northbound HTTP API. Routes and payloads are documented in docs/api.md.

#include <memory>
#include <string>

#include "loraflood/error.hpp"
#include "loraflood/service.hpp"

namespace loraflood {

/// HTTP status for an error code.
int http_status(Errc code) noexcept;

class ApiServer {
 public:
  explicit ApiServer(ControlService& service);
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds to the port (0 picks a free one) and returns the bound port, or
  /// -1 on failure.
  int bind(const std::string& host, int port);
  /// Serves on the calling thread until stop().
  bool listen();
  /// Serves on a background thread.
  void start();
  void stop();
  int port() const noexcept { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

}  // namespace loraflood

#pragma once

#include <memory>
#include <string>

#include "cirl/service.hpp"

namespace cirl {

/// JSON over HTTP in front of a SessionManager.
///
///   POST /sessions              create
///   POST /sessions/{id}/step    one human action
///   POST /sessions/{id}/deploy  robot rollout and scorecard
///   GET  /sessions/{id}         current summary
///   GET  /healthz
///
/// Failures return {"error": {"code", "message"}} with a matching status.
/// An Idempotency-Key header is treated like the body's idempotency_token.
class HttpServer {
 public:
  explicit HttpServer(SessionManager& sessions);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Blocks until stop() is called from another thread.
  void listen();
  /// listen() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cirl

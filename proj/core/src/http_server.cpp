#include "cirl/http_server.hpp"

#include <thread>

#include <httplib.h>

namespace cirl {

namespace {

using json = nlohmann::json;

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  send(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

json parse_body(const httplib::Request& req) {
  json body = req.body.empty() ? json::object() : json::parse(req.body);
  if (body.is_object() && !body.contains("idempotency_token") &&
      req.has_header("Idempotency-Key")) {
    body["idempotency_token"] = req.get_header_value("Idempotency-Key");
  }
  return body;
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
  return [fn](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const json::parse_error& e) {
      send_error(res, 400, "malformed_body", e.what());
    } catch (const SessionNotFound& e) {
      send_error(res, 404, "unknown_session", e.what());
    } catch (const StateError& e) {
      send_error(res, 409, "wrong_phase", e.what());
    } catch (const InputDomainError& e) {
      send_error(res, 400, "invalid_input", e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "internal", e.what());
    }
  };
}

}  // namespace

struct HttpServer::Impl {
  SessionManager& sessions;
  httplib::Server server;
  std::thread thread;
  explicit Impl(SessionManager& s) : sessions(s) {}
};

HttpServer::HttpServer(SessionManager& sessions) : impl_(std::make_unique<Impl>(sessions)) {
  auto& srv = impl_->server;
  SessionManager& sm = sessions;

  // The browser client is served from elsewhere.
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Headers", "Content-Type, Idempotency-Key"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
  srv.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  srv.Get("/healthz", guarded([&sm](const httplib::Request&, httplib::Response& res) {
            send(res, 200, {{"status", "ok"}, {"sessions", sm.size()}});
          }));
  srv.Post("/sessions", guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             send(res, 201, sm.create(parse_body(req)));
           }));
  srv.Post(R"(/sessions/([^/]+)/step)",
           guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             send(res, 200, sm.step(req.matches[1], parse_body(req)));
           }));
  srv.Post(R"(/sessions/([^/]+)/deploy)",
           guarded([&sm](const httplib::Request& req, httplib::Response& res) {
             send(res, 200, sm.deploy(req.matches[1], parse_body(req)));
           }));
  srv.Get(R"(/sessions/([^/]+))",
          guarded([&sm](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, sm.get(req.matches[1]));
          }));
  srv.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      send_error(res, res.status, res.status == 404 ? "not_found" : "http_error",
                 "no route for this request");
    }
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::start() {
  impl_->thread = std::thread([this] { listen(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace cirl

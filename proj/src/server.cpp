#include "mpst/server.hpp"

#include <httplib.h>

#include <mutex>

#include "mpst/bridge.hpp"

namespace mpst {

struct BridgeServer::Impl {
  httplib::Server http;
  int port = -1;
  // stop() may race with run() starting on another thread.
  std::mutex lifecycle;
  bool started = false;
  bool stopped = false;
};

namespace {

void reply(httplib::Response& res, const std::string& body) {
  auto parsed = bridge::json::parse(body);
  res.status = bridge::isRequestError(parsed) ? 400 : 200;
  res.set_content(body, "application/json");
}

}  // namespace

BridgeServer::BridgeServer(std::string uiDir) : impl_(std::make_unique<Impl>()) {
  auto& http = impl_->http;
  http.Post("/api", [](const httplib::Request& req, httplib::Response& res) { reply(res, bridge::handleText(req.body)); });
  http.Post(R"(/api/([A-Za-z]+))", [](const httplib::Request& req, httplib::Response& res) {
    bridge::json body;
    try {
      body = req.body.empty() ? bridge::json::object() : bridge::json::parse(req.body);
    } catch (const bridge::json::parse_error&) {
      reply(res, bridge::handleText(req.body));
      return;
    }
    if (body.is_object()) body["op"] = req.matches[1].str();
    reply(res, bridge::handle(body).dump());
  });
  for (const char* op : {"examples", "presets"}) {
    http.Get(std::string("/api/") + op, [op](const httplib::Request&, httplib::Response& res) {
      reply(res, bridge::handle(bridge::json{{"op", op}}).dump());
    });
  }
  if (!uiDir.empty()) http.set_mount_point("/", uiDir);
  // SO_REUSEPORT (httplib's default) would let a second server share the port.
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
}

BridgeServer::~BridgeServer() = default;

bool BridgeServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->http.bind_to_any_port(host);
    return impl_->port > 0;
  }
  if (!impl_->http.bind_to_port(host, port)) return false;
  impl_->port = port;
  return true;
}

int BridgeServer::port() const noexcept { return impl_->port; }

void BridgeServer::run() {
  {
    std::lock_guard lock(impl_->lifecycle);
    if (impl_->stopped) return;
    impl_->started = true;
  }
  impl_->http.listen_after_bind();
}

void BridgeServer::stop() {
  bool started;
  {
    std::lock_guard lock(impl_->lifecycle);
    impl_->stopped = true;
    started = impl_->started;
  }
  if (!started) return;
  impl_->http.wait_until_ready();
  impl_->http.stop();
}

}  // namespace mpst

#pragma once

#include <memory>
#include <string>

namespace mpst {

/// Serves the bridge over HTTP: `POST /api` with an `op` field, `POST
/// /api/<op>` aliases, `GET /api/examples` and `GET /api/presets`, plus static
/// files from `uiDir` when one is given.
class BridgeServer {
 public:
  explicit BridgeServer(std::string uiDir = {});
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  /// Binds to host:port; port 0 picks a free port. False if the port is taken.
  bool bind(const std::string& host, int port);
  int port() const noexcept;

  /// Blocks until stop() is called.
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mpst

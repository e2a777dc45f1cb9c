#pragma once

#include <memory>
#include <string>

#include "sastbench/gate.hpp"

namespace sastbench {

/// HTTP front end over a Gate. Assessment runs on background workers so
/// POST /submissions/{id}/assess returns as soon as the scan is accepted.
class GateServer {
 public:
  explicit GateServer(std::shared_ptr<Gate> gate);
  ~GateServer();

  GateServer(const GateServer&) = delete;
  GateServer& operator=(const GateServer&) = delete;

  /// Binds host:port (port 0 picks a free one); returns the bound port.
  /// Throws Error{io} when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();
  /// Blocks until every background assessment has finished.
  void drain();

  Gate& gate() { return *gate_; }

 private:
  struct Impl;
  std::shared_ptr<Gate> gate_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sastbench

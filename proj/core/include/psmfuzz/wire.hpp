// Copyright 2026 The psmfuzz Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Line protocol between a test driver and a served implementation:
//   client: RESET | SEND <symbol>
//   server: OK | RECV <symbol> | RECV null | TIMEOUT | ERR <reason>

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include "psmfuzz/adapter.hpp"
#include "psmfuzz/simulator.hpp"

namespace psmfuzz {

/// Protocol state for one client. Owns a fresh copy of the implementation.
class WireSession {
 public:
  explicit WireSession(SimulatedIut iut) : iut_(std::move(iut)) {}

  /// Response line (no newline) for one request line. Sets `close` on a
  /// protocol violation.
  std::string handle(std::string_view line, bool& close);

 private:
  SimulatedIut iut_;
};

/// Serves one session over a pair of streams until end of input or ERR.
void serve_stream(const SimulatedIut& prototype, std::istream& in, std::ostream& out);

/// TCP listener, one client at a time, a fresh implementation per session.
class TcpServer {
 public:
  /// Binds immediately; port 0 picks a free port. Throws TransportError.
  TcpServer(SimulatedIut prototype, const std::string& host, std::uint16_t port);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Accepts sessions until stop() or `max_sessions` (0 = unlimited).
  void serve(std::size_t max_sessions = 0);
  void stop() noexcept { stop_ = true; }

 private:
  void session(int fd);

  SimulatedIut prototype_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stop_{false};
};

class TcpAdapter : public Adapter {
 public:
  TcpAdapter(const std::string& host, std::uint16_t port,
             std::chrono::milliseconds io_timeout = std::chrono::seconds(10));
  ~TcpAdapter() override;
  TcpAdapter(const TcpAdapter&) = delete;
  TcpAdapter& operator=(const TcpAdapter&) = delete;

  void reset() override;
  Reply send(const InputSymbol& input) override;

  /// Sends a raw line and returns the raw reply line.
  std::string exchange(const std::string& line);

 private:
  int fd_ = -1;
  std::string buffer_;
};

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

/// `tcp://host:port`. Throws ConfigError.
Endpoint parse_tcp_endpoint(std::string_view text);

}  // namespace psmfuzz

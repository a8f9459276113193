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

#include "psmfuzz/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>

#include "psmfuzz/errors.hpp"

namespace psmfuzz {

std::string WireSession::handle(std::string_view line, bool& close) {
  close = false;
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
  if (line == "RESET") {
    iut_.reset();
    return "OK";
  }
  if (line.substr(0, 5) == "SEND ") {
    Symbol in;
    try {
      in = parse_symbol(line.substr(5));
    } catch (const std::exception& e) {
      close = true;
      return std::string("ERR bad symbol: ") + e.what();
    }
    if (in.is_null()) {
      close = true;
      return "ERR null is not an input";
    }
    Reply r = iut_.send(in);
    if (!r) return "TIMEOUT";
    return "RECV " + to_string(*r);
  }
  close = true;
  return "ERR unknown command";
}

void serve_stream(const SimulatedIut& prototype, std::istream& in, std::ostream& out) {
  WireSession session(prototype);
  std::string line;
  while (std::getline(in, line)) {
    bool close = false;
    out << session.handle(line, close) << '\n' << std::flush;
    if (close) break;
  }
}

namespace {

void send_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    ssize_t n = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("send failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

// Reads one line; false on orderly close with no pending data.
bool read_line(int fd, std::string& buffer, std::string& line) {
  while (true) {
    auto nl = buffer.find('\n');
    if (nl != std::string::npos) {
      line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      return true;
    }
    char chunk[4096];
    ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n == 0) return false;
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) throw TransportError("read timed out");
      throw TransportError(std::string("recv failed: ") + std::strerror(errno));
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace

TcpServer::TcpServer(SimulatedIut prototype, const std::string& host, std::uint16_t port)
    : prototype_(std::move(prototype)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw TransportError("socket failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw TransportError("bad listen address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 1) < 0) {
    std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw TransportError("bind failed on " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void TcpServer::serve(std::size_t max_sessions) {
  std::size_t served = 0;
  while (!stop_ && (max_sessions == 0 || served < max_sessions)) {
    pollfd p{listen_fd_, POLLIN, 0};
    int ready = ::poll(&p, 1, 100);
    if (ready <= 0) continue;
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    try {
      session(fd);
    } catch (const TransportError&) {
      // Client went away mid-session; wait for the next one.
    }
    ::close(fd);
    ++served;
  }
}

void TcpServer::session(int fd) {
  WireSession session(prototype_);
  std::string buffer, line;
  while (!stop_ && read_line(fd, buffer, line)) {
    bool close = false;
    send_all(fd, session.handle(line, close) + "\n");
    if (close) break;
  }
}

TcpAdapter::TcpAdapter(const std::string& host, std::uint16_t port,
                       std::chrono::milliseconds io_timeout) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  std::string service = std::to_string(port);
  if (::getaddrinfo(host.c_str(), service.c_str(), &hints, &res) != 0 || !res) {
    throw TransportError("cannot resolve " + host);
  }
  for (addrinfo* a = res; a; a = a->ai_next) {
    fd_ = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd_ < 0) continue;
    if (::connect(fd_, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd_);
    fd_ = -1;
  }
  ::freeaddrinfo(res);
  if (fd_ < 0) throw TransportError("cannot connect to " + host + ":" + service);
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(io_timeout.count() / 1000);
  tv.tv_usec = static_cast<suseconds_t>((io_timeout.count() % 1000) * 1000);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
}

TcpAdapter::~TcpAdapter() {
  if (fd_ >= 0) ::close(fd_);
}

std::string TcpAdapter::exchange(const std::string& line) {
  send_all(fd_, line + "\n");
  std::string reply;
  if (!read_line(fd_, buffer_, reply)) throw TransportError("connection closed by peer");
  return reply;
}

void TcpAdapter::reset() {
  std::string reply = exchange("RESET");
  if (reply != "OK") throw TransportError("unexpected reply to RESET: " + reply);
}

Reply TcpAdapter::send(const InputSymbol& input) {
  std::string reply = exchange("SEND " + to_string(input));
  if (reply == "TIMEOUT") return std::nullopt;
  if (reply.substr(0, 5) == "RECV ") {
    try {
      return parse_symbol(reply.substr(5));
    } catch (const std::exception& e) {
      throw TransportError("malformed RECV: " + reply);
    }
  }
  throw TransportError("server error: " + reply);
}

Endpoint parse_tcp_endpoint(std::string_view text) {
  constexpr std::string_view scheme = "tcp://";
  if (text.substr(0, scheme.size()) != scheme) throw ConfigError("expected tcp://host:port");
  std::string_view rest = text.substr(scheme.size());
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw ConfigError("expected tcp://host:port");
  Endpoint e;
  e.host = std::string(rest.substr(0, colon));
  std::string_view port = rest.substr(colon + 1);
  unsigned value = 0;
  auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
  if (ec != std::errc() || ptr != port.data() + port.size() || value == 0 || value > 65535) {
    throw ConfigError("bad port in " + std::string(text));
  }
  e.port = static_cast<std::uint16_t>(value);
  return e;
}

}  // namespace psmfuzz

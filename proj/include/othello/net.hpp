#pragma once

// Minimal blocking TCP helpers over POSIX sockets.

#include <arpa/inet.h>
#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>

#include "othello/protocol.hpp"

namespace othello::net {

class NetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Socket {
 public:
  Socket() = default;
  explicit Socket(int fd) : fd_(fd) {}
  Socket(const Socket&) = delete;
  Socket& operator=(const Socket&) = delete;
  Socket(Socket&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Socket& operator=(Socket&& o) noexcept {
    if (this != &o) {
      close();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Socket() { close(); }

  int fd() const noexcept { return fd_; }
  bool valid() const noexcept { return fd_ >= 0; }

  void close() noexcept {
    if (fd_ >= 0) ::close(std::exchange(fd_, -1));
  }

  /// Unblocks any thread reading the socket without releasing the fd.
  void shutdown() noexcept {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  }

  int local_port() const {
    sockaddr_in addr{};
    socklen_t len = sizeof addr;
    if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
      throw NetError(std::string("getsockname: ") + std::strerror(errno));
    return ntohs(addr.sin_port);
  }

 private:
  int fd_ = -1;
};

namespace detail {

inline addrinfo* resolve(const std::string& host, int port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  const int rc = ::getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &res);
  if (rc != 0) throw NetError("resolve " + host + ": " + ::gai_strerror(rc));
  return res;
}

}  // namespace detail

/// Port 0 binds an ephemeral port; read it back with Socket::local_port().
inline Socket listen_tcp(const std::string& host, int port, int backlog = 64) {
  addrinfo* res = detail::resolve(host, port, true);
  Socket s(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
  if (!s.valid()) {
    ::freeaddrinfo(res);
    throw NetError(std::string("socket: ") + std::strerror(errno));
  }
  int one = 1;
  ::setsockopt(s.fd(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  const int rc = ::bind(s.fd(), res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) throw NetError("bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  if (::listen(s.fd(), backlog) != 0) throw NetError(std::string("listen: ") + std::strerror(errno));
  return s;
}

inline Socket connect_tcp(const std::string& host, int port) {
  addrinfo* res = detail::resolve(host, port, false);
  Socket s(::socket(res->ai_family, res->ai_socktype, res->ai_protocol));
  if (!s.valid()) {
    ::freeaddrinfo(res);
    throw NetError(std::string("socket: ") + std::strerror(errno));
  }
  const int rc = ::connect(s.fd(), res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) throw NetError("connect " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
  int one = 1;
  ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return s;
}

/// Waits up to `timeout` for a pending connection.
inline std::optional<Socket> accept_for(const Socket& listener, std::chrono::milliseconds timeout) {
  pollfd p{listener.fd(), POLLIN, 0};
  const int rc = ::poll(&p, 1, static_cast<int>(timeout.count()));
  if (rc <= 0) return std::nullopt;
  const int fd = ::accept(listener.fd(), nullptr, nullptr);
  if (fd < 0) return std::nullopt;
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return Socket(fd);
}

/// Parses "host:port"; a bare port means localhost.
inline std::pair<std::string, int> split_host_port(std::string_view text) {
  const auto colon = text.rfind(':');
  std::string host = colon == std::string_view::npos ? "127.0.0.1" : std::string(text.substr(0, colon));
  const std::string port_text(colon == std::string_view::npos ? text : text.substr(colon + 1));
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(port_text, &used);
    if (used != port_text.size()) port = 0;
  } catch (const std::exception&) {
    port = 0;
  }
  if (port < 1 || port > 65535) throw NetError("bad address: " + std::string(text));
  if (host.empty()) host = "127.0.0.1";
  return {host, port};
}

/// Line-framed connection. Writes are serialized by a mutex so several
/// threads may send; reads belong to a single owner.
class Connection {
 public:
  explicit Connection(Socket s) : sock_(std::move(s)) {}

  bool send(const protocol::Message& m) { return send_raw(protocol::encode_message(m)); }

  bool send_raw(std::string_view bytes) {
    std::lock_guard lock(write_mu_);
    while (!bytes.empty()) {
      const ssize_t n = ::send(sock_.fd(), bytes.data(), bytes.size(), MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) return false;
      bytes.remove_prefix(static_cast<std::size_t>(n));
    }
    return true;
  }

  enum class ReadStatus { Frame, Timeout, Closed };

  /// Blocks until a full frame, the timeout, or end of stream. A negative
  /// timeout waits indefinitely.
  ReadStatus read_frame(protocol::RawFrame& out, std::chrono::milliseconds timeout = std::chrono::milliseconds(-1)) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    char buf[4096];
    while (!assembler_.has_frame()) {
      if (closed_) return ReadStatus::Closed;
      int wait = -1;
      if (timeout.count() >= 0) {
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
        if (left.count() <= 0) return ReadStatus::Timeout;
        wait = static_cast<int>(left.count());
      }
      pollfd p{sock_.fd(), POLLIN, 0};
      const int rc = ::poll(&p, 1, wait);
      if (rc < 0 && errno == EINTR) continue;
      if (rc < 0) return ReadStatus::Closed;
      if (rc == 0) continue;
      const ssize_t n = ::recv(sock_.fd(), buf, sizeof buf, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        closed_ = true;
        continue;
      }
      assembler_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
    }
    out = *assembler_.next();
    return ReadStatus::Frame;
  }

  void shutdown() noexcept { sock_.shutdown(); }

 private:
  Socket sock_;
  std::mutex write_mu_;
  protocol::FrameAssembler assembler_;
  bool closed_ = false;
};

}  // namespace othello::net

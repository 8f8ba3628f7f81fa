// Copyright (c) 2026 The Datafarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "df/net.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/time.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "df/error.hpp"

namespace df {

namespace {

[[noreturn]] void fail_errno(const std::string& what) {
  fail(ErrorCode::kIoFailure, what + ": " + std::strerror(errno));
}

sockaddr_in resolve(const Addr& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  if (inet_pton(AF_INET, addr.host.c_str(), &sa.sin_addr) == 1) return sa;
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(addr.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr)
    fail(ErrorCode::kIoFailure, "cannot resolve host " + addr.host);
  sa.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return sa;
}

}  // namespace

Addr Addr::parse(std::string_view host_port) {
  auto colon = host_port.rfind(':');
  if (colon == std::string_view::npos)
    fail(ErrorCode::kInvalidArgument, "address must be HOST:PORT, got '" + std::string(host_port) + "'");
  Addr a;
  a.host = std::string(host_port.substr(0, colon));
  if (a.host.empty()) a.host = "127.0.0.1";
  uint64_t port = 0;
  for (char c : host_port.substr(colon + 1)) {
    if (c < '0' || c > '9') fail(ErrorCode::kInvalidArgument, "bad port in '" + std::string(host_port) + "'");
    port = port * 10 + static_cast<uint64_t>(c - '0');
  }
  if (port > 65535) fail(ErrorCode::kInvalidArgument, "port out of range");
  a.port = static_cast<uint16_t>(port);
  return a;
}

TcpConn::TcpConn(TcpConn&& other) noexcept : fd_(other.fd_), line_buf_(std::move(other.line_buf_)) {
  other.fd_ = -1;
}

TcpConn& TcpConn::operator=(TcpConn&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    line_buf_ = std::move(other.line_buf_);
    other.fd_ = -1;
  }
  return *this;
}

TcpConn::~TcpConn() { close(); }

TcpConn TcpConn::connect(const Addr& addr, double timeout_seconds) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail_errno("socket");
  sockaddr_in sa = resolve(addr);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
    int err = errno;
    ::close(fd);
    errno = err;
    fail_errno("connect to " + addr.str());
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  TcpConn conn(fd);
  if (timeout_seconds > 0) conn.set_timeout(timeout_seconds);
  return conn;
}

void TcpConn::send_all(std::string_view data) {
  size_t sent = 0;
  while (sent < data.size()) {
    ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail_errno("send");
    }
    sent += static_cast<size_t>(n);
  }
}

bool TcpConn::recv_exact(char* buf, size_t n) {
  size_t got = 0;
  // Drain buffered line bytes first so framed and line reads can mix.
  if (!line_buf_.empty()) {
    size_t take = std::min(n, line_buf_.size());
    std::memcpy(buf, line_buf_.data(), take);
    line_buf_.erase(0, take);
    got = take;
  }
  while (got < n) {
    ssize_t r = ::recv(fd_, buf + got, n - got, 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      fail_errno("recv");
    }
    if (r == 0) {
      if (got == 0) return false;
      fail(ErrorCode::kProtocol, "connection closed mid-message");
    }
    got += static_cast<size_t>(r);
  }
  return true;
}

std::optional<std::string> TcpConn::recv_line() {
  constexpr size_t kMaxLine = 16u << 20;
  for (;;) {
    auto nl = line_buf_.find('\n');
    if (nl != std::string::npos) {
      std::string line = line_buf_.substr(0, nl);
      line_buf_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    if (line_buf_.size() > kMaxLine) fail(ErrorCode::kProtocol, "line too long");
    char tmp[4096];
    ssize_t r = ::recv(fd_, tmp, sizeof(tmp), 0);
    if (r < 0) {
      if (errno == EINTR) continue;
      fail_errno("recv");
    }
    if (r == 0) {
      if (line_buf_.empty()) return std::nullopt;
      fail(ErrorCode::kProtocol, "connection closed mid-line");
    }
    line_buf_.append(tmp, static_cast<size_t>(r));
  }
}

void TcpConn::set_timeout(double seconds) {
  timeval tv{};
  tv.tv_sec = static_cast<time_t>(seconds);
  tv.tv_usec = static_cast<suseconds_t>((seconds - static_cast<double>(tv.tv_sec)) * 1e6);
  ::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof(tv));
  ::setsockopt(fd_, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof(tv));
}

void TcpConn::shutdown_both() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

void TcpConn::close() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TcpListener::TcpListener(TcpListener&& other) noexcept : fd_(other.fd_), addr_(other.addr_) {
  other.fd_ = -1;
}

TcpListener& TcpListener::operator=(TcpListener&& other) noexcept {
  if (this != &other) {
    close();
    fd_ = other.fd_;
    addr_ = other.addr_;
    other.fd_ = -1;
  }
  return *this;
}

TcpListener::~TcpListener() { close(); }

TcpListener TcpListener::bind(const Addr& addr) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) fail_errno("socket");
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in sa = resolve(addr);
  if (::bind(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
    int err = errno;
    ::close(fd);
    errno = err;
    fail_errno("bind " + addr.str());
  }
  if (::listen(fd, 128) != 0) {
    int err = errno;
    ::close(fd);
    errno = err;
    fail_errno("listen");
  }
  TcpListener l;
  l.fd_ = fd;
  l.addr_ = addr;
  socklen_t len = sizeof(sa);
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len) == 0)
    l.addr_.port = ntohs(sa.sin_port);
  return l;
}

std::optional<TcpConn> TcpListener::accept() {
  for (;;) {
    int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      int one = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
      return TcpConn(fd);
    }
    if (errno == EINTR) continue;
    return std::nullopt;  // listener closed
  }
}

void TcpListener::close() {
  if (fd_ >= 0) {
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    fd_ = -1;
  }
}

TcpServer::TcpServer(TcpListener listener, Handler handler)
    : listener_(std::move(listener)), handler_(std::move(handler)) {}

TcpServer::~TcpServer() { stop(); }

// Joins workers whose handlers have returned. Called with workers_mu_ held.
void TcpServer::reap_finished_locked() {
  for (uint64_t id : finished_) {
    for (auto it = workers_.begin(); it != workers_.end(); ++it) {
      if (it->id == id) {
        if (it->thread.joinable()) it->thread.join();
        workers_.erase(it);
        break;
      }
    }
  }
  finished_.clear();
}

void TcpServer::start() {
  accept_thread_ = std::thread([this] {
    while (!stopping_.load()) {
      auto conn = listener_.accept();
      if (!conn) break;
      auto shared = std::make_shared<TcpConn>(std::move(*conn));
      std::lock_guard<std::mutex> lock(workers_mu_);
      if (stopping_.load()) break;
      reap_finished_locked();
      uint64_t id = next_worker_id_++;
      Worker worker;
      worker.id = id;
      worker.conn = shared;
      worker.thread = std::thread([this, shared, id] {
        try {
          handler_(*shared);
        } catch (...) {
          // Connection handlers own their error reporting; a throw here
          // just drops the connection.
        }
        shared->close();
        std::lock_guard<std::mutex> lock(workers_mu_);
        finished_.push_back(id);
      });
      workers_.push_back(std::move(worker));
    }
  });
}

void TcpServer::stop() {
  if (stopping_.exchange(true)) return;
  listener_.close();
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<Worker> workers;
  {
    std::lock_guard<std::mutex> lock(workers_mu_);
    workers.swap(workers_);
    finished_.clear();
    for (auto& w : workers) w.conn->shutdown_both();
  }
  for (auto& w : workers)
    if (w.thread.joinable()) w.thread.join();
}

}  // namespace df

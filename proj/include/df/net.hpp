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

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace df {

struct Addr {
  std::string host = "127.0.0.1";
  uint16_t port = 0;

  static Addr parse(std::string_view host_port);
  std::string str() const { return host + ":" + std::to_string(port); }
};

// Connected stream socket, RAII over the fd. Movable, not copyable.
class TcpConn {
 public:
  TcpConn() = default;
  explicit TcpConn(int fd) : fd_(fd) {}
  TcpConn(TcpConn&& other) noexcept;
  TcpConn& operator=(TcpConn&& other) noexcept;
  TcpConn(const TcpConn&) = delete;
  TcpConn& operator=(const TcpConn&) = delete;
  ~TcpConn();

  static TcpConn connect(const Addr& addr, double timeout_seconds = 10.0);

  void send_all(std::string_view data);
  // Reads exactly n bytes. Returns false on clean EOF before the first byte;
  // throws on EOF mid-read or socket error.
  bool recv_exact(char* buf, size_t n);
  // Reads one '\n'-terminated line (terminator stripped, trailing '\r' too).
  // nullopt on clean EOF at a line boundary.
  std::optional<std::string> recv_line();

  void set_timeout(double seconds);
  void shutdown_both();
  void close();
  bool valid() const { return fd_ >= 0; }
  int fd() const { return fd_; }

 private:
  int fd_ = -1;
  std::string line_buf_;
};

class TcpListener {
 public:
  TcpListener() = default;
  TcpListener(TcpListener&& other) noexcept;
  TcpListener& operator=(TcpListener&& other) noexcept;
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener();

  // Binds and listens; port 0 picks an ephemeral port.
  static TcpListener bind(const Addr& addr);

  // nullopt once close() has been called.
  std::optional<TcpConn> accept();

  const Addr& addr() const { return addr_; }
  void close();

 private:
  int fd_ = -1;
  Addr addr_;
};

// Accept loop with one worker thread per connection. Handlers run until the
// peer disconnects; stop() closes the listener and joins everything.
class TcpServer {
 public:
  using Handler = std::function<void(TcpConn&)>;

  TcpServer(TcpListener listener, Handler handler);
  ~TcpServer();

  void start();
  void stop();
  const Addr& addr() const { return listener_.addr(); }

 private:
  struct Worker {
    uint64_t id;
    std::thread thread;
    std::shared_ptr<TcpConn> conn;
  };

  void reap_finished_locked();

  TcpListener listener_;
  Handler handler_;
  std::thread accept_thread_;
  std::mutex workers_mu_;
  std::vector<Worker> workers_;
  std::vector<uint64_t> finished_;
  uint64_t next_worker_id_ = 0;
  std::atomic<bool> stopping_{false};
};

}  // namespace df

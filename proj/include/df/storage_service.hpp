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

#include <memory>
#include <optional>

#include "df/net.hpp"
#include "df/storage.hpp"

namespace df {

// Data-plane message types. Frames are little-endian:
//   request:  { body_len u32, msg_type u8, body }
//   response: { body_len u32, status u8 (0 = ok, else ErrorCode), body }
enum class MsgType : uint8_t {
  kPut = 1,   // { lfn_len u16, lfn, index u32, size u64, payload } -> { size u64, crc u32 }
  kGet = 2,   // { lfn_len u16, lfn, index u32, offset u64, length u64 } -> payload
  kStat = 3,  // { lfn_len u16, lfn, index u32 } -> { size u64 }
  kCrc = 4,   // { lfn_len u16, lfn, index u32 } -> { crc u32 }
  kPing = 5,  // {} or { 0x01 } -> { free u64, write_bps u64, read_bps u64, flags u8 }
  kPull = 6,  // { lfn_len u16, lfn, index u32, src_addr_len u16, src_addr } -> { size u64, crc u32 }
};

// Storage-node daemon: serves the framed data plane over a listening socket
// and, when a catalog address is given, announces the node on startup.
class StorageService {
 public:
  StorageService(std::shared_ptr<StorageNode> node, const Addr& addr);
  ~StorageService();

  void start();
  void stop();
  const Addr& addr() const { return server_->addr(); }
  StorageNode& node() { return *node_; }

  // Registers this node with a catalog (NODES record).
  void announce(const Addr& catalog_addr);

 private:
  void handle_conn(TcpConn& conn);
  std::string handle_message(uint8_t msg_type, std::string_view body);

  std::shared_ptr<StorageNode> node_;
  std::unique_ptr<TcpServer> server_;
};

}  // namespace df

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

#include <mutex>
#include <optional>
#include <string>

#include "df/net.hpp"
#include "df/storage.hpp"
#include "df/storage_service.hpp"

namespace df {

struct PutResult {
  uint64_t size = 0;
  uint32_t crc32 = 0;
};

// Framed data-plane client for one storage node. Thread-safe; one request
// at a time per connection.
class NodeClient {
 public:
  explicit NodeClient(const Addr& addr, double timeout_seconds = 120.0);

  PutResult put(std::string_view lfn, uint32_t index, std::string_view payload);
  std::string get(std::string_view lfn, uint32_t index, uint64_t offset = 0, uint64_t length = 0);
  uint64_t stat(std::string_view lfn, uint32_t index);
  uint32_t crc(std::string_view lfn, uint32_t index);
  NodeHealth ping(bool self_test = false);
  PutResult pull(std::string_view lfn, uint32_t index, const std::string& src_addr);

 private:
  std::string request(MsgType type, std::string body);

  Addr addr_;
  double timeout_;
  std::mutex mu_;
  std::optional<TcpConn> conn_;
};

}  // namespace df

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

#include "df/catalog.hpp"
#include "df/net.hpp"

namespace df {

// Line-oriented control service over the catalog. One request line in, one
// response line out: `OK <payload>` or `ERR <code> <message>`.
//
//   REGISTER <lfn> <n> <frag>[;<frag>...]        frag = idx:size:crc:node=path
//   ADDREPLICA <lfn> <index> <node> <path> <crc>
//   RMREPLICA <lfn> <index> <node>
//   LOOKUP <lfn>
//   LIST <glob>
//   NODES                                        list registered nodes
//   NODES <id> <addr> <root> <rate> <up|down>    register/refresh a node
class CatalogService {
 public:
  CatalogService(Catalog& catalog, const Addr& addr);
  ~CatalogService();

  void start();
  void stop();
  const Addr& addr() const { return server_->addr(); }

  // Exposed for tests that drive a single request without a socket.
  std::string handle_line(const std::string& line);

 private:
  Catalog& catalog_;
  std::unique_ptr<TcpServer> server_;
};

}  // namespace df

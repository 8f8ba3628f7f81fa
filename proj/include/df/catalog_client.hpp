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
#include <vector>

#include "df/catalog.hpp"
#include "df/net.hpp"

namespace df {

// Client side of the catalog control protocol. Thread-safe; requests are
// serialized over one connection, reconnecting on demand.
class CatalogClient {
 public:
  explicit CatalogClient(const Addr& addr, double timeout_seconds = 30.0);

  LogicalFileEntry register_file(const std::string& lfn, const std::vector<FragmentMeta>& metas);
  LogicalFileEntry add_replica(const std::string& lfn, uint32_t index, const ReplicaLocation& loc);
  LogicalFileEntry remove_replica(const std::string& lfn, uint32_t index, const std::string& node_id);
  LogicalFileEntry lookup(const std::string& lfn);
  std::vector<LogicalFileEntry> list(const std::string& glob_pattern);
  std::vector<NodeInfo> nodes();
  void announce_node(const NodeInfo& node);

  const Addr& addr() const { return addr_; }

 private:
  std::string request(const std::string& line);

  Addr addr_;
  double timeout_;
  std::mutex mu_;
  std::optional<TcpConn> conn_;
};

}  // namespace df

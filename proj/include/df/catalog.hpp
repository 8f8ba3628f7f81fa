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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace df {

struct NodeInfo {
  std::string node_id;
  std::string address;       // host:port of the node's data plane
  std::string storage_root;  // node-local fragment root
  uint64_t rate_limit_bps = 0;  // 0 = unlimited
  bool up = true;
};

struct ReplicaLocation {
  std::string node_id;
  std::string path;  // node-local fragment path
  uint32_t crc32 = 0;
};

struct FragmentMeta {
  uint32_t index = 0;
  uint64_t size_bytes = 0;
  uint32_t crc32 = 0;
  std::vector<ReplicaLocation> replicas;
};

struct LogicalFileEntry {
  std::string lfn;
  uint32_t n_fragments = 0;
  uint64_t total_size = 0;
  std::vector<FragmentMeta> fragments;  // indexed 0..n_fragments-1
};

// Append-only mutation log: one record per line, percent-encoded fields
// separated by single spaces, a crc32 of the payload as the last field.
// A final line that is incomplete or fails its crc is a torn write and is
// dropped on replay; a malformed record anywhere else is CorruptRecord.
class CatalogLog {
 public:
  explicit CatalogLog(const std::filesystem::path& state_dir);
  ~CatalogLog();

  CatalogLog(const CatalogLog&) = delete;
  CatalogLog& operator=(const CatalogLog&) = delete;

  // Appends one record payload (no trailing newline) and fsyncs before
  // returning. The payload must not contain '\n'.
  void append(const std::string& payload);

  // All complete, valid record payloads in order.
  static std::vector<std::string> replay(const std::filesystem::path& state_dir);

  static std::filesystem::path log_path(const std::filesystem::path& state_dir);

 private:
  int fd_ = -1;
};

// Replica-tracking metadata catalog. Single logical writer: mutations
// serialize behind an exclusive lock and hit the log before they are
// visible; reads take a shared lock over a consistent snapshot.
class Catalog {
 public:
  // In-memory catalog without durability (used for replay comparisons and
  // embedded runs that do not need persistence).
  Catalog() = default;

  // Durable catalog: replays any existing log under state_dir, then appends
  // subsequent mutations to it.
  explicit Catalog(const std::filesystem::path& state_dir);

  LogicalFileEntry register_file(const std::string& lfn, std::vector<FragmentMeta> fragment_metas);
  LogicalFileEntry add_replica(const std::string& lfn, uint32_t index, const ReplicaLocation& location);
  LogicalFileEntry remove_replica(const std::string& lfn, uint32_t index, const std::string& node_id);
  LogicalFileEntry lookup(const std::string& lfn) const;
  std::vector<LogicalFileEntry> list_files(const std::string& glob_pattern) const;

  void upsert_node(const NodeInfo& node);
  std::vector<NodeInfo> nodes() const;
  std::optional<NodeInfo> find_node(const std::string& node_id) const;

  // Canonical text dump of the whole state; replay equivalence is defined as
  // equality of this serialization.
  std::string dump_canonical() const;

  size_t file_count() const;

 private:
  LogicalFileEntry apply_register(const std::string& lfn, std::vector<FragmentMeta> metas);
  LogicalFileEntry apply_add_replica(const std::string& lfn, uint32_t index, const ReplicaLocation& loc);
  LogicalFileEntry apply_remove_replica(const std::string& lfn, uint32_t index, const std::string& node_id);
  void apply_record(const std::string& payload);
  static void check_entry(const LogicalFileEntry& entry);

  mutable std::shared_mutex mu_;
  std::map<std::string, LogicalFileEntry> files_;
  std::map<std::string, NodeInfo> nodes_;
  std::unique_ptr<CatalogLog> log_;
};

}  // namespace df

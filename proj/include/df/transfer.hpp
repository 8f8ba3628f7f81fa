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
#include <string>
#include <vector>

#include "df/catalog.hpp"
#include "df/catalog_client.hpp"

namespace df {

struct TransferAssignment {
  uint32_t fragment_index = 0;
  ReplicaLocation source;
  std::string dest_node;
  bool no_op = false;  // destination already holds a replica
};

struct TransferPlan {
  std::string lfn;
  std::vector<TransferAssignment> assignments;
  uint32_t n_streams = 1;
  uint64_t chunk_bytes = 1 << 20;
};

struct StreamResult {
  uint32_t fragment_index = 0;
  std::string source_node;
  std::string dest_node;
  uint64_t bytes = 0;
  double seconds = 0.0;
  double bps = 0.0;
  bool ok = false;
  bool no_op = false;
  std::string error;
};

struct TransferReport {
  std::vector<StreamResult> per_stream;
  double aggregate_bps = 0.0;  // total bytes / wall
  double wall_seconds = 0.0;   // first start to last finish
  bool verified = false;       // every destination crc matched the catalog
};

// Round-robin fragments over dest_nodes by index; the source replica for
// each fragment is the one on the least-loaded source so far (ties by
// lexicographic node_id). Fragments already replicated on their assigned
// destination become no-ops.
TransferPlan plan_replication(const LogicalFileEntry& entry,
                              const std::vector<std::string>& dest_nodes, uint32_t n_streams,
                              uint64_t chunk_bytes = 1 << 20);

// Executes plans with destination-pull streams and verifies fragments
// against catalog checksums before registering new replicas.
class TransferEngine {
 public:
  explicit TransferEngine(CatalogClient& catalog);

  // Runs at most plan.n_streams concurrent pulls; each failed fragment is
  // retried once and then reported failed. Blocks until all streams settle.
  TransferReport execute(const TransferPlan& plan);

  // True iff every fragment of lfn has a replica on one of node_set whose
  // stored bytes re-hash to the catalog crc32.
  bool verify(const std::string& lfn, const std::vector<std::string>& node_set);

 private:
  CatalogClient& catalog_;
};

}  // namespace df

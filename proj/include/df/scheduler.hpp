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
#include <map>
#include <string>
#include <vector>

#include "df/catalog.hpp"

namespace df {

struct Task {
  uint64_t task_id = 0;
  std::string lfn;
  uint32_t fragment_index = 0;
  uint64_t est_bytes = 0;
};

enum class Locality { kLocal, kRemote };

struct Assignment {
  uint64_t task_id = 0;
  std::string node_id;
  Locality locality = Locality::kRemote;
};

// Snapshot of who holds what: (lfn, fragment_index) -> node ids.
class ReplicaView {
 public:
  ReplicaView() = default;
  explicit ReplicaView(const std::vector<LogicalFileEntry>& entries);

  void add(const std::string& lfn, uint32_t index, const std::string& node_id);
  const std::vector<std::string>& holders(const std::string& lfn, uint32_t index) const;

 private:
  std::map<std::pair<std::string, uint32_t>, std::vector<std::string>> holders_;
  std::vector<std::string> empty_;
};

struct SchedNode {
  std::string node_id;
  bool up = true;
};

// File-affinity assignment: a task lands on an up node holding a replica of
// its fragment whenever one exists (locality = local), choosing the eligible
// node with the smallest assigned-byte total so far (ties by node_id).
// Tasks with no live holder go to the globally least-loaded node as remote.
std::vector<Assignment> assign(const std::vector<Task>& tasks, const ReplicaView& replicas,
                               const std::vector<SchedNode>& nodes);

struct CompletionEstimate {
  double wall_seconds = 0.0;
  double aggregate_bps = 0.0;
};

// Barrier model: the slowest node sets the wall clock.
//   wall = max over nodes of assigned_bytes / rate
//   aggregate = total_bytes / wall
CompletionEstimate predict_completion(const std::map<std::string, uint64_t>& bytes_by_node,
                                      const std::map<std::string, double>& rate_by_node);
CompletionEstimate predict_completion(const std::vector<Task>& tasks,
                                      const std::vector<Assignment>& assignments,
                                      const std::map<std::string, double>& rate_by_node);

struct NodeRate {
  std::string node_id;
  uint64_t bytes = 0;
  double seconds = 0.0;
  double bps = 0.0;
};

struct StragglerReport {
  std::vector<NodeRate> per_node;
  double median_bps = 0.0;
  std::vector<std::string> stragglers;  // bps < threshold_fraction * median
  double threshold_fraction = 0.5;
};

StragglerReport detect_stragglers(const std::vector<NodeRate>& per_node,
                                  double threshold_fraction = 0.5);

}  // namespace df

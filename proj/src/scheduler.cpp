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

#include "df/scheduler.hpp"

#include <algorithm>

#include "df/error.hpp"

namespace df {

ReplicaView::ReplicaView(const std::vector<LogicalFileEntry>& entries) {
  for (const auto& entry : entries)
    for (const auto& frag : entry.fragments)
      for (const auto& rep : frag.replicas) add(entry.lfn, frag.index, rep.node_id);
}

void ReplicaView::add(const std::string& lfn, uint32_t index, const std::string& node_id) {
  auto& v = holders_[{lfn, index}];
  if (std::find(v.begin(), v.end(), node_id) == v.end()) v.push_back(node_id);
}

const std::vector<std::string>& ReplicaView::holders(const std::string& lfn, uint32_t index) const {
  auto it = holders_.find({lfn, index});
  return it == holders_.end() ? empty_ : it->second;
}

std::vector<Assignment> assign(const std::vector<Task>& tasks, const ReplicaView& replicas,
                               const std::vector<SchedNode>& nodes) {
  std::vector<const SchedNode*> up;
  for (const auto& n : nodes)
    if (n.up) up.push_back(&n);
  if (up.empty()) fail(ErrorCode::kNoNodesAvailable, "no nodes up");

  std::map<std::string, uint64_t> load;
  for (const auto* n : up) load[n->node_id] = 0;

  auto pick_least_loaded = [&](const std::vector<std::string>& candidates) -> const std::string& {
    const std::string* best = nullptr;
    for (const auto& id : candidates) {
      auto it = load.find(id);
      if (it == load.end()) continue;  // not an up node
      if (!best || it->second < load[*best] || (it->second == load[*best] && id < *best))
        best = &id;
    }
    if (!best) fail(ErrorCode::kNoNodesAvailable, "no eligible node");
    return *best;
  };

  std::vector<std::string> all_ids;
  for (const auto* n : up) all_ids.push_back(n->node_id);
  std::sort(all_ids.begin(), all_ids.end());

  std::vector<Assignment> out;
  out.reserve(tasks.size());
  for (const auto& task : tasks) {
    const auto& holders = replicas.holders(task.lfn, task.fragment_index);
    std::vector<std::string> eligible;
    for (const auto& h : holders)
      if (load.count(h)) eligible.push_back(h);

    Assignment a;
    a.task_id = task.task_id;
    if (!eligible.empty()) {
      a.node_id = pick_least_loaded(eligible);
      a.locality = Locality::kLocal;
    } else {
      a.node_id = pick_least_loaded(all_ids);
      a.locality = Locality::kRemote;
    }
    load[a.node_id] += task.est_bytes;
    out.push_back(std::move(a));
  }
  return out;
}

CompletionEstimate predict_completion(const std::map<std::string, uint64_t>& bytes_by_node,
                                      const std::map<std::string, double>& rate_by_node) {
  CompletionEstimate est;
  uint64_t total = 0;
  for (const auto& [node, bytes] : bytes_by_node) {
    auto it = rate_by_node.find(node);
    if (it == rate_by_node.end() || it->second <= 0.0)
      fail(ErrorCode::kZeroRate, "node '" + node + "' has no positive rate");
    est.wall_seconds = std::max(est.wall_seconds, static_cast<double>(bytes) / it->second);
    total += bytes;
  }
  if (est.wall_seconds > 0.0) est.aggregate_bps = static_cast<double>(total) / est.wall_seconds;
  return est;
}

CompletionEstimate predict_completion(const std::vector<Task>& tasks,
                                      const std::vector<Assignment>& assignments,
                                      const std::map<std::string, double>& rate_by_node) {
  std::map<uint64_t, const Task*> by_id;
  for (const auto& t : tasks) by_id[t.task_id] = &t;
  std::map<std::string, uint64_t> bytes_by_node;
  for (const auto& a : assignments) {
    auto it = by_id.find(a.task_id);
    if (it == by_id.end()) fail(ErrorCode::kInvalidArgument, "assignment for unknown task");
    bytes_by_node[a.node_id] += it->second->est_bytes;
  }
  return predict_completion(bytes_by_node, rate_by_node);
}

StragglerReport detect_stragglers(const std::vector<NodeRate>& per_node, double threshold_fraction) {
  if (per_node.empty()) fail(ErrorCode::kInvalidArgument, "no node results");
  if (threshold_fraction <= 0.0 || threshold_fraction >= 1.0)
    fail(ErrorCode::kInvalidArgument, "threshold_fraction must be in (0, 1)");

  StragglerReport report;
  report.per_node = per_node;
  report.threshold_fraction = threshold_fraction;

  std::vector<double> rates;
  rates.reserve(per_node.size());
  for (const auto& n : per_node) rates.push_back(n.bps);
  std::sort(rates.begin(), rates.end());
  size_t mid = rates.size() / 2;
  report.median_bps =
      rates.size() % 2 ? rates[mid] : (rates[mid - 1] + rates[mid]) / 2.0;

  double cutoff = threshold_fraction * report.median_bps;
  for (const auto& n : per_node)
    if (n.bps < cutoff) report.stragglers.push_back(n.node_id);
  return report;
}

}  // namespace df

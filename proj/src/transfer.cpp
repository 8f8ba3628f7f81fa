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

#include "df/transfer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <map>
#include <mutex>
#include <thread>

#include "df/bytes.hpp"
#include "df/node_client.hpp"
#include "df/storage.hpp"

namespace df {

TransferPlan plan_replication(const LogicalFileEntry& entry,
                              const std::vector<std::string>& dest_nodes, uint32_t n_streams,
                              uint64_t chunk_bytes) {
  if (dest_nodes.empty()) fail(ErrorCode::kNoDestination, "no destination nodes");
  if (entry.fragments.empty()) fail(ErrorCode::kEmptyFragmentSet, "entry has no fragments");

  TransferPlan plan;
  plan.lfn = entry.lfn;
  plan.chunk_bytes = chunk_bytes ? chunk_bytes : (1 << 20);

  std::map<std::string, uint32_t> source_load;
  for (const auto& frag : entry.fragments) {
    TransferAssignment a;
    a.fragment_index = frag.index;
    a.dest_node = dest_nodes[frag.index % dest_nodes.size()];

    for (const auto& rep : frag.replicas)
      if (rep.node_id == a.dest_node) a.no_op = true;

    // Least-loaded source so far, ties by lexicographic node_id.
    const ReplicaLocation* best = nullptr;
    for (const auto& rep : frag.replicas) {
      if (!best) {
        best = &rep;
        continue;
      }
      uint32_t load = source_load[rep.node_id];
      uint32_t best_load = source_load[best->node_id];
      if (load < best_load || (load == best_load && rep.node_id < best->node_id)) best = &rep;
    }
    a.source = *best;
    if (!a.no_op) ++source_load[a.source.node_id];
    plan.assignments.push_back(std::move(a));
  }

  uint32_t active = 0;
  for (const auto& a : plan.assignments)
    if (!a.no_op) ++active;
  plan.n_streams = std::max<uint32_t>(1, std::min<uint32_t>(n_streams, std::max<uint32_t>(active, 1)));
  return plan;
}

TransferEngine::TransferEngine(CatalogClient& catalog) : catalog_(catalog) {}

TransferReport TransferEngine::execute(const TransferPlan& plan) {
  LogicalFileEntry entry = catalog_.lookup(plan.lfn);

  std::map<std::string, NodeInfo> node_table;
  for (const auto& n : catalog_.nodes()) node_table[n.node_id] = n;
  auto node_of = [&](const std::string& id) -> const NodeInfo& {
    auto it = node_table.find(id);
    if (it == node_table.end()) fail(ErrorCode::kUnknownNode, "node '" + id + "' not registered");
    return it->second;
  };

  TransferReport report;
  report.per_stream.resize(plan.assignments.size());
  std::atomic<size_t> next{0};
  std::mutex catalog_mu;
  std::atomic<bool> all_verified{true};

  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();

  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= plan.assignments.size()) return;
      const TransferAssignment& a = plan.assignments[i];
      StreamResult& res = report.per_stream[i];
      res.fragment_index = a.fragment_index;
      res.source_node = a.source.node_id;
      res.dest_node = a.dest_node;
      res.no_op = a.no_op;
      if (a.no_op) {
        res.ok = true;
        continue;
      }

      const uint32_t want_crc = entry.fragments[a.fragment_index].crc32;
      auto started = clock::now();
      std::string last_error;
      for (int attempt = 0; attempt < 2 && !res.ok; ++attempt) {
        try {
          const NodeInfo& src = node_of(a.source.node_id);
          const NodeInfo& dst = node_of(a.dest_node);
          NodeClient dest(Addr::parse(dst.address));
          PutResult pulled = dest.pull(plan.lfn, a.fragment_index, src.address);
          if (pulled.crc32 != want_crc)
            fail(ErrorCode::kChecksumMismatch,
                 "fragment " + std::to_string(a.fragment_index) + " arrived with crc " +
                     hex_u32(pulled.crc32) + ", catalog has " + hex_u32(want_crc));
          // Verified; only now does the replica enter the catalog.
          ReplicaLocation loc;
          loc.node_id = a.dest_node;
          loc.path = StorageNode::fragment_path(dst.storage_root, plan.lfn, a.fragment_index).string();
          loc.crc32 = pulled.crc32;
          {
            std::lock_guard<std::mutex> lock(catalog_mu);
            catalog_.add_replica(plan.lfn, a.fragment_index, loc);
          }
          res.bytes = pulled.size;
          res.ok = true;
        } catch (const std::exception& e) {
          last_error = e.what();
        }
      }
      res.seconds = std::chrono::duration<double>(clock::now() - started).count();
      if (res.seconds > 0.0 && res.ok) res.bps = static_cast<double>(res.bytes) / res.seconds;
      if (!res.ok) {
        res.error = last_error;
        all_verified.store(false);
      }
    }
  };

  std::vector<std::thread> streams;
  for (uint32_t s = 0; s < plan.n_streams; ++s) streams.emplace_back(worker);
  for (auto& t : streams) t.join();

  report.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
  uint64_t total = 0;
  for (const auto& r : report.per_stream) total += r.bytes;
  if (report.wall_seconds > 0.0)
    report.aggregate_bps = static_cast<double>(total) / report.wall_seconds;
  report.verified = all_verified.load();
  return report;
}

bool TransferEngine::verify(const std::string& lfn, const std::vector<std::string>& node_set) {
  LogicalFileEntry entry = catalog_.lookup(lfn);
  std::map<std::string, NodeInfo> node_table;
  for (const auto& n : catalog_.nodes()) node_table[n.node_id] = n;

  for (const auto& frag : entry.fragments) {
    bool ok = false;
    for (const auto& node_id : node_set) {
      bool holds = false;
      for (const auto& rep : frag.replicas)
        if (rep.node_id == node_id) holds = true;
      if (!holds) continue;
      auto it = node_table.find(node_id);
      if (it == node_table.end()) continue;
      try {
        NodeClient client(Addr::parse(it->second.address));
        if (client.crc(lfn, frag.index) == frag.crc32) {
          ok = true;
          break;
        }
      } catch (const std::exception&) {
        // unreachable or missing fragment: this holder does not count
      }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace df

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

#include "df/bench.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "df/error.hpp"
#include "df/memstream.hpp"
#include "df/node_client.hpp"
#include "df/storage.hpp"

namespace df {

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

constexpr uint64_t kGenBatch = 128;  // events serialized per generation step

// Local-or-remote fragment I/O for one node.
struct NodeIo {
  std::string node_id;
  std::string storage_root;
  StorageNode* local = nullptr;
  std::shared_ptr<NodeClient> remote;

  FragmentMeta put(const std::string& lfn, uint32_t index, const std::string& bytes) {
    if (local) return local->put_fragment(lfn, index, bytes, /*overwrite=*/true);
    PutResult r = remote->put(lfn, index, bytes);
    FragmentMeta meta;
    meta.index = index;
    meta.size_bytes = r.size;
    meta.crc32 = r.crc32;
    meta.replicas.push_back(
        {node_id, StorageNode::fragment_path(storage_root, lfn, index).string(), r.crc32});
    return meta;
  }

  std::string get(const std::string& lfn, uint32_t index) {
    if (local) return local->get_fragment(lfn, index);
    return remote->get(lfn, index);
  }
};

struct WorkerSlot {
  NodeIo io;
  uint64_t bytes = 0;
  double seconds = 0.0;
  clock_type::time_point finish;
  EventFileStats stats;
  std::string error;
  bool failed = false;
};

}  // namespace

std::unique_ptr<BenchRunner> BenchRunner::embedded(uint32_t n_nodes,
                                                   const std::vector<uint64_t>& rate_limits,
                                                   const fs::path& base_dir) {
  auto runner = std::unique_ptr<BenchRunner>(new BenchRunner());
  EmbeddedClusterOptions opts;
  opts.n_nodes = n_nodes;
  opts.rate_limits_bps = rate_limits;
  opts.base_dir = base_dir;
  runner->cluster_ = std::make_unique<EmbeddedCluster>(std::move(opts));
  runner->catalog_ = runner->cluster_->make_catalog_client();
  return runner;
}

std::unique_ptr<BenchRunner> BenchRunner::attached(const Addr& catalog_addr) {
  auto runner = std::unique_ptr<BenchRunner>(new BenchRunner());
  runner->catalog_ = std::make_unique<CatalogClient>(catalog_addr);
  return runner;
}

BenchRunner::~BenchRunner() = default;

BenchReport BenchRunner::run(const BenchConfig& config) {
  if (!config.node_rate_bps.empty() && config.node_rate_bps.size() != config.n_nodes)
    fail(ErrorCode::kInvalidArgument, "rates list does not match n_nodes");
  return config.mode == BenchConfig::Mode::kWrite ? run_write(config) : run_read(config);
}

namespace {

// Resolve the first n_nodes node ids (sorted) to I/O handles.
std::vector<NodeIo> resolve_nodes(EmbeddedCluster* cluster, CatalogClient& catalog,
                                  uint32_t n_nodes) {
  std::vector<NodeIo> out;
  if (cluster) {
    if (n_nodes > cluster->n_nodes())
      fail(ErrorCode::kNoNodesAvailable, "cluster has " + std::to_string(cluster->n_nodes()) +
                                             " nodes, bench wants " + std::to_string(n_nodes));
    for (uint32_t i = 0; i < n_nodes; ++i) {
      NodeIo io;
      io.node_id = cluster->node_id(i);
      io.storage_root = cluster->node(i).config().root.string();
      io.local = &cluster->node(i);
      out.push_back(std::move(io));
    }
    return out;
  }
  auto nodes = catalog.nodes();
  std::sort(nodes.begin(), nodes.end(),
            [](const NodeInfo& a, const NodeInfo& b) { return a.node_id < b.node_id; });
  for (const auto& n : nodes) {
    if (out.size() == n_nodes) break;
    if (!n.up) continue;
    NodeIo io;
    io.node_id = n.node_id;
    io.storage_root = n.storage_root;
    io.remote = std::make_shared<NodeClient>(Addr::parse(n.address));
    out.push_back(std::move(io));
  }
  if (out.size() != n_nodes)
    fail(ErrorCode::kNoNodesAvailable, "catalog lists only " + std::to_string(out.size()) +
                                           " up nodes, bench wants " + std::to_string(n_nodes));
  return out;
}

BenchReport finalize_report(const BenchConfig& config, std::vector<WorkerSlot>& slots,
                            clock_type::time_point t0) {
  BenchReport report;
  report.config = config;

  clock_type::time_point last = t0;
  for (auto& slot : slots) {
    if (slot.failed)
      fail(ErrorCode::kPartialFailure, "node " + slot.io.node_id + ": " + slot.error);
    BenchNodeResult r;
    r.node_id = slot.io.node_id;
    r.bytes = slot.bytes;
    r.seconds = slot.seconds;
    r.bps = slot.seconds > 0 ? static_cast<double>(slot.bytes) / slot.seconds : 0.0;
    report.per_node.push_back(r);
    report.event_stats.n_events += slot.stats.n_events;
    report.event_stats.bytes_raw += slot.stats.bytes_raw;
    report.event_stats.bytes_compressed += slot.stats.bytes_compressed;
    last = std::max(last, slot.finish);
  }
  report.event_stats.mean_event_bytes =
      report.event_stats.n_events
          ? static_cast<double>(report.event_stats.bytes_compressed) / report.event_stats.n_events
          : 0.0;
  report.wall_seconds = std::chrono::duration<double>(last - t0).count();
  uint64_t total = 0;
  for (const auto& r : report.per_node) total += r.bytes;
  if (report.wall_seconds > 0)
    report.aggregate_bps = static_cast<double>(total) / report.wall_seconds;

  std::vector<NodeRate> rates;
  for (const auto& r : report.per_node) rates.push_back({r.node_id, r.bytes, r.seconds, r.bps});
  report.stragglers = detect_stragglers(rates, 0.5);
  return report;
}

}  // namespace

BenchReport BenchRunner::run_write(const BenchConfig& config) {
  auto ios = resolve_nodes(cluster_.get(), *catalog_, config.n_nodes);

  std::vector<WorkerSlot> slots(config.n_nodes);
  for (uint32_t i = 0; i < config.n_nodes; ++i) slots[i].io = std::move(ios[i]);
  std::vector<FragmentMeta> metas(config.n_nodes);

  // Generation and serialization happen before the barrier; the measured
  // interval covers only the throttled write of the finished fragment.
  std::barrier sync(static_cast<std::ptrdiff_t>(config.n_nodes) + 1);
  std::atomic<bool> abort_run{false};
  clock_type::time_point t0;

  auto worker = [&](uint32_t index) {
    WorkerSlot& slot = slots[index];
    std::string buffer;
    try {
      omemstream sink;
      EventFileWriter writer(sink, config.codec, config.events_per_block);
      SyntheticEventSource source(config.seed + index, config.hits_per_event, config.quantize_bits,
                                  static_cast<uint64_t>(index) * config.events_per_node);
      uint64_t remaining = config.events_per_node;
      while (remaining > 0) {
        uint64_t n = std::min(remaining, kGenBatch);
        auto events = source.take(n);
        writer.append(std::span<const EventRecord>(events));
        remaining -= n;
      }
      slot.stats = writer.finish();
      buffer = sink.take();
    } catch (const std::exception& e) {
      slot.failed = true;
      slot.error = e.what();
      abort_run.store(true);
    }
    sync.arrive_and_wait();  // barrier: writes start together
    if (slot.failed || abort_run.load()) {
      slot.finish = clock_type::now();
      return;
    }
    auto start = clock_type::now();
    try {
      metas[index] = slot.io.put(config.lfn, index, buffer);
      slot.bytes = buffer.size();
    } catch (const std::exception& e) {
      slot.failed = true;
      slot.error = e.what();
    }
    slot.finish = clock_type::now();
    slot.seconds = std::chrono::duration<double>(slot.finish - start).count();
  };

  std::vector<std::thread> threads;
  for (uint32_t i = 0; i < config.n_nodes; ++i) threads.emplace_back(worker, i);
  sync.arrive_and_wait();
  t0 = clock_type::now();
  for (auto& t : threads) t.join();

  for (const auto& slot : slots)
    if (slot.failed) fail(ErrorCode::kPartialFailure, "node " + slot.io.node_id + ": " + slot.error);

  // All fragments registered as one logical file.
  catalog_->register_file(config.lfn, metas);
  return finalize_report(config, slots, t0);
}

BenchReport BenchRunner::run_read(const BenchConfig& config) {
  LogicalFileEntry entry;
  try {
    entry = catalog_->lookup(config.lfn);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kUnknownFile)
      fail(ErrorCode::kNotFound, "no bench file '" + config.lfn + "'; run a write bench first");
    throw;
  }
  if (entry.n_fragments != config.n_nodes)
    fail(ErrorCode::kInvalidArgument,
         "bench file has " + std::to_string(entry.n_fragments) + " fragments, config expects " +
             std::to_string(config.n_nodes));

  auto ios = resolve_nodes(cluster_.get(), *catalog_, config.n_nodes);
  std::map<std::string, uint32_t> io_by_node;
  for (uint32_t i = 0; i < ios.size(); ++i) io_by_node[ios[i].node_id] = i;

  // File-affinity assignment; with one local fragment per node this must
  // come out all-local.
  std::vector<Task> tasks;
  for (const auto& frag : entry.fragments)
    tasks.push_back({frag.index, config.lfn, frag.index, frag.size_bytes});
  std::vector<SchedNode> sched_nodes;
  for (const auto& io : ios) sched_nodes.push_back({io.node_id, true});
  ReplicaView view({entry});
  auto assignments = assign(tasks, view, sched_nodes);

  struct NodeWork {
    std::vector<uint32_t> fragment_indices;
  };
  std::vector<NodeWork> work(config.n_nodes);
  for (const auto& a : assignments) {
    auto it = io_by_node.find(a.node_id);
    if (it == io_by_node.end())
      fail(ErrorCode::kNoNodesAvailable, "assignment to unknown node " + a.node_id);
    work[it->second].fragment_indices.push_back(static_cast<uint32_t>(a.task_id));
  }

  std::vector<WorkerSlot> slots(config.n_nodes);
  for (uint32_t i = 0; i < config.n_nodes; ++i) slots[i].io = std::move(ios[i]);

  std::barrier sync(static_cast<std::ptrdiff_t>(config.n_nodes) + 1);
  clock_type::time_point t0;

  auto worker = [&](uint32_t index) {
    WorkerSlot& slot = slots[index];
    sync.arrive_and_wait();
    auto start = clock_type::now();
    std::vector<std::string> buffers;
    try {
      for (uint32_t frag : work[index].fragment_indices) {
        buffers.push_back(slot.io.get(config.lfn, frag));
        slot.bytes += buffers.back().size();
      }
    } catch (const std::exception& e) {
      slot.failed = true;
      slot.error = e.what();
    }
    slot.finish = clock_type::now();
    slot.seconds = std::chrono::duration<double>(slot.finish - start).count();
    if (slot.failed) return;

    // Decode after the measured interval; the event payload still gets
    // fully verified.
    try {
      for (size_t b = 0; b < buffers.size(); ++b) {
        uint32_t frag = work[index].fragment_indices[b];
        imemstream in(buffers[b]);
        EventFileReader reader(in);
        if (config.verify_events) {
          auto events = reader.read({});
          SyntheticEventSource source(config.seed + frag, config.hits_per_event,
                                      config.quantize_bits,
                                      static_cast<uint64_t>(frag) * config.events_per_node);
          auto expected = source.take(config.events_per_node);
          if (events.size() != expected.size())
            fail(ErrorCode::kCrcMismatch, "decoded event count mismatch");
          for (size_t e = 0; e < events.size(); ++e)
            if (!(events[e] == expected[e]))
              fail(ErrorCode::kCrcMismatch,
                   "decoded event " + std::to_string(events[e].event_id) +
                       " differs from generated");
        } else {
          auto scanned = reader.scan({});
          if (scanned.n_events != reader.n_events())
            fail(ErrorCode::kCrcMismatch, "decoded event count disagrees with footer");
        }
        if (reader.n_events() != config.events_per_node)
          fail(ErrorCode::kCrcMismatch,
               "fragment " + std::to_string(frag) + " holds " + std::to_string(reader.n_events()) +
                   " events, expected " + std::to_string(config.events_per_node));
        slot.stats.n_events += reader.n_events();
        auto s = reader.stats();
        slot.stats.bytes_raw += s.bytes_raw;
        slot.stats.bytes_compressed += s.bytes_compressed;
      }
    } catch (const std::exception& e) {
      slot.failed = true;
      slot.error = e.what();
    }
  };

  std::vector<std::thread> threads;
  for (uint32_t i = 0; i < config.n_nodes; ++i) threads.emplace_back(worker, i);
  sync.arrive_and_wait();
  t0 = clock_type::now();
  for (auto& t : threads) t.join();

  return finalize_report(config, slots, t0);
}

void write_report_csv(const BenchReport& report, std::ostream& out) {
  out << "mode,n_nodes,node_id,bytes,seconds,bps,straggler,aggregate_bps,wall_seconds,"
         "compression_factor\n";
  const char* mode = report.config.mode == BenchConfig::Mode::kWrite ? "write" : "read";
  double factor = report.event_stats.bytes_compressed
                      ? compression_factor(report.event_stats)
                      : 0.0;
  auto is_straggler = [&](const std::string& id) {
    return std::find(report.stragglers.stragglers.begin(), report.stragglers.stragglers.end(),
                     id) != report.stragglers.stragglers.end();
  };
  for (const auto& r : report.per_node) {
    out << mode << ',' << report.config.n_nodes << ',' << r.node_id << ',' << r.bytes << ','
        << r.seconds << ',' << r.bps << ',' << (is_straggler(r.node_id) ? 1 : 0) << ','
        << report.aggregate_bps << ',' << report.wall_seconds << ',' << factor << '\n';
  }
  uint64_t total = 0;
  for (const auto& r : report.per_node) total += r.bytes;
  out << mode << ',' << report.config.n_nodes << ",aggregate," << total << ','
      << report.wall_seconds << ',' << report.aggregate_bps << ",0," << report.aggregate_bps << ','
      << report.wall_seconds << ',' << factor << '\n';
}

void append_series_point(const BenchReport& report, const fs::path& series_file) {
  struct Point {
    std::string mode;
    uint32_t n_nodes;
    double aggregate_bps;
  };
  std::vector<Point> points;
  std::ifstream in(series_file);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (line.rfind("mode,", 0) == 0) continue;
    }
    if (line.empty()) continue;
    std::istringstream ls(line);
    Point p;
    std::string n_nodes_s, bps_s;
    if (std::getline(ls, p.mode, ',') && std::getline(ls, n_nodes_s, ',') &&
        std::getline(ls, bps_s)) {
      p.n_nodes = static_cast<uint32_t>(std::stoul(n_nodes_s));
      p.aggregate_bps = std::stod(bps_s);
      points.push_back(std::move(p));
    }
  }
  in.close();

  points.push_back({report.config.mode == BenchConfig::Mode::kWrite ? "write" : "read",
                    report.config.n_nodes, report.aggregate_bps});
  std::stable_sort(points.begin(), points.end(),
                   [](const Point& a, const Point& b) { return a.n_nodes < b.n_nodes; });

  std::ofstream out(series_file, std::ios::trunc);
  if (!out.is_open())
    fail(ErrorCode::kIoFailure, "cannot write series file " + series_file.string());
  out << "mode,n_nodes,aggregate_bps\n";
  for (const auto& p : points)
    out << p.mode << ',' << p.n_nodes << ',' << p.aggregate_bps << '\n';
}

}  // namespace df

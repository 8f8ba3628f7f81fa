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

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "df/catalog_client.hpp"
#include "df/codec.hpp"
#include "df/embedded.hpp"
#include "df/eventio.hpp"
#include "df/scheduler.hpp"

namespace df {

struct BenchConfig {
  enum class Mode { kWrite, kRead };
  Mode mode = Mode::kWrite;
  uint32_t n_nodes = 1;
  uint64_t events_per_node = 100;
  uint32_t hits_per_event = 1000;
  uint32_t quantize_bits = 10;
  Codec codec = Codec::kDeflate;
  std::vector<uint64_t> node_rate_bps;  // per node; empty = unlimited
  uint64_t seed = 1;
  uint32_t events_per_block = 256;
  std::string lfn = "bench/events.gdf";
  // Read mode: re-generate from the seed and compare decoded events.
  bool verify_events = false;
};

struct BenchNodeResult {
  std::string node_id;
  uint64_t bytes = 0;
  double seconds = 0.0;
  double bps = 0.0;
};

struct BenchReport {
  BenchConfig config;
  std::vector<BenchNodeResult> per_node;
  double aggregate_bps = 0.0;
  double wall_seconds = 0.0;  // barrier: first start to last finish
  EventFileStats event_stats;
  StragglerReport stragglers;
};

// Drives write/read benchmarks over an embedded cluster or a running one.
// Worker timing covers the throttled fragment I/O; event generation and
// decoding run outside the measured interval.
class BenchRunner {
 public:
  // Embedded: spawns catalog + n_nodes daemons on loopback with roots under
  // base_dir (a fresh temp dir when empty).
  static std::unique_ptr<BenchRunner> embedded(uint32_t n_nodes,
                                               const std::vector<uint64_t>& rate_limits,
                                               const std::filesystem::path& base_dir = {});

  // Attached: use an already-running catalog; nodes come from its NODES
  // table (sorted by node_id, first n_nodes are used).
  static std::unique_ptr<BenchRunner> attached(const Addr& catalog_addr);

  ~BenchRunner();

  BenchReport run(const BenchConfig& config);

  EmbeddedCluster* cluster() { return cluster_.get(); }

 private:
  BenchRunner() = default;
  BenchReport run_write(const BenchConfig& config);
  BenchReport run_read(const BenchConfig& config);

  std::unique_ptr<EmbeddedCluster> cluster_;
  std::unique_ptr<CatalogClient> catalog_;
};

// CSV row per node plus one aggregate row:
//   mode,n_nodes,node_id,bytes,seconds,bps,straggler,aggregate_bps,wall_seconds,compression_factor
void write_report_csv(const BenchReport& report, std::ostream& out);

// Appends (mode, n_nodes, aggregate_bps) and rewrites the series sorted by
// n_nodes; the file plots aggregate throughput against node count.
void append_series_point(const BenchReport& report, const std::filesystem::path& series_file);

}  // namespace df

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

// Acceptance suite. Each criterion prints exactly one [PASS]/[FAIL] line;
// the process exits non-zero if any criterion fails.

#include <unistd.h>

#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "df/bench.hpp"
#include "df/bytes.hpp"
#include "df/catalog.hpp"
#include "df/embedded.hpp"
#include "df/eventio.hpp"
#include "df/memstream.hpp"
#include "df/schemac.hpp"
#include "df/scheduler.hpp"
#include "df/transfer.hpp"
#include "scheduler_oracle.hpp"

namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%s] %d. %s%s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void run_criterion(int number, const std::string& name,
                   const std::function<std::pair<bool, std::string>()>& body) {
  try {
    auto [pass, detail] = body();
    report(number, name, pass, detail);
  } catch (const std::exception& e) {
    report(number, name, false, std::string("exception: ") + e.what());
  }
}

fs::path fresh_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("df-acc-" + tag + "-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter.fetch_add(1)));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

bool within(double value, double target, double tolerance) {
  return value >= target * (1.0 - tolerance) && value <= target * (1.0 + tolerance);
}

bool hits_equal_bits(const df::Hit& a, const df::Hit& b) {
  return std::bit_cast<uint32_t>(a.edep_abs) == std::bit_cast<uint32_t>(b.edep_abs) &&
         std::bit_cast<uint32_t>(a.edep_gap) == std::bit_cast<uint32_t>(b.edep_gap) &&
         std::bit_cast<uint32_t>(a.track_len_abs) == std::bit_cast<uint32_t>(b.track_len_abs) &&
         std::bit_cast<uint32_t>(a.track_len_gap) == std::bit_cast<uint32_t>(b.track_len_gap);
}

bool events_equal_bits(const df::EventRecord& a, const df::EventRecord& b) {
  if (a.event_id != b.event_id || a.collections.size() != b.collections.size()) return false;
  for (size_t c = 0; c < a.collections.size(); ++c) {
    if (a.collections[c].detector_name != b.collections[c].detector_name) return false;
    if (a.collections[c].hits.size() != b.collections[c].hits.size()) return false;
    for (size_t h = 0; h < a.collections[c].hits.size(); ++h)
      if (!hits_equal_bits(a.collections[c].hits[h], b.collections[c].hits[h])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 1. Round-trip suite: 1,000 randomized events survive write->read
//    bit-exactly under every codec; runtime < 60 s.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_round_trip() {
  auto t0 = clock_type::now();
  std::mt19937 rng(20260808);
  std::mt19937 hit_rng(4242);

  std::vector<df::EventRecord> events;
  events.reserve(1000);
  uint32_t n_collections = 1 + rng() % 3;
  std::vector<std::string> names;
  for (uint32_t c = 0; c < n_collections; ++c) names.push_back("col" + std::to_string(c));
  for (uint64_t i = 0; i < 1000; ++i) {
    df::EventRecord e;
    e.event_id = i;
    for (uint32_t c = 0; c < n_collections; ++c) {
      df::HitCollection col;
      col.detector_name = names[c];
      uint32_t n_hits = rng() % 2001;
      col.hits.reserve(n_hits);
      for (uint32_t h = 0; h < n_hits; ++h) {
        auto f = [&] {
          // Arbitrary finite float32 bit patterns (exponent < 0xFF).
          uint32_t w = hit_rng();
          if (((w >> 23) & 0xFF) == 0xFF) w &= ~(1u << 30);
          return std::bit_cast<float>(w);
        };
        col.hits.push_back({f(), f(), f(), f()});
      }
      e.collections.push_back(std::move(col));
    }
    events.push_back(std::move(e));
  }

  for (auto codec : {df::Codec::kStored, df::Codec::kDeflate}) {
    df::omemstream sink;
    df::write_events(sink, events, codec, 64);
    std::string bytes = sink.take();
    df::imemstream in(bytes);
    auto back = df::read_events(in, {});
    if (back.size() != events.size())
      return {false, "event count mismatch under codec " + std::string(df::to_string(codec))};
    for (size_t i = 0; i < events.size(); ++i)
      if (!events_equal_bits(back[i], events[i]))
        return {false, "event " + std::to_string(i) + " differs under codec " +
                           std::string(df::to_string(codec))};
  }
  double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  if (secs >= 60.0) return {false, "runtime " + fmt(secs) + " s exceeds 60 s"};
  return {true, "1000 events x {stored, deflate} bit-exact in " + fmt(secs) + " s"};
}

// ---------------------------------------------------------------------------
// 2. Compression analog: deflate on 10,000 synthetic events at
//    quantize_bits=10 reaches factor >= 2.0 and the factor is monotone in
//    quantization; runtime < 120 s.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_compression() {
  auto t0 = clock_type::now();

  auto factor_for = [](uint32_t qbits, uint64_t n_events) {
    df::SyntheticEventSource source(1717, 1000, qbits);
    df::omemstream sink;
    df::EventFileWriter writer(sink, df::Codec::kDeflate, 256);
    uint64_t remaining = n_events;
    while (remaining > 0) {
      uint64_t n = std::min<uint64_t>(remaining, 256);
      auto batch = source.take(n);
      writer.append(std::span<const df::EventRecord>(batch));
      remaining -= n;
    }
    return df::compression_factor(writer.finish());
  };

  double f10 = factor_for(10, 10000);
  double f8 = factor_for(8, 2000);
  double f16 = factor_for(16, 2000);
  double f23 = factor_for(23, 2000);
  double secs = std::chrono::duration<double>(clock_type::now() - t0).count();

  std::string detail = "factor(q10, 10k events) = " + fmt(f10) + "; ordering " + fmt(f8) +
                       " >= " + fmt(f16) + " >= " + fmt(f23) + "; " + fmt(secs) + " s";
  if (f10 < 2.0) return {false, detail + " (needs >= 2.0)"};
  if (!(f8 >= f16 && f16 >= f23)) return {false, detail + " (ordering violated)"};
  if (secs >= 120.0) return {false, detail + " (over 120 s)"};
  return {true, detail};
}

// ---------------------------------------------------------------------------
// 3. Scaling shape analog: embedded bench, homogeneous 10 MiB/s limits,
//    N in {1,2,4,8,16}: read aggregate within 15% of N x 10 MiB/s for
//    N <= 8 and non-decreasing through 16; runtime < 10 min.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_scaling() {
  auto t0 = clock_type::now();
  const uint64_t limit = 10ull << 20;
  const std::vector<uint32_t> node_counts{1, 2, 4, 8, 16};

  std::vector<double> aggregates;
  for (uint32_t n : node_counts) {
    auto runner = df::BenchRunner::embedded(n, std::vector<uint64_t>(n, limit));
    df::BenchConfig config;
    config.n_nodes = n;
    config.events_per_node = 1200;  // ~9 MiB deflated per fragment
    config.hits_per_event = 1000;
    config.quantize_bits = 10;
    config.codec = df::Codec::kDeflate;
    config.seed = 31 + n;
    config.node_rate_bps.assign(n, limit);

    config.mode = df::BenchConfig::Mode::kWrite;
    runner->run(config);
    config.mode = df::BenchConfig::Mode::kRead;
    auto report = runner->run(config);
    aggregates.push_back(report.aggregate_bps);
  }

  std::string series;
  for (size_t i = 0; i < node_counts.size(); ++i) {
    series += "N=" + std::to_string(node_counts[i]) + ": " +
              fmt(aggregates[i] / (1 << 20)) + " MiB/s";
    if (i + 1 < node_counts.size()) series += ", ";
  }
  double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  series += " (" + fmt(secs) + " s)";

  for (size_t i = 0; i < node_counts.size(); ++i) {
    if (node_counts[i] > 8) continue;
    double target = static_cast<double>(node_counts[i]) * limit;
    if (!within(aggregates[i], target, 0.15))
      return {false, series + "; N=" + std::to_string(node_counts[i]) + " outside 15% of " +
                         fmt(target / (1 << 20)) + " MiB/s"};
  }
  for (size_t i = 1; i < aggregates.size(); ++i)
    if (aggregates[i] < aggregates[i - 1] * 0.98)
      return {false, series + "; aggregate decreased at N=" + std::to_string(node_counts[i])};
  if (secs >= 600.0) return {false, series + " (over 10 min)"};
  return {true, series};
}

// ---------------------------------------------------------------------------
// 4. Straggler drag: N=8 with one node at 2.5 MiB/s; measured aggregate
//    within 10% of the closed-form prediction; straggler detected at 0.5.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_straggler() {
  const uint64_t fast = 10ull << 20;
  const uint64_t slow_bps = (10ull << 20) / 4;  // 2.5 MiB/s
  std::vector<uint64_t> rates(8, fast);
  rates[5] = slow_bps;

  auto runner = df::BenchRunner::embedded(8, rates);
  df::BenchConfig config;
  config.n_nodes = 8;
  config.events_per_node = 900;
  config.hits_per_event = 1000;
  config.quantize_bits = 10;
  config.codec = df::Codec::kDeflate;
  config.seed = 97;
  config.node_rate_bps = rates;

  config.mode = df::BenchConfig::Mode::kWrite;
  runner->run(config);
  config.mode = df::BenchConfig::Mode::kRead;
  auto report = runner->run(config);

  // Closed-form barrier model fed with the actual fragment sizes.
  std::map<std::string, uint64_t> bytes_by_node;
  std::map<std::string, double> rate_by_node;
  for (size_t i = 0; i < report.per_node.size(); ++i) {
    bytes_by_node[report.per_node[i].node_id] = report.per_node[i].bytes;
    rate_by_node[report.per_node[i].node_id] = static_cast<double>(rates[i]);
  }
  auto predicted = df::predict_completion(bytes_by_node, rate_by_node);

  double ratio = report.aggregate_bps / predicted.aggregate_bps;
  bool flagged = report.stragglers.stragglers.size() == 1 &&
                 report.stragglers.stragglers[0] == "n5" &&
                 report.stragglers.threshold_fraction == 0.5;
  std::string detail = "measured " + fmt(report.aggregate_bps / (1 << 20)) +
                       " MiB/s vs predicted " + fmt(predicted.aggregate_bps / (1 << 20)) +
                       " MiB/s (ratio " + fmt(ratio) + "); stragglers=" +
                       std::to_string(report.stragglers.stragglers.size());
  if (!within(report.aggregate_bps, predicted.aggregate_bps, 0.10))
    return {false, detail + " (outside 10%)"};
  if (!flagged) return {false, detail + " (straggler not flagged as n5)"};
  return {true, detail};
}

// ---------------------------------------------------------------------------
// 5. Replication rate law: 8 x 8 MiB fragments over disjoint 10 MiB/s
//    pairs; aggregate within 15% of S x 10 MiB/s for S in {1,2,4} and
//    strictly increasing; post-transfer verify() is true; runtime < 5 min.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_replication() {
  auto t0 = clock_type::now();
  const uint64_t limit = 10ull << 20;
  const uint64_t frag_bytes = 8ull << 20;
  std::mt19937 rng(55);

  auto run_streams = [&](uint32_t streams) {
    // 4 sources (n0..n3) and 4 destinations (n4..n7); fragment i sits on
    // n{i%4} and lands on n{4+i%4}: disjoint pairs throughout.
    df::EmbeddedClusterOptions opts;
    opts.n_nodes = 8;
    opts.rate_limits_bps.assign(8, limit);
    opts.durable_catalog = false;
    df::EmbeddedCluster cluster(std::move(opts));
    auto catalog = cluster.make_catalog_client();

    std::string payload(frag_bytes, '\0');
    std::vector<df::FragmentMeta> metas;
    for (uint32_t i = 0; i < 8; ++i) {
      for (auto& c : payload) c = static_cast<char>(rng());
      // Seed the sources without throttling so setup stays quick.
      df::StorageConfig unmetered = cluster.node(i % 4).config();
      unmetered.rate_limit_bps = 0;
      df::StorageNode fast(unmetered);
      metas.push_back(fast.put_fragment("acc/rep", i, payload));
    }
    catalog->register_file("acc/rep", metas);
    auto entry = catalog->lookup("acc/rep");

    auto plan = df::plan_replication(entry, {"n4", "n5", "n6", "n7"}, streams);
    df::TransferEngine engine(*catalog);
    auto report = engine.execute(plan);
    bool verified = report.verified && engine.verify("acc/rep", {"n4", "n5", "n6", "n7"});
    return std::pair<double, bool>(report.aggregate_bps, verified);
  };

  std::vector<uint32_t> stream_counts{1, 2, 4};
  std::vector<double> aggregates;
  for (uint32_t s : stream_counts) {
    auto [bps, verified] = run_streams(s);
    if (!verified) return {false, "verify failed at S=" + std::to_string(s)};
    aggregates.push_back(bps);
  }

  double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
  std::string detail;
  for (size_t i = 0; i < stream_counts.size(); ++i)
    detail += "S=" + std::to_string(stream_counts[i]) + ": " +
              fmt(aggregates[i] / (1 << 20)) + " MiB/s" +
              (i + 1 < stream_counts.size() ? ", " : "");
  detail += " (" + fmt(secs) + " s)";

  for (size_t i = 0; i < stream_counts.size(); ++i) {
    double target = static_cast<double>(stream_counts[i]) * limit;
    if (!within(aggregates[i], target, 0.15))
      return {false, detail + "; S=" + std::to_string(stream_counts[i]) + " outside 15%"};
  }
  if (!(aggregates[0] < aggregates[1] && aggregates[1] < aggregates[2]))
    return {false, detail + "; aggregate not strictly increasing in S"};
  if (secs >= 300.0) return {false, detail + " (over 5 min)"};
  return {true, detail};
}

// ---------------------------------------------------------------------------
// 6. Catalog durability: >= 10,000 randomized operations with
//    kill-and-recover at random points; recovered state equals the replayed
//    prefix; torn final records tolerated.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_durability() {
  auto dir = fresh_dir("durability");
  std::mt19937 rng(808);

  df::Catalog durable{dir};
  df::Catalog shadow;  // independent in-memory oracle

  auto apply_both = [&](const std::function<void(df::Catalog&)>& op) {
    bool threw_a = false, threw_b = false;
    try {
      op(durable);
    } catch (const df::Error&) {
      threw_a = true;
    }
    try {
      op(shadow);
    } catch (const df::Error&) {
      threw_b = true;
    }
    if (threw_a != threw_b) throw std::runtime_error("durable/shadow divergence");
  };

  auto frag = [](uint32_t index, const std::string& node) {
    df::FragmentMeta f;
    f.index = index;
    f.size_bytes = 128;
    f.crc32 = 0x2000 + index;
    f.replicas.push_back({node, "/d/" + node + "/" + std::to_string(index), f.crc32});
    return f;
  };

  const int kOps = 12000;
  int recoveries = 0;
  std::vector<std::string> names;
  for (int i = 0; i < kOps; ++i) {
    int dice = static_cast<int>(rng() % 100);
    if (dice < 35 || names.empty()) {
      std::string lfn = "d" + std::to_string(rng() % 3000);
      uint32_t n = 1 + rng() % 3;
      std::vector<df::FragmentMeta> metas;
      for (uint32_t k = 0; k < n; ++k) metas.push_back(frag(k, "n" + std::to_string(rng() % 6)));
      apply_both([&](df::Catalog& c) { c.register_file(lfn, metas); });
      names.push_back(lfn);
    } else if (dice < 70) {
      const auto& lfn = names[rng() % names.size()];
      uint32_t idx = rng() % 3;
      std::string node = "r" + std::to_string(rng() % 4);
      apply_both([&](df::Catalog& c) {
        c.add_replica(lfn, idx, {node, "/r/" + node, 0x2000 + idx});
      });
    } else if (dice < 90) {
      const auto& lfn = names[rng() % names.size()];
      uint32_t idx = rng() % 3;
      std::string node = rng() % 2 ? "r" + std::to_string(rng() % 4)
                                   : "n" + std::to_string(rng() % 6);
      apply_both([&](df::Catalog& c) { c.remove_replica(lfn, idx, node); });
    } else {
      std::string id = "node" + std::to_string(rng() % 10);
      uint64_t rate = rng() % 1000;
      apply_both([&](df::Catalog& c) {
        c.upsert_node({id, "127.0.0.1:1", "/root", rate, true});
      });
    }

    // Kill-and-recover at random points: copy the log (the surviving disk
    // state) and replay it cold.
    if (rng() % 1000 < 8) {
      ++recoveries;
      auto snapshot_dir = fresh_dir("snap");
      fs::copy_file(df::CatalogLog::log_path(dir), df::CatalogLog::log_path(snapshot_dir),
                    fs::copy_options::overwrite_existing);
      df::Catalog recovered{snapshot_dir};
      if (recovered.dump_canonical() != shadow.dump_canonical())
        return {false, "recovered state diverged after " + std::to_string(i + 1) + " ops"};
      fs::remove_all(snapshot_dir);
    }
  }

  // Torn final record: the state before the last mutation must come back
  // when the last log line is cut in half.
  auto dump_before_last = shadow.dump_canonical();
  apply_both([&](df::Catalog& c) { c.register_file("torn/final", {frag(0, "n0")}); });

  auto log_path = df::CatalogLog::log_path(dir);
  std::string data;
  {
    std::ifstream in(log_path, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    data = buf.str();
  }
  auto last_nl = data.rfind('\n', data.size() - 2);
  auto torn_dir = fresh_dir("torn");
  {
    std::ofstream out(df::CatalogLog::log_path(torn_dir), std::ios::binary);
    out.write(data.data(), static_cast<std::streamsize>(last_nl + 1 + (data.size() - last_nl) / 2));
  }
  df::Catalog torn{torn_dir};
  if (torn.dump_canonical() != dump_before_last)
    return {false, "torn final record did not recover to the previous state"};

  // Full recovery equals the shadow state.
  df::Catalog recovered{dir};
  if (recovered.dump_canonical() != shadow.dump_canonical())
    return {false, "final recovery diverged"};

  return {true, std::to_string(kOps) + " ops, " + std::to_string(recoveries) +
                    " random recoveries, torn tail tolerated, " +
                    std::to_string(shadow.file_count()) + " files"};
}

// ---------------------------------------------------------------------------
// 7. Schemac golden suite: the bundled fixture compiles with zero errors and
//    byte-exact outputs; parse-print-parse holds on 200 fuzzed schemas.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_schemac() {
  const fs::path data_dir = DF_TEST_DATA_DIR;
  auto out_dir = fresh_dir("schemac");

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
  };

  auto result = df::schemac::compile(data_dir / "calorhit.rootio",
                                     {data_dir / "adapter.hh.tpl"}, out_dir);
  if (!result.ok) return {false, "fixture failed to compile"};
  if (df::schemac::has_errors(result.diagnostics)) return {false, "fixture produced errors"};
  for (const auto& d : result.diagnostics)
    if (d.severity == df::schemac::Diagnostic::Severity::kWarning)
      return {false, "fixture produced warnings: " + d.message};

  if (slurp(out_dir / "Pers01CalorHit.schema") !=
      slurp(data_dir / "golden" / "Pers01CalorHit.schema"))
    return {false, "descriptor differs from golden"};
  if (slurp(out_dir / "adapter.hh.Pers01CalorHit.out") !=
      slurp(data_dir / "golden" / "adapter.hh.Pers01CalorHit.out"))
    return {false, "rendered template differs from golden"};

  // 200 fuzzed valid schemas: parse(print(parse(text))) is a fixpoint.
  std::mt19937 rng(321);
  for (int round = 0; round < 200; ++round) {
    std::string text = "set class_name C" + std::to_string(round) + "\n";
    text += "set collection_class K" + std::to_string(round) + "\n";
    int n_scalars = rng() % 5;
    for (int i = 0; i < n_scalars; ++i)
      text += "set key" + std::to_string(rng() % 40) + " v" + std::to_string(rng() % 100) + " w\n";
    int n_blocks = 1 + rng() % 3;
    for (int b = 0; b < n_blocks; ++b) {
      text += "set blk" + std::to_string(rng() % 10) + "\n";
      int n_lines = rng() % 6;
      for (int l = 0; l < n_lines; ++l) {
        std::string line(rng() % 7, ' ');
        line += "@float@ f" + std::to_string(rng() % 30) + ";";
        if (rng() % 3 == 0) line += "  // note " + std::to_string(rng() % 9);
        text += line + "\n";
      }
      text += "..\n";
    }
    std::vector<df::schemac::Diagnostic> d1, d2;
    auto s1 = df::schemac::parse(text, "fuzz", d1);
    auto printed = df::schemac::print(s1);
    auto s2 = df::schemac::parse(printed, "fuzz", d2);
    if (!(s2 == s1)) return {false, "fixpoint violated on fuzz round " + std::to_string(round)};
    if (df::schemac::print(s2) != printed)
      return {false, "second print differs on fuzz round " + std::to_string(round)};
  }

  return {true, "golden descriptor + template byte-exact; 200 fuzzed fixpoints hold"};
}

// ---------------------------------------------------------------------------
// 8. Scheduler oracle: over instances with <= 5 nodes, <= 6 tasks,
//    <= 2 replicas/fragment, assign matches brute-force enumeration on the
//    locality-then-balance objective.
// ---------------------------------------------------------------------------
std::pair<bool, std::string> criterion_scheduler_oracle() {
  std::mt19937 rng(613);
  static const uint64_t kSizes[] = {1, 2, 3, 5, 8};
  const int kRounds = 3000;

  for (int round = 0; round < kRounds; ++round) {
    df_test::OracleInstance inst;
    uint32_t n_nodes = 1 + rng() % 5;
    for (uint32_t i = 0; i < n_nodes; ++i)
      inst.nodes.push_back({"n" + std::to_string(i), rng() % 6 != 0});
    bool any_up = false;
    for (auto& n : inst.nodes) any_up |= n.up;
    if (!any_up) inst.nodes[rng() % n_nodes].up = true;

    uint32_t n_tasks = 1 + rng() % 6;
    for (uint32_t t = 0; t < n_tasks; ++t) {
      df::Task task;
      task.task_id = t;
      task.lfn = "f" + std::to_string(rng() % 2);
      task.fragment_index = rng() % 4;
      task.est_bytes = kSizes[rng() % 5];
      auto& holders = inst.holders[{task.lfn, task.fragment_index}];
      uint32_t replicas = rng() % 3;
      while (holders.size() < replicas && holders.size() < n_nodes)
        holders.insert("n" + std::to_string(rng() % n_nodes));
      inst.tasks.push_back(std::move(task));
    }

    auto got = df::assign(inst.tasks, df_test::to_view(inst), inst.nodes);
    auto want = df_test::oracle_stepwise(inst);
    if (got.size() != want.size()) return {false, "size mismatch round " + std::to_string(round)};
    for (size_t i = 0; i < got.size(); ++i)
      if (got[i].node_id != want[i].node_id || got[i].locality != want[i].locality)
        return {false, "assignment differs from oracle on round " + std::to_string(round) +
                           ", task " + std::to_string(i)};

    size_t got_local = 0;
    for (const auto& a : got)
      if (a.locality == df::Locality::kLocal) ++got_local;
    if (got_local != df_test::oracle_max_local(inst))
      return {false, "locality not optimal on round " + std::to_string(round)};
  }
  return {true, std::to_string(kRounds) + " random instances match enumeration"};
}

}  // namespace

int main() {
  std::printf("acceptance suite\n");
  run_criterion(1, "event round-trip across codecs", criterion_round_trip);
  run_criterion(2, "compression factor analog", criterion_compression);
  run_criterion(3, "scaling shape analog", criterion_scaling);
  run_criterion(4, "straggler drag vs closed-form model", criterion_straggler);
  run_criterion(5, "replication rate law", criterion_replication);
  run_criterion(6, "catalog durability under kill-and-recover", criterion_durability);
  run_criterion(7, "schemac golden suite", criterion_schemac);
  run_criterion(8, "scheduler brute-force oracle", criterion_scheduler_oracle);

  if (g_failures) {
    std::printf("%d criterion(s) FAILED\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}

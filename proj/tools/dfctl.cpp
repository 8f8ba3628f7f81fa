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

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "df/crc32.hpp"

#include "df/bench.hpp"
#include "df/bytes.hpp"
#include "df/catalog.hpp"
#include "df/catalog_client.hpp"
#include "df/catalog_service.hpp"
#include "df/embedded.hpp"
#include "df/eventio.hpp"
#include "df/memstream.hpp"
#include "df/net.hpp"
#include "df/node_client.hpp"
#include "df/schemac.hpp"
#include "df/scheduler.hpp"
#include "df/storage.hpp"
#include "df/storage_service.hpp"
#include "df/transfer.hpp"

namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

void wait_for_signal() {
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop.load()) std::this_thread::sleep_for(std::chrono::milliseconds(200));
}

struct GlobalOpts {
  std::string catalog_addr;
  double timeout_seconds = 30.0;
  int verbosity = 0;
};

// key=value lines; blank lines and '#' comments ignored.
std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::map<std::string, std::string> out;
  std::ifstream in(path);
  if (!in.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot open config file " + path);
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto eq = line.find('=', first);
    if (eq == std::string::npos)
      df::fail(df::ErrorCode::kInvalidArgument, "config lines are key=value, got '" + line + "'");
    auto key = line.substr(first, eq - first);
    auto key_end = key.find_last_not_of(" \t");
    key = key.substr(0, key_end + 1);
    auto value = line.substr(eq + 1);
    auto vb = value.find_first_not_of(" \t");
    auto ve = value.find_last_not_of(" \t\r");
    value = vb == std::string::npos ? "" : value.substr(vb, ve - vb + 1);
    out[key] = value;
  }
  return out;
}

bool flag_on_command_line(const std::vector<std::string>& args, std::string_view name) {
  for (const auto& a : args)
    if (a == name || a.rfind(std::string(name) + "=", 0) == 0) return true;
  return false;
}

df::CatalogClient make_catalog_client(const GlobalOpts& g) {
  if (g.catalog_addr.empty())
    df::fail(df::ErrorCode::kInvalidArgument,
             "no catalog address; pass --catalog HOST:PORT or set DF_CATALOG");
  return df::CatalogClient(df::Addr::parse(g.catalog_addr), g.timeout_seconds);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  for (auto part : df::split(s, ','))
    if (!part.empty()) out.emplace_back(part);
  return out;
}

df::Codec parse_codec(const std::string& name) {
  auto codec = df::codec_from_name(name);
  if (!codec) df::fail(df::ErrorCode::kInvalidArgument, "unknown codec '" + name + "'");
  return *codec;
}

std::map<std::string, df::NodeInfo> node_table(df::CatalogClient& catalog) {
  std::map<std::string, df::NodeInfo> table;
  for (const auto& n : catalog.nodes()) table[n.node_id] = n;
  return table;
}

const df::NodeInfo& require_node(const std::map<std::string, df::NodeInfo>& table,
                                 const std::string& id) {
  auto it = table.find(id);
  if (it == table.end())
    df::fail(df::ErrorCode::kUnknownNode, "node '" + id + "' is not registered with the catalog");
  return it->second;
}

// ---------------------------------------------------------------------------
// catalog serve / node serve
// ---------------------------------------------------------------------------

int cmd_catalog_serve(const std::string& addr, const std::string& state_dir) {
  df::Catalog catalog{fs::path(state_dir)};
  df::CatalogService service(catalog, df::Addr::parse(addr));
  service.start();
  std::cout << "catalog serving on " << service.addr().str() << ", state in " << state_dir
            << std::endl;
  wait_for_signal();
  service.stop();
  return 0;
}

int cmd_node_serve(const GlobalOpts& g, const std::string& addr, const std::string& root,
                   const std::string& node_id, uint64_t rate_limit,
                   const std::vector<std::string>& load_flags, uint64_t pull_chunk) {
  df::StorageConfig cfg;
  cfg.node_id = node_id;
  cfg.root = root;
  cfg.rate_limit_bps = rate_limit;
  cfg.pull_chunk_bytes = pull_chunk;
  for (const auto& f : load_flags) {
    if (f == "extra_processes")
      cfg.load_flags |= df::kLoadExtraProcesses;
    else if (f == "high_fragmentation")
      cfg.load_flags |= df::kLoadHighFragmentation;
    else
      df::fail(df::ErrorCode::kInvalidArgument, "unknown load flag '" + f + "'");
  }
  auto node = std::make_shared<df::StorageNode>(cfg);
  df::StorageService service(node, df::Addr::parse(addr));
  service.start();
  if (g.catalog_addr.empty())
    df::fail(df::ErrorCode::kInvalidArgument, "node serve needs --catalog HOST:PORT");
  service.announce(df::Addr::parse(g.catalog_addr));
  std::cout << "node " << node_id << " serving on " << service.addr().str() << ", root " << root
            << (rate_limit ? ", rate limit " + std::to_string(rate_limit) + " B/s" : "")
            << std::endl;
  wait_for_signal();
  service.stop();
  return 0;
}

// ---------------------------------------------------------------------------
// reg / ls / put / get / rep
// ---------------------------------------------------------------------------

int cmd_reg(const GlobalOpts& g, const std::string& lfn, uint32_t n_fragments,
            const std::string& nodes_csv) {
  auto node_ids = split_commas(nodes_csv);
  if (node_ids.empty()) df::fail(df::ErrorCode::kInvalidArgument, "--nodes must name a node");
  auto catalog = make_catalog_client(g);
  auto table = node_table(catalog);

  std::vector<df::FragmentMeta> metas;
  for (uint32_t i = 0; i < n_fragments; ++i) {
    const auto& info = require_node(table, node_ids[i % node_ids.size()]);
    df::NodeClient client(df::Addr::parse(info.address), g.timeout_seconds);
    df::FragmentMeta meta;
    meta.index = i;
    meta.size_bytes = client.stat(lfn, i);
    meta.crc32 = client.crc(lfn, i);
    meta.replicas.push_back({info.node_id,
                             df::StorageNode::fragment_path(info.storage_root, lfn, i).string(),
                             meta.crc32});
    metas.push_back(std::move(meta));
  }
  auto entry = catalog.register_file(lfn, metas);
  std::cout << entry.lfn << " " << entry.n_fragments << " " << entry.total_size << std::endl;
  return 0;
}

int cmd_ls(const GlobalOpts& g, const std::string& pattern, bool long_form) {
  auto catalog = make_catalog_client(g);
  for (const auto& entry : catalog.list(pattern)) {
    if (long_form) {
      std::cout << entry.lfn << " " << entry.n_fragments << " " << entry.total_size << "\n";
      for (const auto& frag : entry.fragments) {
        std::cout << "  " << frag.index << " " << frag.size_bytes << " " << df::hex_u32(frag.crc32);
        for (const auto& rep : frag.replicas) std::cout << " " << rep.node_id;
        std::cout << "\n";
      }
    } else {
      std::cout << entry.lfn << " " << entry.n_fragments << " " << entry.total_size << "\n";
    }
  }
  return 0;
}

int cmd_put(const GlobalOpts& g, const std::string& lfn, const std::string& file,
            const std::string& nodes_csv, uint64_t fragment_bytes) {
  auto node_ids = split_commas(nodes_csv);
  if (node_ids.empty()) df::fail(df::ErrorCode::kInvalidArgument, "--nodes must name a node");
  if (fragment_bytes == 0) df::fail(df::ErrorCode::kInvalidArgument, "--fragment-bytes must be > 0");

  std::ifstream in(file, std::ios::binary);
  if (!in.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot open " + file);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();

  auto catalog = make_catalog_client(g);
  auto table = node_table(catalog);

  uint32_t n_fragments =
      std::max<uint64_t>(1, (data.size() + fragment_bytes - 1) / fragment_bytes);
  std::vector<df::FragmentMeta> metas;
  for (uint32_t i = 0; i < n_fragments; ++i) {
    const auto& info = require_node(table, node_ids[i % node_ids.size()]);
    df::NodeClient client(df::Addr::parse(info.address), g.timeout_seconds);
    uint64_t off = static_cast<uint64_t>(i) * fragment_bytes;
    uint64_t len = std::min<uint64_t>(fragment_bytes, data.size() - off);
    auto res = client.put(lfn, i, std::string_view(data).substr(off, len));
    df::FragmentMeta meta;
    meta.index = i;
    meta.size_bytes = res.size;
    meta.crc32 = res.crc32;
    meta.replicas.push_back({info.node_id,
                             df::StorageNode::fragment_path(info.storage_root, lfn, i).string(),
                             res.crc32});
    metas.push_back(std::move(meta));
  }
  auto entry = catalog.register_file(lfn, metas);
  std::cout << entry.lfn << " " << entry.n_fragments << " " << entry.total_size << std::endl;
  return 0;
}

int cmd_get(const GlobalOpts& g, const std::string& lfn, const std::string& file) {
  auto catalog = make_catalog_client(g);
  auto entry = catalog.lookup(lfn);
  auto table = node_table(catalog);

  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot write " + file);
  for (const auto& frag : entry.fragments) {
    std::string data;
    std::string last_error = "no replicas";
    bool got = false;
    for (const auto& rep : frag.replicas) {
      auto it = table.find(rep.node_id);
      if (it == table.end()) continue;
      try {
        df::NodeClient client(df::Addr::parse(it->second.address), g.timeout_seconds);
        data = client.get(lfn, frag.index);
        if (df::crc32(data) != frag.crc32)
          df::fail(df::ErrorCode::kCrcMismatch,
                   "fragment " + std::to_string(frag.index) + " from " + rep.node_id);
        got = true;
        break;
      } catch (const std::exception& e) {
        last_error = e.what();
      }
    }
    if (!got)
      df::fail(df::ErrorCode::kIoFailure,
               "fragment " + std::to_string(frag.index) + " unavailable: " + last_error);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
  }
  out.close();
  std::cout << lfn << " -> " << file << " (" << entry.total_size << " bytes)" << std::endl;
  return 0;
}

int cmd_rep(const GlobalOpts& g, const std::string& lfn, const std::string& dest_csv,
            uint32_t streams, uint64_t chunk, const std::string& csv_file) {
  auto dests = split_commas(dest_csv);
  auto catalog = make_catalog_client(g);
  auto entry = catalog.lookup(lfn);
  auto plan = df::plan_replication(entry, dests, streams, chunk);
  df::TransferEngine engine(catalog);
  auto report = engine.execute(plan);

  std::ostringstream csv;
  csv << "fragment,source,dest,bytes,seconds,bps\n";
  std::cout << "fragment  source  dest  bytes  seconds  bps  status\n";
  uint64_t total = 0;
  bool any_failed = false;
  for (const auto& r : report.per_stream) {
    total += r.bytes;
    std::cout << r.fragment_index << "  " << r.source_node << "  " << r.dest_node << "  " << r.bytes
              << "  " << r.seconds << "  " << r.bps << "  "
              << (r.no_op ? "no-op" : (r.ok ? "ok" : "FAILED " + r.error)) << "\n";
    csv << r.fragment_index << ',' << r.source_node << ',' << r.dest_node << ',' << r.bytes << ','
        << r.seconds << ',' << r.bps << '\n';
    if (!r.ok) any_failed = true;
  }
  std::cout << "aggregate  " << total << " bytes  " << report.wall_seconds << " s  "
            << report.aggregate_bps << " B/s  verified=" << (report.verified ? "true" : "false")
            << std::endl;
  csv << "aggregate,,," << total << ',' << report.wall_seconds << ',' << report.aggregate_bps
      << '\n';
  if (!csv_file.empty()) {
    std::ofstream out(csv_file, std::ios::trunc);
    if (!out.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot write " + csv_file);
    out << csv.str();
  }
  return any_failed ? 1 : 0;
}

// ---------------------------------------------------------------------------
// evt gen / dump / stats
// ---------------------------------------------------------------------------

int cmd_evt_gen(const std::string& out_file, uint64_t events, uint32_t hits, uint64_t seed,
                uint32_t quantize_bits, const std::string& codec_name, uint32_t events_per_block) {
  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  if (!out.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot write " + out_file);
  df::EventFileWriter writer(out, parse_codec(codec_name), events_per_block);
  df::SyntheticEventSource source(seed, hits, quantize_bits);
  uint64_t remaining = events;
  while (remaining > 0) {
    uint64_t n = std::min<uint64_t>(remaining, 128);
    auto batch = source.take(n);
    writer.append(std::span<const df::EventRecord>(batch));
    remaining -= n;
  }
  auto stats = writer.finish();
  std::cout << "events=" << stats.n_events << " bytes_raw=" << stats.bytes_raw
            << " bytes_compressed=" << stats.bytes_compressed
            << " mean_event_bytes=" << stats.mean_event_bytes
            << " compression_factor=" << df::compression_factor(stats) << std::endl;
  return 0;
}

int cmd_evt_dump(const std::string& in_file, const std::string& collections_csv, uint64_t begin,
                 uint64_t count, uint64_t hit_limit) {
  std::ifstream in(in_file, std::ios::binary);
  if (!in.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot open " + in_file);
  df::EventFileReader reader(in);
  auto selection = split_commas(collections_csv);
  auto events = reader.read(selection, begin, count);
  for (const auto& event : events) {
    std::cout << "event " << event.event_id << "\n";
    for (const auto& col : event.collections) {
      std::cout << "  " << col.detector_name << " hits=" << col.hits.size() << "\n";
      uint64_t shown = 0;
      for (const auto& hit : col.hits) {
        if (shown++ >= hit_limit) break;
        std::cout << "    " << hit.edep_abs << " " << hit.edep_gap << " " << hit.track_len_abs
                  << " " << hit.track_len_gap << "\n";
      }
    }
  }
  return 0;
}

int cmd_evt_stats(const std::string& in_file) {
  std::ifstream in(in_file, std::ios::binary);
  if (!in.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot open " + in_file);
  df::EventFileReader reader(in);
  auto stats = reader.stats();
  std::cout << "n_events=" << stats.n_events << "\n";
  std::cout << "first_event_id=" << reader.first_event_id() << "\n";
  std::cout << "collections=";
  for (size_t i = 0; i < reader.directory().size(); ++i)
    std::cout << (i ? "," : "") << reader.directory()[i];
  std::cout << "\n";
  std::cout << "bytes_raw=" << stats.bytes_raw << "\n";
  std::cout << "bytes_compressed=" << stats.bytes_compressed << "\n";
  std::cout << "mean_event_bytes=" << stats.mean_event_bytes << "\n";
  if (stats.bytes_compressed)
    std::cout << "compression_factor=" << df::compression_factor(stats) << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// schemac
// ---------------------------------------------------------------------------

int cmd_schemac(const std::string& schema_file, const std::vector<std::string>& templates,
                const std::string& out_dir, const std::vector<std::string>& defines) {
  df::schemac::MacroTable extra;
  for (const auto& def : defines) {
    auto eq = def.find('=');
    if (eq == std::string::npos)
      df::fail(df::ErrorCode::kInvalidArgument, "--define expects name=value, got '" + def + "'");
    extra[def.substr(0, eq)] = def.substr(eq + 1);
  }
  std::vector<fs::path> template_paths(templates.begin(), templates.end());
  auto result = df::schemac::compile(schema_file, template_paths, out_dir, extra);
  std::string source_name = fs::path(schema_file).filename().string();
  for (const auto& d : result.diagnostics)
    std::cerr << df::schemac::format_diagnostic(source_name, d) << "\n";
  for (const auto& p : result.written) std::cout << p.string() << "\n";
  return result.ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sched plan
// ---------------------------------------------------------------------------

int cmd_sched_plan(const GlobalOpts& g, const std::string& tasks_file, const std::string& out_file) {
  std::ifstream in(tasks_file);
  if (!in.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot open " + tasks_file);
  std::vector<df::Task> tasks;
  std::string line;
  while (std::getline(in, line)) {
    auto tokens = df::split_ws(line);
    if (tokens.empty() || tokens[0].front() == '#') continue;
    if (tokens.size() != 4)
      df::fail(df::ErrorCode::kInvalidArgument,
               "task lines are: <task_id> <lfn> <fragment_index> <est_bytes>");
    df::Task t;
    t.task_id = df::parse_u64(tokens[0]);
    t.lfn = std::string(tokens[1]);
    t.fragment_index = static_cast<uint32_t>(df::parse_u64(tokens[2]));
    t.est_bytes = df::parse_u64(tokens[3]);
    tasks.push_back(std::move(t));
  }

  auto catalog = make_catalog_client(g);
  std::vector<df::LogicalFileEntry> entries;
  std::set<std::string> seen;
  for (const auto& t : tasks)
    if (seen.insert(t.lfn).second) entries.push_back(catalog.lookup(t.lfn));
  df::ReplicaView view(entries);

  std::vector<df::SchedNode> nodes;
  for (const auto& n : catalog.nodes()) nodes.push_back({n.node_id, n.up});

  auto assignments = df::assign(tasks, view, nodes);
  std::ofstream out(out_file, std::ios::trunc);
  if (!out.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot write " + out_file);
  size_t local = 0;
  for (const auto& a : assignments) {
    out << a.task_id << " " << a.node_id << " "
        << (a.locality == df::Locality::kLocal ? "local" : "remote") << "\n";
    if (a.locality == df::Locality::kLocal) ++local;
  }
  std::cout << assignments.size() << " tasks planned, " << local << " local" << std::endl;
  return 0;
}

// ---------------------------------------------------------------------------
// bench write|read
// ---------------------------------------------------------------------------

struct BenchCliOpts {
  std::string mode;
  uint32_t nodes = 1;
  uint64_t events_per_node = 100;
  uint32_t hits = 1000;
  uint32_t quantize_bits = 10;
  std::string codec = "deflate";
  std::string rates_csv;
  uint64_t seed = 1;
  uint32_t events_per_block = 256;
  std::string lfn = "bench/events.gdf";
  std::string csv_file;
  std::string series_file;
  bool embedded = false;
  std::string dir;
  bool verify = false;
};

int cmd_bench(const GlobalOpts& g, const BenchCliOpts& o) {
  df::BenchConfig config;
  config.mode = o.mode == "write" ? df::BenchConfig::Mode::kWrite : df::BenchConfig::Mode::kRead;
  config.n_nodes = o.nodes;
  config.events_per_node = o.events_per_node;
  config.hits_per_event = o.hits;
  config.quantize_bits = o.quantize_bits;
  config.codec = parse_codec(o.codec);
  config.seed = o.seed;
  config.events_per_block = o.events_per_block;
  config.lfn = o.lfn;
  config.verify_events = o.verify;
  if (!o.rates_csv.empty()) {
    for (const auto& r : split_commas(o.rates_csv)) config.node_rate_bps.push_back(df::parse_u64(r));
    if (config.node_rate_bps.size() == 1 && o.nodes > 1)
      config.node_rate_bps.assign(o.nodes, config.node_rate_bps[0]);
  }

  std::unique_ptr<df::BenchRunner> runner;
  if (o.embedded) {
    runner = df::BenchRunner::embedded(o.nodes, config.node_rate_bps, o.dir);
  } else {
    if (g.catalog_addr.empty())
      df::fail(df::ErrorCode::kInvalidArgument, "bench needs --embedded or --catalog HOST:PORT");
    runner = df::BenchRunner::attached(df::Addr::parse(g.catalog_addr));
  }

  auto report = runner->run(config);
  df::write_report_csv(report, std::cout);
  if (!o.csv_file.empty()) {
    std::ofstream out(o.csv_file, std::ios::trunc);
    if (!out.is_open()) df::fail(df::ErrorCode::kIoFailure, "cannot write " + o.csv_file);
    df::write_report_csv(report, out);
  }
  if (!o.series_file.empty()) df::append_series_point(report, o.series_file);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"datafarm control tool: parallel file system, event I/O and benchmarks"};
  app.fallthrough();

  GlobalOpts g;
  std::string config_path;
  app.add_option("--catalog", g.catalog_addr,
                 "catalog control address HOST:PORT (env DF_CATALOG)");
  app.add_option("--timeout", g.timeout_seconds, "network timeout in seconds (env DF_TIMEOUT)");
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_flag("-v,--verbose", g.verbosity, "increase verbosity");

  // Command bodies run after parsing so the flag > env > config > default
  // resolution below applies before any of them reads the globals.
  std::function<int()> action;
  auto run = [&action](std::function<int()> fn) { action = std::move(fn); };

  // catalog serve
  auto* catalog_cmd = app.add_subcommand("catalog", "metadata catalog service");
  {
    auto* serve = catalog_cmd->add_subcommand("serve", "run the catalog service");
    auto addr = std::make_shared<std::string>("127.0.0.1:7400");
    auto state_dir = std::make_shared<std::string>("./catalog-state");
    serve->add_option("--addr", *addr, "listen address HOST:PORT");
    serve->add_option("--state-dir", *state_dir, "durable log directory")->required();
    serve->callback([&run, addr, state_dir] {
      run([addr, state_dir] { return cmd_catalog_serve(*addr, *state_dir); });
    });
  }
  catalog_cmd->require_subcommand(1);

  // node serve
  auto* node_cmd = app.add_subcommand("node", "storage node daemon");
  {
    auto* serve = node_cmd->add_subcommand("serve", "run a storage node");
    auto addr = std::make_shared<std::string>("127.0.0.1:0");
    auto root = std::make_shared<std::string>();
    auto node_id = std::make_shared<std::string>("n0");
    auto rate = std::make_shared<uint64_t>(0);
    auto pull_chunk = std::make_shared<uint64_t>(1 << 20);
    auto load_flags = std::make_shared<std::vector<std::string>>();
    serve->add_option("--addr", *addr, "listen address HOST:PORT");
    serve->add_option("--root", *root, "fragment storage root")->required();
    serve->add_option("--node-id", *node_id, "node identifier");
    serve->add_option("--rate-limit", *rate, "token-bucket rate limit in bytes/second (0=off)");
    serve->add_option("--pull-chunk", *pull_chunk, "chunk size for replication pulls");
    serve->add_option("--load-flag", *load_flags,
                      "inject a load marker (extra_processes|high_fragmentation)");
    serve->callback([&run, &g, addr, root, node_id, rate, pull_chunk, load_flags] {
      run([&g, addr, root, node_id, rate, pull_chunk, load_flags] {
        return cmd_node_serve(g, *addr, *root, *node_id, *rate, *load_flags, *pull_chunk);
      });
    });
  }
  node_cmd->require_subcommand(1);

  // reg
  {
    auto* reg = app.add_subcommand("reg", "register node-resident fragments as a logical file");
    auto lfn = std::make_shared<std::string>();
    auto n = std::make_shared<uint32_t>(0);
    auto nodes = std::make_shared<std::string>();
    reg->add_option("lfn", *lfn, "logical file name")->required();
    reg->add_option("--fragments", *n, "number of fragments")->required();
    reg->add_option("--nodes", *nodes, "comma-separated node ids holding fragments round-robin")
        ->required();
    reg->callback([&run, &g, lfn, n, nodes] {
      run([&g, lfn, n, nodes] { return cmd_reg(g, *lfn, *n, *nodes); });
    });
  }

  // ls
  {
    auto* ls = app.add_subcommand("ls", "list logical files matching a glob");
    auto pattern = std::make_shared<std::string>("*");
    auto long_form = std::make_shared<bool>(false);
    ls->add_option("pattern", *pattern, "glob with * and ? wildcards");
    ls->add_flag("-l,--long", *long_form, "show fragments and replica holders");
    ls->callback([&run, &g, pattern, long_form] {
      run([&g, pattern, long_form] { return cmd_ls(g, *pattern, *long_form); });
    });
  }

  // put / get
  {
    auto* put = app.add_subcommand("put", "split a local file into fragments and register it");
    auto lfn = std::make_shared<std::string>();
    auto file = std::make_shared<std::string>();
    auto nodes = std::make_shared<std::string>();
    auto frag_bytes = std::make_shared<uint64_t>(8ull << 20);
    put->add_option("lfn", *lfn)->required();
    put->add_option("file", *file)->required();
    put->add_option("--nodes", *nodes, "comma-separated destination node ids")->required();
    put->add_option("--fragment-bytes", *frag_bytes, "fragment size");
    put->callback([&run, &g, lfn, file, nodes, frag_bytes] {
      run([&g, lfn, file, nodes, frag_bytes] {
        return cmd_put(g, *lfn, *file, *nodes, *frag_bytes);
      });
    });
  }
  {
    auto* get = app.add_subcommand("get", "fetch a logical file into a local file");
    auto lfn = std::make_shared<std::string>();
    auto file = std::make_shared<std::string>();
    get->add_option("lfn", *lfn)->required();
    get->add_option("file", *file)->required();
    get->callback([&run, &g, lfn, file] {
      run([&g, lfn, file] { return cmd_get(g, *lfn, *file); });
    });
  }

  // rep
  {
    auto* rep = app.add_subcommand("rep", "replicate a logical file to destination nodes");
    auto lfn = std::make_shared<std::string>();
    auto dest = std::make_shared<std::string>();
    auto streams = std::make_shared<uint32_t>(4);
    auto chunk = std::make_shared<uint64_t>(1 << 20);
    auto csv = std::make_shared<std::string>();
    rep->add_option("lfn", *lfn)->required();
    rep->add_option("--dest", *dest, "comma-separated destination node ids")->required();
    rep->add_option("--streams", *streams, "concurrent pull streams");
    rep->add_option("--chunk", *chunk, "pull chunk size in bytes");
    rep->add_option("--csv", *csv, "write the per-stream report as CSV");
    rep->callback([&run, &g, lfn, dest, streams, chunk, csv] {
      run([&g, lfn, dest, streams, chunk, csv] {
        return cmd_rep(g, *lfn, *dest, *streams, *chunk, *csv);
      });
    });
  }

  // evt gen|dump|stats
  auto* evt = app.add_subcommand("evt", "event file utilities");
  {
    auto* gen = evt->add_subcommand("gen", "generate a synthetic event file");
    auto out = std::make_shared<std::string>();
    auto events = std::make_shared<uint64_t>(100);
    auto hits = std::make_shared<uint32_t>(1000);
    auto seed = std::make_shared<uint64_t>(1);
    auto qbits = std::make_shared<uint32_t>(10);
    auto codec = std::make_shared<std::string>("deflate");
    auto epb = std::make_shared<uint32_t>(256);
    gen->add_option("--out", *out, "output file")->required();
    gen->add_option("--events", *events, "number of events");
    gen->add_option("--hits", *hits, "hits per event");
    gen->add_option("--seed", *seed, "generator seed");
    gen->add_option("--quantize-bits", *qbits, "kept mantissa bits (0..23)");
    gen->add_option("--codec", *codec, "stored|deflate");
    gen->add_option("--events-per-block", *epb, "events per block");
    gen->callback([&run, out, events, hits, seed, qbits, codec, epb] {
      run([out, events, hits, seed, qbits, codec, epb] {
        return cmd_evt_gen(*out, *events, *hits, *seed, *qbits, *codec, *epb);
      });
    });
  }
  {
    auto* dump = evt->add_subcommand("dump", "decode and print events");
    auto in = std::make_shared<std::string>();
    auto cols = std::make_shared<std::string>();
    auto begin = std::make_shared<uint64_t>(0);
    auto count = std::make_shared<uint64_t>(0);
    auto limit = std::make_shared<uint64_t>(5);
    dump->add_option("--in", *in, "event file")->required();
    dump->add_option("--collections", *cols, "comma-separated selection (default: all)");
    dump->add_option("--begin", *begin, "first event ordinal");
    dump->add_option("--count", *count, "number of events (0 = to end)");
    dump->add_option("--hit-limit", *limit, "hits printed per collection");
    dump->callback([&run, in, cols, begin, count, limit] {
      run([in, cols, begin, count, limit] {
        return cmd_evt_dump(*in, *cols, *begin, *count, *limit);
      });
    });
  }
  {
    auto* stats = evt->add_subcommand("stats", "print footer and block statistics");
    auto in = std::make_shared<std::string>();
    stats->add_option("--in", *in, "event file")->required();
    stats->callback([&run, in] { run([in] { return cmd_evt_stats(*in); }); });
  }
  evt->require_subcommand(1);

  // schemac
  {
    auto* sc = app.add_subcommand("schemac", "compile a .rootio property-definition file");
    auto schema = std::make_shared<std::string>();
    auto templates = std::make_shared<std::vector<std::string>>();
    auto out_dir = std::make_shared<std::string>(".");
    auto defines = std::make_shared<std::vector<std::string>>();
    sc->add_option("schema", *schema, "input .rootio file")->required();
    sc->add_option("--template", *templates, "template file rendered through the macro table");
    sc->add_option("--out", *out_dir, "output directory");
    sc->add_option("--define", *defines, "extra macro binding name=value");
    sc->callback([&run, schema, templates, out_dir, defines] {
      run([schema, templates, out_dir, defines] {
        return cmd_schemac(*schema, *templates, *out_dir, *defines);
      });
    });
  }

  // sched plan
  auto* sched = app.add_subcommand("sched", "task scheduling");
  {
    auto* plan = sched->add_subcommand("plan", "assign tasks to nodes with file affinity");
    auto tasks = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    plan->add_option("--tasks", *tasks, "task list file")->required();
    plan->add_option("--out", *out, "assignment output file")->required();
    plan->callback([&run, &g, tasks, out] {
      run([&g, tasks, out] { return cmd_sched_plan(g, *tasks, *out); });
    });
  }
  sched->require_subcommand(1);

  // bench write|read (also exposed as the dfbench alias)
  auto* bench = app.add_subcommand("bench", "parallel I/O benchmark");
  auto bench_opts = std::make_shared<BenchCliOpts>();
  for (const char* mode : {"write", "read"}) {
    auto* sub = bench->add_subcommand(mode, std::string(mode) + " benchmark");
    sub->add_option("--nodes", bench_opts->nodes, "number of storage nodes")->required();
    sub->add_option("--events-per-node", bench_opts->events_per_node, "events per node");
    sub->add_option("--hits", bench_opts->hits, "hits per event");
    sub->add_option("--quantize-bits", bench_opts->quantize_bits, "kept mantissa bits");
    sub->add_option("--codec", bench_opts->codec, "stored|deflate");
    sub->add_option("--rates", bench_opts->rates_csv,
                    "per-node rate limits in bytes/second (one value or N comma-separated)");
    sub->add_option("--seed", bench_opts->seed, "generator seed");
    sub->add_option("--events-per-block", bench_opts->events_per_block, "events per block");
    sub->add_option("--lfn", bench_opts->lfn, "logical file name for the bench data");
    sub->add_option("--csv", bench_opts->csv_file, "write the report as CSV");
    sub->add_option("--series", bench_opts->series_file, "append aggregate point to a series file");
    sub->add_flag("--embedded", bench_opts->embedded, "spawn catalog and nodes in-process");
    sub->add_option("--dir", bench_opts->dir, "embedded cluster state directory (kept)");
    sub->add_flag("--verify", bench_opts->verify, "read mode: compare decoded events to the seed");
    std::string mode_name = mode;
    sub->callback([&run, &g, bench_opts, mode_name] {
      bench_opts->mode = mode_name;
      run([&g, bench_opts] { return cmd_bench(g, *bench_opts); });
    });
  }
  bench->require_subcommand(1);

  app.require_subcommand(1);

  // The dfbench alias drops straight into the bench subcommand.
  std::vector<std::string> args(argv + 1, argv + argc);
  fs::path prog = argc > 0 ? fs::path(argv[0]).filename() : "dfctl";
  app.name(prog.string());
  if (prog.string().find("dfbench") != std::string::npos) args.insert(args.begin(), "bench");

  bool catalog_from_cli = flag_on_command_line(args, "--catalog");
  bool timeout_from_cli = flag_on_command_line(args, "--timeout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);

    // flag > environment (DF_*) > config file > default.
    std::map<std::string, std::string> config;
    if (!config_path.empty()) config = load_config_file(config_path);
    if (!catalog_from_cli) {
      if (const char* env = std::getenv("DF_CATALOG"))
        g.catalog_addr = env;
      else if (auto it = config.find("catalog"); it != config.end())
        g.catalog_addr = it->second;
    }
    if (!timeout_from_cli) {
      if (const char* env = std::getenv("DF_TIMEOUT"))
        g.timeout_seconds = std::stod(env);
      else if (auto it = config.find("timeout"); it != config.end())
        g.timeout_seconds = std::stod(it->second);
    }

    if (!action) return 2;
    return action();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const df::Error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
}

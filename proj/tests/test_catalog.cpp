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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <thread>

#include "df/bytes.hpp"
#include "df/catalog.hpp"
#include "df/crc32.hpp"
#include "df/error.hpp"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  fs::path dir = fs::temp_directory_path() /
                 ("df-cat-" + tag + "-" + std::to_string(::getpid()) + "-" +
                  std::to_string(counter.fetch_add(1)));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

df::FragmentMeta frag(uint32_t index, uint64_t size, uint32_t crc, const std::string& node) {
  df::FragmentMeta f;
  f.index = index;
  f.size_bytes = size;
  f.crc32 = crc;
  f.replicas.push_back({node, "/data/" + std::to_string(index) + ".frag", crc});
  return f;
}

std::vector<df::FragmentMeta> frags(uint32_t n, uint64_t size, const std::string& node_prefix) {
  std::vector<df::FragmentMeta> out;
  for (uint32_t i = 0; i < n; ++i)
    out.push_back(frag(i, size, 0x1000 + i, node_prefix + std::to_string(i)));
  return out;
}

df::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const df::Error& e) {
    return e.code();
  }
  return df::ErrorCode::kOk;
}

}  // namespace

TEST_CASE("register_file: 8 fragments of 1 MiB sum to 8 MiB") {
  df::Catalog catalog;
  auto entry = catalog.register_file("run1/evt.gdf", frags(8, 1 << 20, "n"));
  CHECK(entry.n_fragments == 8);
  CHECK(entry.total_size == 8ull << 20);
  CHECK(catalog.lookup("run1/evt.gdf").total_size == 8ull << 20);
}

TEST_CASE("register_file rejects degenerate inputs") {
  df::Catalog catalog;
  CHECK(code_of([&] { catalog.register_file("a", {}); }) == df::ErrorCode::kEmptyFragmentSet);

  std::vector<df::FragmentMeta> gap{frag(0, 10, 1, "n0"), frag(2, 10, 2, "n0")};
  CHECK(code_of([&] { catalog.register_file("a", gap); }) ==
        df::ErrorCode::kGapInFragmentIndices);

  std::vector<df::FragmentMeta> dup{frag(0, 10, 1, "n0"), frag(0, 10, 1, "n1")};
  CHECK(code_of([&] { catalog.register_file("a", dup); }) ==
        df::ErrorCode::kGapInFragmentIndices);

  catalog.register_file("a", frags(1, 10, "n"));
  CHECK(code_of([&] { catalog.register_file("a", frags(1, 10, "n")); }) ==
        df::ErrorCode::kDuplicateName);
}

TEST_CASE("lookup on a missing name is UnknownFile") {
  df::Catalog catalog;
  CHECK(code_of([&] { catalog.lookup("missing"); }) == df::ErrorCode::kUnknownFile);
}

TEST_CASE("add_replica: locality, idempotence, checksum guard") {
  df::Catalog catalog;
  catalog.register_file("f", frags(8, 100, "n"));

  auto entry = catalog.add_replica("f", 3, {"n9", "/r/3.frag", 0x1000 + 3});
  CHECK(entry.fragments[3].replicas.size() == 2);
  for (uint32_t i = 0; i < 8; ++i)
    if (i != 3) CHECK(entry.fragments[i].replicas.size() == 1);

  // Same (node, path) again: unchanged.
  auto again = catalog.add_replica("f", 3, {"n9", "/r/3.frag", 0x1000 + 3});
  CHECK(again.fragments[3].replicas.size() == 2);

  CHECK(code_of([&] { catalog.add_replica("f", 3, {"n10", "/r/x", 0xBAD}); }) ==
        df::ErrorCode::kChecksumMismatch);
  CHECK(code_of([&] { catalog.add_replica("f", 99, {"n10", "/r/x", 1}); }) ==
        df::ErrorCode::kUnknownFragmentIndex);
  CHECK(code_of([&] { catalog.add_replica("zzz", 0, {"n10", "/r/x", 1}); }) ==
        df::ErrorCode::kUnknownFile);

  // Read-your-writes through lookup.
  CHECK(catalog.lookup("f").fragments[3].replicas.size() == 2);
}

TEST_CASE("remove_replica keeps fragments non-empty") {
  df::Catalog catalog;
  catalog.register_file("f", frags(2, 100, "n"));
  catalog.add_replica("f", 0, {"n9", "/r/0", 0x1000});

  auto entry = catalog.remove_replica("f", 0, "n0");
  CHECK(entry.fragments[0].replicas.size() == 1);
  CHECK(entry.fragments[0].replicas[0].node_id == "n9");

  CHECK(code_of([&] { catalog.remove_replica("f", 0, "n9"); }) == df::ErrorCode::kLastReplica);
  CHECK(code_of([&] { catalog.remove_replica("f", 1, "nope"); }) ==
        df::ErrorCode::kUnknownReplica);
  CHECK(code_of([&] { catalog.remove_replica("g", 0, "n0"); }) == df::ErrorCode::kUnknownFile);
}

TEST_CASE("list_files: glob over sorted names") {
  df::Catalog catalog;
  catalog.register_file("run1/a", frags(1, 1, "n"));
  catalog.register_file("run2/a", frags(1, 1, "n"));
  catalog.register_file("run1/b", frags(1, 1, "n"));

  auto matches = catalog.list_files("run1/*");
  REQUIRE(matches.size() == 2);
  CHECK(matches[0].lfn == "run1/a");
  CHECK(matches[1].lfn == "run1/b");

  auto q = catalog.list_files("run?/a");
  REQUIRE(q.size() == 2);
  CHECK(q[0].lfn == "run1/a");
  CHECK(q[1].lfn == "run2/a");

  CHECK(df::Catalog().list_files("*").empty());
  CHECK(catalog.list_files("nothing*").empty());
}

TEST_CASE("durable catalog: recover equals live state") {
  auto dir = fresh_dir("recover");
  std::string live_dump;
  {
    df::Catalog catalog{dir};
    catalog.register_file("run1/evt.gdf", frags(4, 1 << 20, "n"));
    catalog.add_replica("run1/evt.gdf", 2, {"n9", "/r/2", 0x1002});
    catalog.remove_replica("run1/evt.gdf", 2, "n2");
    catalog.upsert_node({"n9", "127.0.0.1:1", "/data", 12345, true});
    live_dump = catalog.dump_canonical();
  }
  df::Catalog recovered{dir};
  CHECK(recovered.dump_canonical() == live_dump);
}

TEST_CASE("empty log recovers to an empty catalog") {
  auto dir = fresh_dir("empty");
  df::Catalog catalog{dir};
  CHECK(catalog.file_count() == 0);
  CHECK(catalog.dump_canonical().empty());
}

TEST_CASE("torn final record is discarded, not fatal") {
  auto dir = fresh_dir("torn");
  std::string dump_before;
  {
    df::Catalog catalog{dir};
    catalog.register_file("a", frags(1, 10, "n"));
    dump_before = catalog.dump_canonical();
    catalog.register_file("b", frags(1, 10, "n"));
  }
  // Chop the final record in half (no trailing newline).
  auto log = df::CatalogLog::log_path(dir);
  auto size = fs::file_size(log);
  std::ifstream in(log, std::ios::binary);
  std::string data(size, '\0');
  in.read(data.data(), static_cast<std::streamsize>(size));
  in.close();
  auto last_line_start = data.rfind('\n', data.size() - 2) + 1;
  auto cut = last_line_start + (data.size() - last_line_start) / 2;
  std::ofstream out(log, std::ios::binary | std::ios::trunc);
  out.write(data.data(), static_cast<std::streamsize>(cut));
  out.close();

  df::Catalog recovered{dir};
  CHECK(recovered.dump_canonical() == dump_before);
  CHECK(recovered.file_count() == 1);
}

TEST_CASE("malformed record before the end is CorruptRecord") {
  auto dir = fresh_dir("corrupt");
  {
    df::Catalog catalog{dir};
    catalog.register_file("a", frags(1, 10, "n"));
    catalog.register_file("b", frags(1, 10, "n"));
  }
  auto log = df::CatalogLog::log_path(dir);
  std::ifstream in(log, std::ios::binary);
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  data[data.size() / 4] ^= 0x5A;  // flip a byte inside the first record
  std::ofstream out(log, std::ios::binary | std::ios::trunc);
  out << data;
  out.close();

  CHECK(code_of([&] { df::Catalog{dir}; }) == df::ErrorCode::kCorruptRecord);
}

TEST_CASE("replay equivalence over randomized operation sequences") {
  std::mt19937 rng(20260808);
  auto dir = fresh_dir("replay");
  df::Catalog durable{dir};
  df::Catalog shadow;  // no log; the independent in-memory oracle

  auto apply_both = [&](auto op) {
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
    CHECK(threw_a == threw_b);
  };

  std::vector<std::string> names;
  for (int i = 0; i < 400; ++i) {
    int dice = static_cast<int>(rng() % 10);
    if (dice < 4 || names.empty()) {
      std::string lfn = "f" + std::to_string(rng() % 60);
      uint32_t n = 1 + rng() % 4;
      apply_both([&, lfn, n](df::Catalog& c) { c.register_file(lfn, frags(n, 100, "n")); });
      names.push_back(lfn);
    } else if (dice < 7) {
      const auto& lfn = names[rng() % names.size()];
      uint32_t idx = rng() % 4;
      std::string node = "r" + std::to_string(rng() % 5);
      apply_both([&, lfn, idx, node](df::Catalog& c) {
        c.add_replica(lfn, idx, {node, "/r/" + node, 0x1000 + idx});
      });
    } else if (dice < 9) {
      const auto& lfn = names[rng() % names.size()];
      uint32_t idx = rng() % 4;
      std::string node = (rng() % 2) ? "r" + std::to_string(rng() % 5)
                                     : "n" + std::to_string(idx);
      apply_both([&, lfn, idx, node](df::Catalog& c) { c.remove_replica(lfn, idx, node); });
    } else {
      std::string id = "node" + std::to_string(rng() % 8);
      uint64_t rate = rng() % 2 ? 0u : 1000u;
      apply_both([&, id, rate](df::Catalog& c) {
        c.upsert_node({id, "127.0.0.1:9", "/d", rate, true});
      });
    }
  }

  CHECK(durable.dump_canonical() == shadow.dump_canonical());
  df::Catalog recovered{dir};
  CHECK(recovered.dump_canonical() == shadow.dump_canonical());
}

TEST_CASE("concurrent mutations never violate entry invariants") {
  df::Catalog catalog;
  catalog.register_file("hot", frags(4, 50, "n"));

  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 200; ++i) {
        try {
          if (i % 3 == 0)
            catalog.register_file("t" + std::to_string(t) + "-" + std::to_string(i),
                                  frags(2, 10, "n"));
          else if (i % 3 == 1)
            catalog.add_replica("hot", i % 4,
                                {"x" + std::to_string(t), "/p" + std::to_string(i % 7),
                                 0x1000u + (i % 4)});
          else
            (void)catalog.lookup("hot");
        } catch (const df::Error&) {
          // benign races (duplicate names etc.); invariants still checked
        }
      }
    });
  }
  for (auto& t : threads) t.join();

  // check_entry runs inside every mutation; a final lookup re-validates shape.
  auto entry = catalog.lookup("hot");
  CHECK(entry.n_fragments == 4);
  for (uint32_t i = 0; i < 4; ++i) {
    CHECK(entry.fragments[i].index == i);
    CHECK(!entry.fragments[i].replicas.empty());
    for (const auto& r : entry.fragments[i].replicas) CHECK(r.crc32 == entry.fragments[i].crc32);
  }
  CHECK(catalog.file_count() >= 1);
}

TEST_CASE("log records one line per mutation with a crc field") {
  auto dir = fresh_dir("format");
  {
    df::Catalog catalog{dir};
    catalog.register_file("x", frags(1, 5, "n"));
    catalog.add_replica("x", 0, {"m", "/m/0", 0x1000});
  }
  std::ifstream in(df::CatalogLog::log_path(dir));
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    auto sp = line.rfind(' ');
    REQUIRE(sp != std::string::npos);
    CHECK(df::crc32(std::string_view(line).substr(0, sp)) ==
          df::parse_hex_u32(std::string_view(line).substr(sp + 1)));
  }
  CHECK(lines == 2);
}

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

#include <bit>
#include <cmath>
#include <functional>
#include <random>

#include "df/bytes.hpp"
#include "df/crc32.hpp"
#include "df/error.hpp"
#include "df/eventio.hpp"
#include "df/memstream.hpp"

using df::EventRecord;
using df::Hit;
using df::HitCollection;

namespace {

EventRecord make_event(uint64_t id, std::vector<std::pair<std::string, size_t>> spec,
                       std::mt19937& rng) {
  EventRecord e;
  e.event_id = id;
  for (auto& [name, n] : spec) {
    HitCollection col;
    col.detector_name = name;
    for (size_t i = 0; i < n; ++i) {
      auto f = [&] {
        return std::bit_cast<float>(static_cast<uint32_t>((rng() & 0x3F7FFFFFu) | 0x3C000000u));
      };
      col.hits.push_back({f(), f(), f(), f()});
    }
    e.collections.push_back(std::move(col));
  }
  return e;
}

df::ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const df::Error& e) {
    return e.code();
  }
  return df::ErrorCode::kOk;
}

std::string write_to_string(std::span<const EventRecord> events, df::Codec codec,
                            uint32_t events_per_block, df::EventFileStats* stats = nullptr) {
  df::omemstream sink;
  auto s = df::write_events(sink, events, codec, events_per_block);
  if (stats) *stats = s;
  return sink.take();
}

}  // namespace

TEST_CASE("file layout is bit-exact for a tiny stored file") {
  // One event, one collection "c" with a single known hit, stored codec.
  EventRecord event;
  event.event_id = 7;
  HitCollection col;
  col.detector_name = "c";
  col.hits.push_back({1.0f, 2.0f, 3.0f, 4.0f});
  event.collections.push_back(col);

  auto bytes = write_to_string({&event, 1}, df::Codec::kStored, 4);

  // Hand-built expectation, layout per the container definition.
  std::string segment;
  df::put_u32le(segment, 1);  // hit count
  df::put_u32le(segment, std::bit_cast<uint32_t>(1.0f));
  df::put_u32le(segment, std::bit_cast<uint32_t>(2.0f));
  df::put_u32le(segment, std::bit_cast<uint32_t>(3.0f));
  df::put_u32le(segment, std::bit_cast<uint32_t>(4.0f));

  std::string want = "GDFE";
  df::put_u16le(want, 1);  // version
  df::put_u16le(want, 0);  // flags
  uint64_t block_offset = want.size();
  df::put_u32le(want, 1);  // block n_events
  df::put_u16le(want, 1);  // n_collections
  df::put_u8(want, 0);     // codec = stored
  df::put_u8(want, 0);     // pad
  df::put_u32le(want, static_cast<uint32_t>(segment.size()));  // raw_len
  df::put_u32le(want, static_cast<uint32_t>(segment.size()));  // comp_len
  df::put_u32le(want, df::crc32(segment));
  want += segment;
  uint64_t footer_offset = want.size();
  want += "GDFF";
  df::put_u16le(want, 1);  // directory size
  df::put_u16le(want, 1);  // name_len
  want += "c";
  df::put_u32le(want, 1);  // n_blocks
  df::put_u64le(want, block_offset);
  df::put_u32le(want, 1);  // block n_events
  df::put_u64le(want, 7);  // first_event_id
  df::put_u64le(want, footer_offset);
  want += "EOFD";

  CHECK(bytes == want);
}

TEST_CASE("lossless round trip across codecs, block sizes and 0-hit collections") {
  std::mt19937 rng(42);
  for (auto codec : {df::Codec::kStored, df::Codec::kDeflate}) {
    for (uint32_t epb : {1u, 3u, 64u}) {
      std::vector<EventRecord> events;
      for (uint64_t i = 0; i < 17; ++i)
        events.push_back(make_event(
            100 + i, {{"calor", i % 5 == 0 ? 0 : rng() % 50}, {"tracker", rng() % 30}}, rng));

      auto bytes = write_to_string(events, codec, epb);
      df::imemstream in(bytes);
      auto back = df::read_events(in, {});
      REQUIRE(back.size() == events.size());
      for (size_t i = 0; i < events.size(); ++i) CHECK(back[i] == events[i]);
    }
  }
}

TEST_CASE("selective read decodes only the selected column") {
  std::mt19937 rng(43);
  std::vector<EventRecord> events;
  for (uint64_t i = 0; i < 10; ++i)
    events.push_back(make_event(i, {{"calor", 5}, {"tracker", 3}}, rng));
  auto bytes = write_to_string(events, df::Codec::kDeflate, 4);

  df::imemstream in(bytes);
  df::EventFileReader reader(in);
  auto got = reader.read({"tracker"});
  REQUIRE(got.size() == 10);
  for (size_t i = 0; i < got.size(); ++i) {
    REQUIRE(got[i].collections.size() == 1);
    CHECK(got[i].collections[0].detector_name == "tracker");
    CHECK(got[i].collections[0] == events[i].collections[1]);
  }
  CHECK(reader.decode_counts().at("tracker") == 3);  // one per block
  CHECK(reader.decode_counts().at("calor") == 0);

  // Selective read equals projecting the full read.
  df::imemstream in2(bytes);
  auto full = df::read_events(in2, {});
  for (size_t i = 0; i < got.size(); ++i) CHECK(got[i].collections[0] == full[i].collections[1]);

  df::imemstream in3(bytes);
  CHECK(code_of([&] { df::read_events(in3, {"nope"}); }) == df::ErrorCode::kUnknownCollection);
}

TEST_CASE("event ranges select by ordinal; bad ranges are RangeError") {
  std::mt19937 rng(44);
  std::vector<EventRecord> events;
  for (uint64_t i = 0; i < 20; ++i) events.push_back(make_event(50 + i, {{"c", 2}}, rng));
  auto bytes = write_to_string(events, df::Codec::kStored, 6);

  df::imemstream in(bytes);
  df::EventFileReader reader(in);
  auto mid = reader.read({}, 5, 7);
  REQUIRE(mid.size() == 7);
  CHECK(mid.front().event_id == 55);
  CHECK(mid.back().event_id == 61);
  CHECK(mid.front() == events[5]);

  auto tail = reader.read({}, 18, 0);
  REQUIRE(tail.size() == 2);
  CHECK(tail[1].event_id == 69);

  CHECK(code_of([&] { reader.read({}, 21, 0); }) == df::ErrorCode::kRangeError);
  CHECK(code_of([&] { reader.read({}, 0, 21); }) == df::ErrorCode::kRangeError);
}

TEST_CASE("corrupting one block leaves the others readable") {
  std::mt19937 rng(45);
  std::vector<EventRecord> events;
  for (uint64_t i = 0; i < 12; ++i) events.push_back(make_event(i, {{"c", 20}}, rng));
  // 3 blocks of 4 events.
  auto bytes = write_to_string(events, df::Codec::kDeflate, 4);

  // Locate block 1's payload via the footer: trailer holds footer_offset,
  // the footer holds the block index; the payload starts after the block
  // header (8 bytes) and the per-collection table (12 bytes per column).
  df::ByteReader trailer(std::string_view(bytes).substr(bytes.size() - 12, 8));
  uint64_t footer_offset = trailer.u64le();
  df::ByteReader footer(std::string_view(bytes).substr(footer_offset));
  footer.take(4);  // magic
  uint16_t ncols = footer.u16le();
  for (uint16_t i = 0; i < ncols; ++i) footer.take(footer.u16le());
  uint32_t nblocks = footer.u32le();
  REQUIRE(nblocks == 3);
  footer.u64le();
  footer.u32le();  // block 0
  uint64_t block1_offset = footer.u64le();
  size_t target = block1_offset + 8 + 12ull * ncols + 5;  // a payload byte

  std::string mutated = bytes;
  mutated[target] = static_cast<char>(mutated[target] ^ 0x01);
  df::imemstream in(mutated);
  df::EventFileReader reader(in);
  auto first = reader.read({}, 0, 4);
  CHECK(first.size() == 4);
  for (size_t i = 0; i < 4; ++i) CHECK(first[i] == events[i]);
  auto last = reader.read({}, 8, 4);
  CHECK(last.size() == 4);
  CHECK(code_of([&] { reader.read({}, 4, 4); }) == df::ErrorCode::kCrcMismatch);
}

TEST_CASE("bad magic values are rejected") {
  std::mt19937 rng(46);
  std::vector<EventRecord> events{make_event(0, {{"c", 1}}, rng)};
  auto bytes = write_to_string(events, df::Codec::kStored, 1);

  auto corrupt_at = [&](size_t pos) {
    std::string mutated = bytes;
    mutated[pos] ^= 0x40;
    df::imemstream in(mutated);
    return code_of([&] { df::EventFileReader reader(in); });
  };
  CHECK(corrupt_at(0) == df::ErrorCode::kBadMagic);                 // header magic
  CHECK(corrupt_at(bytes.size() - 1) == df::ErrorCode::kBadMagic);  // trailer magic

  df::imemstream tiny(std::string_view("short"));
  CHECK(code_of([&] { df::EventFileReader reader(tiny); }) == df::ErrorCode::kBadMagic);
}

TEST_CASE("stored codec stats: raw equals stored equals payload bytes") {
  df::SyntheticEventSource source(1, 1000, 23);
  auto events = source.take(100);
  df::EventFileStats stats;
  auto bytes = write_to_string(events, df::Codec::kStored, 16, &stats);
  const uint64_t payload = 100ull * (4 + 1000 * 16);
  CHECK(stats.n_events == 100);
  CHECK(stats.bytes_raw == payload);
  CHECK(stats.bytes_compressed == payload);
  CHECK(stats.mean_event_bytes == doctest::Approx(16004.0));
  CHECK(stats.bytes_compressed <= bytes.size());

  // Reader-side stats agree with the writer.
  df::imemstream in(bytes);
  df::EventFileReader reader(in);
  auto rstats = reader.stats();
  CHECK(rstats.n_events == stats.n_events);
  CHECK(rstats.bytes_raw == stats.bytes_raw);
  CHECK(rstats.bytes_compressed == stats.bytes_compressed);
}

TEST_CASE("compression_factor arithmetic") {
  CHECK(df::compression_factor({0, 26250, 7500, 0.0}) == doctest::Approx(3.5));
  df::SyntheticEventSource source(2, 100, 23);
  auto events = source.take(10);
  df::EventFileStats stats;
  write_to_string(events, df::Codec::kStored, 4, &stats);
  CHECK(df::compression_factor(stats) == doctest::Approx(1.0));
  CHECK(code_of([&] { df::compression_factor({1, 10, 0, 0.0}); }) ==
        df::ErrorCode::kDivisionByZero);
}

TEST_CASE("mismatched collection sets are InconsistentDirectory") {
  std::mt19937 rng(47);
  std::vector<EventRecord> events;
  events.push_back(make_event(0, {{"a", 1}, {"b", 1}}, rng));
  events.push_back(make_event(1, {{"a", 1}}, rng));
  df::omemstream sink;
  CHECK(code_of([&] {
          df::write_events(sink, events, df::Codec::kStored, 4);
        }) == df::ErrorCode::kInconsistentDirectory);

  std::vector<EventRecord> swapped;
  swapped.push_back(make_event(0, {{"a", 1}, {"b", 1}}, rng));
  swapped.push_back(make_event(1, {{"b", 1}, {"a", 1}}, rng));
  df::omemstream sink2;
  CHECK(code_of([&] {
          df::write_events(sink2, swapped, df::Codec::kStored, 4);
        }) == df::ErrorCode::kInconsistentDirectory);

  std::vector<EventRecord> gap_ids;
  gap_ids.push_back(make_event(0, {{"a", 1}}, rng));
  gap_ids.push_back(make_event(5, {{"a", 1}}, rng));
  df::omemstream sink3;
  CHECK(code_of([&] {
          df::write_events(sink3, gap_ids, df::Codec::kStored, 4);
        }) == df::ErrorCode::kInvalidArgument);
}

TEST_CASE("synthetic generator: same seed, bit-identical output") {
  auto a = df::generate_synthetic(3, 1000, 42, 23);
  auto b = df::generate_synthetic(3, 1000, 42, 23);
  REQUIRE(a.size() == 3);
  CHECK(a == b);
  REQUIRE(a[0].collections.size() == 1);
  CHECK(a[0].collections[0].detector_name == "calor");
  CHECK(a[0].collections[0].hits.size() == 1000);
  CHECK(a[0].event_id == 0);
  CHECK(a[2].event_id == 2);

  auto c = df::generate_synthetic(3, 1000, 43, 23);
  CHECK_FALSE(a == c);
}

TEST_CASE("quantize_bits=0 zeroes every mantissa") {
  auto events = df::generate_synthetic(2, 100, 7, 0);
  for (const auto& e : events)
    for (const auto& col : e.collections)
      for (const auto& h : col.hits)
        for (float v : {h.edep_abs, h.edep_gap, h.track_len_abs, h.track_len_gap})
          CHECK((std::bit_cast<uint32_t>(v) & 0x007FFFFFu) == 0);
}

TEST_CASE("quantization only zeroes the masked low mantissa bits") {
  auto full = df::generate_synthetic(1, 500, 99, 23);
  auto q10 = df::generate_synthetic(1, 500, 99, 10);
  for (size_t h = 0; h < 500; ++h) {
    uint32_t a = std::bit_cast<uint32_t>(full[0].collections[0].hits[h].edep_abs);
    uint32_t b = std::bit_cast<uint32_t>(q10[0].collections[0].hits[h].edep_abs);
    CHECK(b == (a & ~((1u << 13) - 1)));
  }
}

TEST_CASE("sample moments over one million hits") {
  // Mean within +-0.01 of 0 and stddev within +-0.01 of 1 (law of large
  // numbers bound; sigma/sqrt(N) = 0.001 here).
  df::SyntheticEventSource source(12345, 1000, 23);
  double sum = 0.0, sum_sq = 0.0;
  const uint64_t n_events = 1000;  // 10^6 hits total
  uint64_t n = 0;
  for (uint64_t i = 0; i < n_events; ++i) {
    auto e = source.next();
    for (const auto& h : e.collections[0].hits) {
      sum += h.edep_abs;
      sum_sq += static_cast<double>(h.edep_abs) * h.edep_abs;
      ++n;
    }
  }
  double mean = sum / static_cast<double>(n);
  double var = sum_sq / static_cast<double>(n) - mean * mean;
  double stddev = std::sqrt(var);
  CHECK(n == 1000000);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(stddev - 1.0) < 0.01);
}

TEST_CASE("monotone compression in quantization") {
  auto factor_at = [](uint32_t qbits) {
    df::SyntheticEventSource source(2026, 1000, qbits);
    auto events = source.take(40);
    df::EventFileStats stats;
    write_to_string(events, df::Codec::kDeflate, 16, &stats);
    return df::compression_factor(stats);
  };
  double f8 = factor_at(8);
  double f16 = factor_at(16);
  double f23 = factor_at(23);
  CHECK(f8 >= f16);
  CHECK(f16 >= f23);
  CHECK(f23 >= 1.0 - 1e-9);
}

TEST_CASE("scan matches read and feeds decode counters") {
  std::mt19937 rng(48);
  std::vector<EventRecord> events;
  for (uint64_t i = 0; i < 9; ++i) events.push_back(make_event(i, {{"c", i % 4}}, rng));
  auto bytes = write_to_string(events, df::Codec::kDeflate, 2);
  df::imemstream in(bytes);
  df::EventFileReader reader(in);
  auto scanned = reader.scan({});
  CHECK(scanned.n_events == 9);
  uint64_t hits = 0;
  for (const auto& e : events) hits += e.collections[0].hits.size();
  CHECK(scanned.n_hits == hits);
}

TEST_CASE("empty event list is rejected") {
  df::omemstream sink;
  CHECK(code_of([&] {
          df::write_events(sink, std::span<const EventRecord>{}, df::Codec::kStored, 4);
        }) == df::ErrorCode::kInvalidArgument);
}

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
#include <iosfwd>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "df/codec.hpp"

namespace df {

// One calorimeter hit: energy deposits and track lengths in absorber and
// gap, 16 bytes on the wire as four little-endian IEEE-754 binary32 values.
struct Hit {
  float edep_abs = 0.0f;
  float edep_gap = 0.0f;
  float track_len_abs = 0.0f;
  float track_len_gap = 0.0f;

  friend bool operator==(const Hit&, const Hit&) = default;
};

struct HitCollection {
  std::string detector_name;
  std::vector<Hit> hits;

  friend bool operator==(const HitCollection&, const HitCollection&) = default;
};

struct EventRecord {
  uint64_t event_id = 0;
  std::vector<HitCollection> collections;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventFileStats {
  uint64_t n_events = 0;
  uint64_t bytes_raw = 0;
  uint64_t bytes_compressed = 0;
  double mean_event_bytes = 0.0;
};

// bytes_raw / bytes_compressed; DivisionByZero when nothing was stored.
double compression_factor(const EventFileStats& stats);

// Event file layout (little-endian, bit-exact):
//   header  "GDFE" version:u16=1 flags:u16=0
//   blocks  { n_events:u32 n_collections:u16 codec:u8 pad:u8
//             per collection in directory order { raw_len:u32 comp_len:u32 crc32:u32 }
//             then the compressed collection payloads concatenated }
//   footer  "GDFF" { n_collections:u16, per collection name_len:u16 + name }
//           { n_blocks:u32, per block file_offset:u64 + n_events:u32 }
//           first_event_id:u64
//   trailer footer_offset:u64 "EOFD"
// crc32 covers the compressed payload. Event ids are consecutive from
// first_event_id in file order.
class EventFileWriter {
 public:
  EventFileWriter(std::ostream& sink, Codec codec, uint32_t events_per_block);

  void append(const EventRecord& event);
  void append(std::span<const EventRecord> events);

  // Flushes the open block, writes footer and trailer, returns the stats.
  EventFileStats finish();

 private:
  void flush_block();

  std::ostream& sink_;
  Codec codec_;
  uint32_t events_per_block_;
  bool have_directory_ = false;
  bool finished_ = false;
  std::vector<std::string> directory_;
  std::vector<std::string> segments_;  // raw column buffers of the open block
  uint32_t block_events_ = 0;
  uint64_t first_event_id_ = 0;
  uint64_t next_event_id_ = 0;
  uint64_t n_events_ = 0;
  uint64_t bytes_raw_ = 0;
  uint64_t bytes_compressed_ = 0;
  struct BlockIndexEntry {
    uint64_t offset;
    uint32_t n_events;
  };
  std::vector<BlockIndexEntry> index_;
  uint64_t write_pos_ = 0;
};

class EventFileReader {
 public:
  explicit EventFileReader(std::istream& source);

  const std::vector<std::string>& directory() const { return directory_; }
  uint64_t n_events() const { return n_events_; }
  uint64_t first_event_id() const { return first_event_id_; }

  // Decodes the selected collections (empty selection = all) for events
  // [begin, begin+count) by ordinal; count 0 means "to the end". Unselected
  // column segments are never decompressed.
  std::vector<EventRecord> read(const std::vector<std::string>& selection, uint64_t begin = 0,
                                uint64_t count = 0);

  // Per-collection count of segment decompressions, for observability.
  const std::map<std::string, uint64_t>& decode_counts() const { return decode_counts_; }

  // Decodes every selected segment and walks all events without keeping
  // them; returns (events seen, hits seen). Crc-checked like read().
  struct ScanResult {
    uint64_t n_events = 0;
    uint64_t n_hits = 0;
  };
  ScanResult scan(const std::vector<std::string>& selection = {});

  // Raw/stored byte totals summed over every block table.
  EventFileStats stats();

 private:
  struct BlockInfo {
    uint64_t offset;
    uint32_t n_events;
    uint64_t first_ordinal;
  };

  std::istream& source_;
  std::vector<std::string> directory_;
  std::vector<BlockInfo> blocks_;
  uint64_t n_events_ = 0;
  uint64_t first_event_id_ = 0;
  std::map<std::string, uint64_t> decode_counts_;
};

// Convenience one-shot forms.
EventFileStats write_events(std::ostream& sink, std::span<const EventRecord> events, Codec codec,
                            uint32_t events_per_block);
std::vector<EventRecord> read_events(std::istream& source, const std::vector<std::string>& selection,
                                     uint64_t begin = 0, uint64_t count = 0);

// Deterministic stream of synthetic events: one "calor" collection whose
// hits carry four standard-normal float32 values, low (23 - quantize_bits)
// mantissa bits zeroed. Same seed, same bits.
class SyntheticEventSource {
 public:
  SyntheticEventSource(uint64_t seed, uint32_t hits_per_event, uint32_t quantize_bits,
                       uint64_t first_event_id = 0);

  EventRecord next();
  std::vector<EventRecord> take(uint64_t n_events);

  static constexpr const char* kCollectionName = "calor";

 private:
  float next_normal();
  float quantize(float v) const;

  std::mt19937_64 rng_;
  uint32_t hits_per_event_;
  uint32_t quantize_bits_;
  uint64_t next_id_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

std::vector<EventRecord> generate_synthetic(uint64_t n_events, uint32_t hits_per_event, uint64_t seed,
                                            uint32_t quantize_bits);

}  // namespace df

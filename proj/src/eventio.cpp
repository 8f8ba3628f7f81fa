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

#include "df/eventio.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "df/bytes.hpp"
#include "df/crc32.hpp"
#include "df/error.hpp"

namespace df {

namespace {

constexpr char kHeaderMagic[4] = {'G', 'D', 'F', 'E'};
constexpr char kFooterMagic[4] = {'G', 'D', 'F', 'F'};
constexpr char kTrailerMagic[4] = {'E', 'O', 'F', 'D'};
constexpr uint16_t kVersion = 1;
constexpr size_t kHitWireBytes = 16;

void append_hit(std::string& out, const Hit& hit) {
  put_u32le(out, std::bit_cast<uint32_t>(hit.edep_abs));
  put_u32le(out, std::bit_cast<uint32_t>(hit.edep_gap));
  put_u32le(out, std::bit_cast<uint32_t>(hit.track_len_abs));
  put_u32le(out, std::bit_cast<uint32_t>(hit.track_len_gap));
}

Hit parse_hit(ByteReader& r) {
  Hit hit;
  hit.edep_abs = std::bit_cast<float>(r.u32le());
  hit.edep_gap = std::bit_cast<float>(r.u32le());
  hit.track_len_abs = std::bit_cast<float>(r.u32le());
  hit.track_len_gap = std::bit_cast<float>(r.u32le());
  return hit;
}

void read_exact(std::istream& in, char* buf, size_t n, const char* what) {
  in.read(buf, static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in.gcount()) != n)
    fail(ErrorCode::kIoFailure, std::string("short read in ") + what);
}

}  // namespace

double compression_factor(const EventFileStats& stats) {
  if (stats.bytes_compressed == 0)
    fail(ErrorCode::kDivisionByZero, "no stored bytes to compare against");
  return static_cast<double>(stats.bytes_raw) / static_cast<double>(stats.bytes_compressed);
}

// ---------------------------------------------------------------------------
// EventFileWriter
// ---------------------------------------------------------------------------

EventFileWriter::EventFileWriter(std::ostream& sink, Codec codec, uint32_t events_per_block)
    : sink_(sink), codec_(codec), events_per_block_(events_per_block) {
  if (events_per_block_ < 1) fail(ErrorCode::kInvalidArgument, "events_per_block must be >= 1");
  std::string header(kHeaderMagic, 4);
  put_u16le(header, kVersion);
  put_u16le(header, 0);  // flags
  sink_.write(header.data(), static_cast<std::streamsize>(header.size()));
  write_pos_ = header.size();
}

void EventFileWriter::append(const EventRecord& event) {
  if (finished_) fail(ErrorCode::kIoFailure, "writer already finished");
  if (!have_directory_) {
    std::set<std::string> seen;
    for (const auto& c : event.collections) {
      if (c.detector_name.empty())
        fail(ErrorCode::kInconsistentDirectory, "empty detector name");
      if (!seen.insert(c.detector_name).second)
        fail(ErrorCode::kInconsistentDirectory, "duplicate collection '" + c.detector_name + "'");
      directory_.push_back(c.detector_name);
    }
    segments_.assign(directory_.size(), std::string());
    first_event_id_ = event.event_id;
    next_event_id_ = event.event_id;
    have_directory_ = true;
  }

  if (event.collections.size() != directory_.size())
    fail(ErrorCode::kInconsistentDirectory,
         "event " + std::to_string(event.event_id) + " has " +
             std::to_string(event.collections.size()) + " collections, directory has " +
             std::to_string(directory_.size()));
  for (size_t i = 0; i < directory_.size(); ++i)
    if (event.collections[i].detector_name != directory_[i])
      fail(ErrorCode::kInconsistentDirectory,
           "collection '" + event.collections[i].detector_name + "' does not match directory '" +
               directory_[i] + "'");
  if (event.event_id != next_event_id_)
    fail(ErrorCode::kInvalidArgument,
         "event ids must be consecutive: expected " + std::to_string(next_event_id_) + ", got " +
             std::to_string(event.event_id));

  for (size_t i = 0; i < directory_.size(); ++i) {
    const auto& hits = event.collections[i].hits;
    std::string& seg = segments_[i];
    put_u32le(seg, static_cast<uint32_t>(hits.size()));
    for (const Hit& hit : hits) append_hit(seg, hit);
  }
  ++next_event_id_;
  ++n_events_;
  if (++block_events_ >= events_per_block_) flush_block();
}

void EventFileWriter::append(std::span<const EventRecord> events) {
  for (const auto& e : events) append(e);
}

void EventFileWriter::flush_block() {
  if (block_events_ == 0) return;
  std::string head;
  put_u32le(head, block_events_);
  put_u16le(head, static_cast<uint16_t>(directory_.size()));
  put_u8(head, static_cast<uint8_t>(codec_));
  put_u8(head, 0);  // pad

  std::vector<std::string> payloads;
  payloads.reserve(segments_.size());
  for (auto& seg : segments_) {
    std::string payload = codec_compress(codec_, seg);
    put_u32le(head, static_cast<uint32_t>(seg.size()));
    put_u32le(head, static_cast<uint32_t>(payload.size()));
    put_u32le(head, crc32(payload));
    bytes_raw_ += seg.size();
    bytes_compressed_ += payload.size();
    payloads.push_back(std::move(payload));
    seg.clear();
  }

  index_.push_back({write_pos_, block_events_});
  sink_.write(head.data(), static_cast<std::streamsize>(head.size()));
  write_pos_ += head.size();
  for (const auto& p : payloads) {
    sink_.write(p.data(), static_cast<std::streamsize>(p.size()));
    write_pos_ += p.size();
  }
  block_events_ = 0;
}

EventFileStats EventFileWriter::finish() {
  if (finished_) fail(ErrorCode::kIoFailure, "writer already finished");
  flush_block();
  finished_ = true;

  uint64_t footer_offset = write_pos_;
  std::string footer(kFooterMagic, 4);
  put_u16le(footer, static_cast<uint16_t>(directory_.size()));
  for (const auto& name : directory_) {
    put_u16le(footer, static_cast<uint16_t>(name.size()));
    footer += name;
  }
  put_u32le(footer, static_cast<uint32_t>(index_.size()));
  for (const auto& b : index_) {
    put_u64le(footer, b.offset);
    put_u32le(footer, b.n_events);
  }
  put_u64le(footer, first_event_id_);

  std::string trailer;
  put_u64le(trailer, footer_offset);
  trailer.append(kTrailerMagic, 4);

  sink_.write(footer.data(), static_cast<std::streamsize>(footer.size()));
  sink_.write(trailer.data(), static_cast<std::streamsize>(trailer.size()));
  sink_.flush();
  if (!sink_.good()) fail(ErrorCode::kIoFailure, "event file sink failed");
  write_pos_ += footer.size() + trailer.size();

  EventFileStats stats;
  stats.n_events = n_events_;
  stats.bytes_raw = bytes_raw_;
  stats.bytes_compressed = bytes_compressed_;
  stats.mean_event_bytes =
      n_events_ ? static_cast<double>(bytes_compressed_) / static_cast<double>(n_events_) : 0.0;
  return stats;
}

EventFileStats write_events(std::ostream& sink, std::span<const EventRecord> events, Codec codec,
                            uint32_t events_per_block) {
  if (events.empty()) fail(ErrorCode::kInvalidArgument, "no events to write");
  EventFileWriter writer(sink, codec, events_per_block);
  writer.append(events);
  return writer.finish();
}

// ---------------------------------------------------------------------------
// EventFileReader
// ---------------------------------------------------------------------------

EventFileReader::EventFileReader(std::istream& source) : source_(source) {
  source_.seekg(0, std::ios::end);
  auto file_size = static_cast<uint64_t>(source_.tellg());
  if (file_size < 8 + 12) fail(ErrorCode::kBadMagic, "file too small for an event file");

  char header[8];
  source_.seekg(0);
  read_exact(source_, header, sizeof(header), "header");
  if (std::string_view(header, 4) != std::string_view(kHeaderMagic, 4))
    fail(ErrorCode::kBadMagic, "bad header magic");
  ByteReader hr(std::string_view(header + 4, 4));
  uint16_t version = hr.u16le();
  if (version != kVersion)
    fail(ErrorCode::kBadMagic, "unsupported version " + std::to_string(version));

  char trailer[12];
  source_.seekg(static_cast<std::streamoff>(file_size - sizeof(trailer)));
  read_exact(source_, trailer, sizeof(trailer), "trailer");
  if (std::string_view(trailer + 8, 4) != std::string_view(kTrailerMagic, 4))
    fail(ErrorCode::kBadMagic, "bad trailer magic");
  ByteReader tr(std::string_view(trailer, 8));
  uint64_t footer_offset = tr.u64le();
  if (footer_offset + 12 > file_size) fail(ErrorCode::kBadMagic, "footer offset out of range");

  uint64_t footer_len = file_size - 12 - footer_offset;
  std::string footer(footer_len, '\0');
  source_.seekg(static_cast<std::streamoff>(footer_offset));
  read_exact(source_, footer.data(), footer.size(), "footer");
  if (std::string_view(footer.data(), 4) != std::string_view(kFooterMagic, 4))
    fail(ErrorCode::kBadMagic, "bad footer magic");

  ByteReader fr(std::string_view(footer).substr(4));
  uint16_t n_collections = fr.u16le();
  for (uint16_t i = 0; i < n_collections; ++i) {
    uint16_t len = fr.u16le();
    directory_.push_back(fr.str(len));
  }
  uint32_t n_blocks = fr.u32le();
  uint64_t ordinal = 0;
  for (uint32_t i = 0; i < n_blocks; ++i) {
    BlockInfo b{};
    b.offset = fr.u64le();
    b.n_events = fr.u32le();
    b.first_ordinal = ordinal;
    ordinal += b.n_events;
    blocks_.push_back(b);
  }
  n_events_ = ordinal;
  first_event_id_ = fr.u64le();
  for (const auto& name : directory_) decode_counts_[name] = 0;
}

std::vector<EventRecord> EventFileReader::read(const std::vector<std::string>& selection,
                                               uint64_t begin, uint64_t count) {
  // Resolve the selection to directory indices, preserving directory order.
  std::vector<bool> selected(directory_.size(), selection.empty());
  for (const auto& name : selection) {
    bool found = false;
    for (size_t i = 0; i < directory_.size(); ++i) {
      if (directory_[i] == name) {
        selected[i] = true;
        found = true;
        break;
      }
    }
    if (!found) fail(ErrorCode::kUnknownCollection, "no collection '" + name + "' in file");
  }

  if (begin > n_events_)
    fail(ErrorCode::kRangeError, "begin " + std::to_string(begin) + " beyond " +
                                     std::to_string(n_events_) + " events");
  if (count == 0) count = n_events_ - begin;
  if (begin + count > n_events_)
    fail(ErrorCode::kRangeError, "range [" + std::to_string(begin) + ", +" + std::to_string(count) +
                                     ") beyond " + std::to_string(n_events_) + " events");

  std::vector<EventRecord> out;
  out.reserve(count);
  const uint64_t end = begin + count;

  for (const auto& block : blocks_) {
    if (block.first_ordinal + block.n_events <= begin) continue;
    if (block.first_ordinal >= end) break;

    // Block header + per-collection table.
    std::string head(8, '\0');
    source_.seekg(static_cast<std::streamoff>(block.offset));
    read_exact(source_, head.data(), head.size(), "block header");
    ByteReader br(head);
    uint32_t block_events = br.u32le();
    uint16_t n_cols = br.u16le();
    uint8_t codec_byte = br.u8();
    if (block_events != block.n_events || n_cols != directory_.size())
      fail(ErrorCode::kBadMagic, "block header disagrees with footer index");
    std::string table(12ull * n_cols, '\0');
    read_exact(source_, table.data(), table.size(), "block table");
    ByteReader tr(table);
    struct Col {
      uint32_t raw_len, comp_len, crc;
      uint64_t payload_offset;
    };
    std::vector<Col> cols(n_cols);
    uint64_t payload_base = block.offset + 8 + table.size();
    uint64_t running = 0;
    for (auto& c : cols) {
      c.raw_len = tr.u32le();
      c.comp_len = tr.u32le();
      c.crc = tr.u32le();
      c.payload_offset = payload_base + running;
      running += c.comp_len;
    }

    // Decode the selected columns of this block.
    std::vector<std::string> decoded(n_cols);
    for (size_t i = 0; i < n_cols; ++i) {
      if (!selected[i]) continue;
      std::string payload(cols[i].comp_len, '\0');
      source_.seekg(static_cast<std::streamoff>(cols[i].payload_offset));
      read_exact(source_, payload.data(), payload.size(), "column payload");
      if (crc32(payload) != cols[i].crc)
        fail(ErrorCode::kCrcMismatch, "crc mismatch in collection '" + directory_[i] +
                                          "' of block at offset " + std::to_string(block.offset));
      decoded[i] = codec_decompress(static_cast<Codec>(codec_byte), payload, cols[i].raw_len);
      ++decode_counts_[directory_[i]];
    }

    // Walk the decoded segments event by event.
    std::vector<ByteReader> cursors;
    cursors.reserve(n_cols);
    for (size_t i = 0; i < n_cols; ++i) cursors.emplace_back(decoded[i]);

    for (uint32_t e = 0; e < block_events; ++e) {
      uint64_t ordinal = block.first_ordinal + e;
      bool keep = ordinal >= begin && ordinal < end;
      EventRecord event;
      if (keep) event.event_id = first_event_id_ + ordinal;
      for (size_t i = 0; i < n_cols; ++i) {
        if (!selected[i]) continue;
        uint32_t n_hits = cursors[i].u32le();
        if (keep) {
          HitCollection col;
          col.detector_name = directory_[i];
          col.hits.reserve(n_hits);
          for (uint32_t h = 0; h < n_hits; ++h) col.hits.push_back(parse_hit(cursors[i]));
          event.collections.push_back(std::move(col));
        } else {
          cursors[i].take(static_cast<size_t>(n_hits) * kHitWireBytes);
        }
      }
      if (keep) out.push_back(std::move(event));
    }
  }
  return out;
}

EventFileReader::ScanResult EventFileReader::scan(const std::vector<std::string>& selection) {
  std::vector<bool> selected(directory_.size(), selection.empty());
  for (const auto& name : selection) {
    bool found = false;
    for (size_t i = 0; i < directory_.size(); ++i)
      if (directory_[i] == name) selected[i] = found = true;
    if (!found) fail(ErrorCode::kUnknownCollection, "no collection '" + name + "' in file");
  }

  ScanResult result;
  for (const auto& block : blocks_) {
    std::string head(8, '\0');
    source_.seekg(static_cast<std::streamoff>(block.offset));
    read_exact(source_, head.data(), head.size(), "block header");
    ByteReader br(head);
    uint32_t block_events = br.u32le();
    uint16_t n_cols = br.u16le();
    uint8_t codec_byte = br.u8();
    std::string table(12ull * n_cols, '\0');
    read_exact(source_, table.data(), table.size(), "block table");
    ByteReader tr(table);
    uint64_t payload_base = block.offset + 8 + table.size();
    uint64_t running = 0;
    for (uint16_t i = 0; i < n_cols; ++i) {
      uint32_t raw_len = tr.u32le();
      uint32_t comp_len = tr.u32le();
      uint32_t crc = tr.u32le();
      if (i < selected.size() && selected[i]) {
        std::string payload(comp_len, '\0');
        source_.seekg(static_cast<std::streamoff>(payload_base + running));
        read_exact(source_, payload.data(), payload.size(), "column payload");
        if (crc32(payload) != crc)
          fail(ErrorCode::kCrcMismatch, "crc mismatch in collection '" + directory_[i] + "'");
        std::string decoded = codec_decompress(static_cast<Codec>(codec_byte), payload, raw_len);
        ++decode_counts_[directory_[i]];
        ByteReader cur(decoded);
        for (uint32_t e = 0; e < block_events; ++e) {
          uint32_t n_hits = cur.u32le();
          cur.take(static_cast<size_t>(n_hits) * kHitWireBytes);
          result.n_hits += n_hits;
        }
      }
      running += comp_len;
    }
    result.n_events += block_events;
  }
  return result;
}

EventFileStats EventFileReader::stats() {
  EventFileStats stats;
  stats.n_events = n_events_;
  for (const auto& block : blocks_) {
    std::string head(8, '\0');
    source_.seekg(static_cast<std::streamoff>(block.offset));
    read_exact(source_, head.data(), head.size(), "block header");
    ByteReader br(head);
    br.u32le();
    uint16_t n_cols = br.u16le();
    std::string table(12ull * n_cols, '\0');
    read_exact(source_, table.data(), table.size(), "block table");
    ByteReader tr(table);
    for (uint16_t i = 0; i < n_cols; ++i) {
      stats.bytes_raw += tr.u32le();
      stats.bytes_compressed += tr.u32le();
      tr.u32le();
    }
  }
  stats.mean_event_bytes = stats.n_events ? static_cast<double>(stats.bytes_compressed) /
                                                static_cast<double>(stats.n_events)
                                          : 0.0;
  return stats;
}

std::vector<EventRecord> read_events(std::istream& source, const std::vector<std::string>& selection,
                                     uint64_t begin, uint64_t count) {
  EventFileReader reader(source);
  return reader.read(selection, begin, count);
}

// ---------------------------------------------------------------------------
// Synthetic generator
// ---------------------------------------------------------------------------

SyntheticEventSource::SyntheticEventSource(uint64_t seed, uint32_t hits_per_event,
                                           uint32_t quantize_bits, uint64_t first_event_id)
    : rng_(seed), hits_per_event_(hits_per_event), quantize_bits_(quantize_bits),
      next_id_(first_event_id) {
  if (hits_per_event_ < 1) fail(ErrorCode::kInvalidArgument, "hits_per_event must be >= 1");
  if (quantize_bits_ > 23) fail(ErrorCode::kInvalidArgument, "quantize_bits must be in [0, 23]");
}

float SyntheticEventSource::next_normal() {
  if (have_spare_) {
    have_spare_ = false;
    return quantize(static_cast<float>(spare_));
  }
  // Box-Muller on 53-bit uniforms; u1 in (0,1] keeps the log finite.
  double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * (1.0 / 9007199254740992.0);
  double u2 = static_cast<double>(rng_() >> 11) * (1.0 / 9007199254740992.0);
  double radius = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = radius * std::sin(theta);
  have_spare_ = true;
  return quantize(static_cast<float>(radius * std::cos(theta)));
}

float SyntheticEventSource::quantize(float v) const {
  if (quantize_bits_ >= 23) return v;
  uint32_t w = std::bit_cast<uint32_t>(v);
  w &= ~((1u << (23 - quantize_bits_)) - 1u);
  return std::bit_cast<float>(w);
}

EventRecord SyntheticEventSource::next() {
  EventRecord event;
  event.event_id = next_id_++;
  HitCollection col;
  col.detector_name = kCollectionName;
  col.hits.reserve(hits_per_event_);
  for (uint32_t h = 0; h < hits_per_event_; ++h) {
    Hit hit;
    hit.edep_abs = next_normal();
    hit.edep_gap = next_normal();
    hit.track_len_abs = next_normal();
    hit.track_len_gap = next_normal();
    col.hits.push_back(hit);
  }
  event.collections.push_back(std::move(col));
  return event;
}

std::vector<EventRecord> SyntheticEventSource::take(uint64_t n_events) {
  std::vector<EventRecord> out;
  out.reserve(n_events);
  for (uint64_t i = 0; i < n_events; ++i) out.push_back(next());
  return out;
}

std::vector<EventRecord> generate_synthetic(uint64_t n_events, uint32_t hits_per_event, uint64_t seed,
                                            uint32_t quantize_bits) {
  if (n_events < 1) fail(ErrorCode::kInvalidArgument, "n_events must be >= 1");
  SyntheticEventSource source(seed, hits_per_event, quantize_bits);
  return source.take(n_events);
}

}  // namespace df

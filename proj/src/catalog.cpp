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

#include "df/catalog.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>
#include <sstream>

#include "df/bytes.hpp"
#include "df/crc32.hpp"
#include "df/glob.hpp"

namespace df {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// CatalogLog
// ---------------------------------------------------------------------------

fs::path CatalogLog::log_path(const fs::path& state_dir) { return state_dir / "catalog.log"; }

CatalogLog::CatalogLog(const fs::path& state_dir) {
  std::error_code ec;
  fs::create_directories(state_dir, ec);
  fs::path path = log_path(state_dir);
  fd_ = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd_ < 0)
    fail(ErrorCode::kIoFailure, "open " + path.string() + ": " + std::strerror(errno));
  // Make the directory entry itself durable once.
  int dfd = ::open(state_dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
  if (dfd >= 0) {
    ::fsync(dfd);
    ::close(dfd);
  }
}

CatalogLog::~CatalogLog() {
  if (fd_ >= 0) ::close(fd_);
}

void CatalogLog::append(const std::string& payload) {
  std::string line = payload;
  line += ' ';
  line += hex_u32(crc32(payload));
  line += '\n';
  size_t off = 0;
  while (off < line.size()) {
    ssize_t n = ::write(fd_, line.data() + off, line.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      fail(ErrorCode::kIoFailure, std::string("log write: ") + std::strerror(errno));
    }
    off += static_cast<size_t>(n);
  }
  if (::fdatasync(fd_) != 0)
    fail(ErrorCode::kIoFailure, std::string("log fsync: ") + std::strerror(errno));
}

std::vector<std::string> CatalogLog::replay(const fs::path& state_dir) {
  std::vector<std::string> records;
  std::ifstream in(log_path(state_dir), std::ios::binary);
  if (!in.is_open()) return records;
  std::stringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();

  // Lines that end in '\n' are candidates; any residue after the last '\n'
  // is a torn final record and is ignored.
  std::vector<std::string_view> lines;
  size_t start = 0;
  std::string_view view(data);
  for (size_t i = 0; i < view.size(); ++i) {
    if (view[i] == '\n') {
      lines.push_back(view.substr(start, i - start));
      start = i + 1;
    }
  }

  for (size_t li = 0; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    bool last = li + 1 == lines.size();
    auto sp = line.rfind(' ');
    bool ok = sp != std::string_view::npos;
    if (ok) {
      std::string_view payload = line.substr(0, sp);
      std::string_view crc_field = line.substr(sp + 1);
      uint32_t want = 0;
      try {
        want = parse_hex_u32(crc_field);
      } catch (const Error&) {
        ok = false;
      }
      if (ok && crc32(payload) == want) {
        records.emplace_back(payload);
        continue;
      }
      ok = false;
    }
    if (!ok) {
      if (last) break;  // torn final record, dropped
      fail(ErrorCode::kCorruptRecord,
           "malformed record at line " + std::to_string(li + 1) + " of catalog log");
    }
  }
  return records;
}

// ---------------------------------------------------------------------------
// Record encode / decode
// ---------------------------------------------------------------------------

namespace {

std::string encode_fragment(const FragmentMeta& f) {
  std::string out = std::to_string(f.index);
  out += ':';
  out += std::to_string(f.size_bytes);
  out += ':';
  out += hex_u32(f.crc32);
  for (const auto& r : f.replicas) {
    out += ':';
    out += percent_encode(r.node_id);
    out += '=';
    out += percent_encode(r.path);
  }
  return out;
}

FragmentMeta decode_fragment(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() < 4) fail(ErrorCode::kProtocol, "bad fragment field");
  FragmentMeta f;
  f.index = static_cast<uint32_t>(parse_u64(parts[0]));
  f.size_bytes = parse_u64(parts[1]);
  f.crc32 = parse_hex_u32(parts[2]);
  for (size_t i = 3; i < parts.size(); ++i) {
    auto eq = parts[i].find('=');
    if (eq == std::string_view::npos) fail(ErrorCode::kProtocol, "bad replica field");
    ReplicaLocation r;
    r.node_id = percent_decode(parts[i].substr(0, eq));
    r.path = percent_decode(parts[i].substr(eq + 1));
    r.crc32 = f.crc32;
    f.replicas.push_back(std::move(r));
  }
  return f;
}

std::string encode_register(const std::string& lfn, const std::vector<FragmentMeta>& metas) {
  std::string out = "REG ";
  out += percent_encode(lfn);
  out += ' ';
  out += std::to_string(metas.size());
  for (const auto& f : metas) {
    out += ' ';
    out += encode_fragment(f);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

Catalog::Catalog(const fs::path& state_dir) {
  for (const auto& payload : CatalogLog::replay(state_dir)) apply_record(payload);
  log_ = std::make_unique<CatalogLog>(state_dir);
}

void Catalog::check_entry(const LogicalFileEntry& entry) {
  if (entry.fragments.size() != entry.n_fragments)
    fail(ErrorCode::kInvalidArgument, "fragment count mismatch for " + entry.lfn);
  uint64_t total = 0;
  for (uint32_t i = 0; i < entry.n_fragments; ++i) {
    const auto& f = entry.fragments[i];
    if (f.index != i) fail(ErrorCode::kGapInFragmentIndices, "fragment indices not gapless");
    if (f.replicas.empty()) fail(ErrorCode::kInvalidArgument, "fragment with no replicas");
    for (const auto& r : f.replicas)
      if (r.crc32 != f.crc32)
        fail(ErrorCode::kChecksumMismatch, "replica crc differs from fragment crc");
    total += f.size_bytes;
  }
  if (total != entry.total_size) fail(ErrorCode::kInvalidArgument, "total_size mismatch");
}

LogicalFileEntry Catalog::apply_register(const std::string& lfn, std::vector<FragmentMeta> metas) {
  if (files_.count(lfn)) fail(ErrorCode::kDuplicateName, "'" + lfn + "' already registered");
  if (metas.empty()) fail(ErrorCode::kEmptyFragmentSet, "'" + lfn + "' has no fragments");

  std::sort(metas.begin(), metas.end(),
            [](const FragmentMeta& a, const FragmentMeta& b) { return a.index < b.index; });
  for (size_t i = 0; i < metas.size(); ++i) {
    if (metas[i].index != i)
      fail(ErrorCode::kGapInFragmentIndices,
           "'" + lfn + "' fragment indices are not a gapless 0-based range");
    if (metas[i].replicas.size() != 1)
      fail(ErrorCode::kInvalidArgument, "each fragment needs exactly one initial replica");
    if (metas[i].replicas[0].crc32 != metas[i].crc32)
      fail(ErrorCode::kChecksumMismatch, "initial replica crc differs from fragment crc");
  }

  LogicalFileEntry entry;
  entry.lfn = lfn;
  entry.n_fragments = static_cast<uint32_t>(metas.size());
  entry.fragments = std::move(metas);
  for (const auto& f : entry.fragments) entry.total_size += f.size_bytes;
  check_entry(entry);
  files_[lfn] = entry;
  return entry;
}

LogicalFileEntry Catalog::register_file(const std::string& lfn, std::vector<FragmentMeta> metas) {
  std::unique_lock lock(mu_);
  // Validate against a scratch copy first so the log never records a
  // mutation that the in-memory state rejected.
  std::string record = encode_register(lfn, metas);
  LogicalFileEntry entry = apply_register(lfn, std::move(metas));
  if (log_) {
    try {
      log_->append(record);
    } catch (...) {
      files_.erase(lfn);
      throw;
    }
  }
  return entry;
}

LogicalFileEntry Catalog::apply_add_replica(const std::string& lfn, uint32_t index,
                                            const ReplicaLocation& loc) {
  auto it = files_.find(lfn);
  if (it == files_.end()) fail(ErrorCode::kUnknownFile, "'" + lfn + "' not registered");
  if (index >= it->second.n_fragments)
    fail(ErrorCode::kUnknownFragmentIndex, "fragment " + std::to_string(index) + " of '" + lfn + "'");
  FragmentMeta& frag = it->second.fragments[index];
  if (loc.crc32 != frag.crc32)
    fail(ErrorCode::kChecksumMismatch, "replica crc " + hex_u32(loc.crc32) +
                                           " != fragment crc " + hex_u32(frag.crc32));
  for (const auto& r : frag.replicas)
    if (r.node_id == loc.node_id && r.path == loc.path) return it->second;  // idempotent
  frag.replicas.push_back(loc);
  check_entry(it->second);
  return it->second;
}

LogicalFileEntry Catalog::add_replica(const std::string& lfn, uint32_t index,
                                      const ReplicaLocation& location) {
  std::unique_lock lock(mu_);
  auto before = files_.find(lfn);
  size_t replicas_before =
      (before != files_.end() && index < before->second.fragments.size())
          ? before->second.fragments[index].replicas.size()
          : 0;
  LogicalFileEntry entry = apply_add_replica(lfn, index, location);
  bool changed = entry.fragments[index].replicas.size() != replicas_before;
  if (log_ && changed) {
    std::string record = "ADD ";
    record += percent_encode(lfn);
    record += ' ';
    record += std::to_string(index);
    record += ' ';
    record += percent_encode(location.node_id);
    record += ' ';
    record += percent_encode(location.path);
    record += ' ';
    record += hex_u32(location.crc32);
    try {
      log_->append(record);
    } catch (...) {
      files_[lfn].fragments[index].replicas.pop_back();
      throw;
    }
  }
  return entry;
}

LogicalFileEntry Catalog::apply_remove_replica(const std::string& lfn, uint32_t index,
                                               const std::string& node_id) {
  auto it = files_.find(lfn);
  if (it == files_.end()) fail(ErrorCode::kUnknownFile, "'" + lfn + "' not registered");
  if (index >= it->second.n_fragments)
    fail(ErrorCode::kUnknownFragmentIndex, "fragment " + std::to_string(index) + " of '" + lfn + "'");
  FragmentMeta& frag = it->second.fragments[index];
  auto pos = std::find_if(frag.replicas.begin(), frag.replicas.end(),
                          [&](const ReplicaLocation& r) { return r.node_id == node_id; });
  if (pos == frag.replicas.end())
    fail(ErrorCode::kUnknownReplica, "no replica of fragment " + std::to_string(index) +
                                         " on node '" + node_id + "'");
  if (frag.replicas.size() == 1)
    fail(ErrorCode::kLastReplica, "refusing to remove the last replica of fragment " +
                                      std::to_string(index) + " of '" + lfn + "'");
  frag.replicas.erase(pos);
  check_entry(it->second);
  return it->second;
}

LogicalFileEntry Catalog::remove_replica(const std::string& lfn, uint32_t index,
                                         const std::string& node_id) {
  std::unique_lock lock(mu_);
  // Capture the removed replica so a failed log append can restore it.
  auto it = files_.find(lfn);
  std::optional<ReplicaLocation> removed;
  if (it != files_.end() && index < it->second.fragments.size()) {
    for (const auto& r : it->second.fragments[index].replicas)
      if (r.node_id == node_id) removed = r;
  }
  LogicalFileEntry entry = apply_remove_replica(lfn, index, node_id);
  if (log_) {
    std::string record = "RM ";
    record += percent_encode(lfn);
    record += ' ';
    record += std::to_string(index);
    record += ' ';
    record += percent_encode(node_id);
    try {
      log_->append(record);
    } catch (...) {
      if (removed) files_[lfn].fragments[index].replicas.push_back(*removed);
      throw;
    }
  }
  return entry;
}

LogicalFileEntry Catalog::lookup(const std::string& lfn) const {
  std::shared_lock lock(mu_);
  auto it = files_.find(lfn);
  if (it == files_.end()) fail(ErrorCode::kUnknownFile, "'" + lfn + "' not registered");
  return it->second;
}

std::vector<LogicalFileEntry> Catalog::list_files(const std::string& glob_pattern) const {
  std::shared_lock lock(mu_);
  std::vector<LogicalFileEntry> out;
  for (const auto& [lfn, entry] : files_)
    if (glob_match(glob_pattern, lfn)) out.push_back(entry);
  return out;  // map iteration order is already lexicographic
}

void Catalog::upsert_node(const NodeInfo& node) {
  if (node.node_id.empty()) fail(ErrorCode::kInvalidArgument, "empty node_id");
  std::unique_lock lock(mu_);
  auto prev = nodes_.find(node.node_id);
  std::optional<NodeInfo> old;
  if (prev != nodes_.end()) old = prev->second;
  nodes_[node.node_id] = node;
  if (log_) {
    std::string record = "NODE ";
    record += percent_encode(node.node_id);
    record += ' ';
    record += percent_encode(node.address);
    record += ' ';
    record += percent_encode(node.storage_root);
    record += ' ';
    record += std::to_string(node.rate_limit_bps);
    record += ' ';
    record += node.up ? "up" : "down";
    try {
      log_->append(record);
    } catch (...) {
      if (old)
        nodes_[node.node_id] = *old;
      else
        nodes_.erase(node.node_id);
      throw;
    }
  }
}

std::vector<NodeInfo> Catalog::nodes() const {
  std::shared_lock lock(mu_);
  std::vector<NodeInfo> out;
  out.reserve(nodes_.size());
  for (const auto& [id, n] : nodes_) out.push_back(n);
  return out;
}

std::optional<NodeInfo> Catalog::find_node(const std::string& node_id) const {
  std::shared_lock lock(mu_);
  auto it = nodes_.find(node_id);
  if (it == nodes_.end()) return std::nullopt;
  return it->second;
}

size_t Catalog::file_count() const {
  std::shared_lock lock(mu_);
  return files_.size();
}

void Catalog::apply_record(const std::string& payload) {
  auto tokens = split_ws(payload);
  if (tokens.empty()) fail(ErrorCode::kCorruptRecord, "empty record");
  std::string_view verb = tokens[0];
  try {
    if (verb == "REG") {
      if (tokens.size() < 3) fail(ErrorCode::kCorruptRecord, "short REG record");
      std::string lfn = percent_decode(tokens[1]);
      size_t n = parse_u64(tokens[2]);
      if (tokens.size() != 3 + n) fail(ErrorCode::kCorruptRecord, "REG fragment count mismatch");
      std::vector<FragmentMeta> metas;
      metas.reserve(n);
      for (size_t i = 0; i < n; ++i) metas.push_back(decode_fragment(tokens[3 + i]));
      apply_register(lfn, std::move(metas));
    } else if (verb == "ADD") {
      if (tokens.size() != 6) fail(ErrorCode::kCorruptRecord, "bad ADD record");
      ReplicaLocation loc;
      loc.node_id = percent_decode(tokens[3]);
      loc.path = percent_decode(tokens[4]);
      loc.crc32 = parse_hex_u32(tokens[5]);
      apply_add_replica(percent_decode(tokens[1]), static_cast<uint32_t>(parse_u64(tokens[2])), loc);
    } else if (verb == "RM") {
      if (tokens.size() != 4) fail(ErrorCode::kCorruptRecord, "bad RM record");
      apply_remove_replica(percent_decode(tokens[1]), static_cast<uint32_t>(parse_u64(tokens[2])),
                           percent_decode(tokens[3]));
    } else if (verb == "NODE") {
      if (tokens.size() != 6) fail(ErrorCode::kCorruptRecord, "bad NODE record");
      NodeInfo node;
      node.node_id = percent_decode(tokens[1]);
      node.address = percent_decode(tokens[2]);
      node.storage_root = percent_decode(tokens[3]);
      node.rate_limit_bps = parse_u64(tokens[4]);
      node.up = tokens[5] == "up";
      nodes_[node.node_id] = node;
    } else {
      fail(ErrorCode::kCorruptRecord, "unknown record verb '" + std::string(verb) + "'");
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptRecord) throw;
    fail(ErrorCode::kCorruptRecord, std::string("record replay failed: ") + e.what());
  }
}

std::string Catalog::dump_canonical() const {
  std::shared_lock lock(mu_);
  std::string out;
  for (const auto& [id, n] : nodes_) {
    out += "node ";
    out += percent_encode(id);
    out += ' ';
    out += percent_encode(n.address);
    out += ' ';
    out += percent_encode(n.storage_root);
    out += ' ';
    out += std::to_string(n.rate_limit_bps);
    out += ' ';
    out += n.up ? "up" : "down";
    out += '\n';
  }
  for (const auto& [lfn, entry] : files_) {
    out += "file ";
    out += percent_encode(lfn);
    out += ' ';
    out += std::to_string(entry.n_fragments);
    out += ' ';
    out += std::to_string(entry.total_size);
    out += '\n';
    for (const auto& f : entry.fragments) {
      out += "  frag ";
      out += std::to_string(f.index);
      out += ' ';
      out += std::to_string(f.size_bytes);
      out += ' ';
      out += hex_u32(f.crc32);
      out += '\n';
      for (const auto& r : f.replicas) {
        out += "    rep ";
        out += percent_encode(r.node_id);
        out += ' ';
        out += percent_encode(r.path);
        out += '\n';
      }
    }
  }
  return out;
}

}  // namespace df

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

#include "df/catalog_protocol.hpp"

#include "df/bytes.hpp"

namespace df {

std::string format_fragment_arg(const FragmentMeta& f) {
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

FragmentMeta parse_fragment_arg(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() < 3) fail(ErrorCode::kProtocol, "bad fragment field '" + std::string(text) + "'");
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

std::string format_entry(const LogicalFileEntry& entry) {
  std::string out = percent_encode(entry.lfn);
  out += ' ';
  out += std::to_string(entry.n_fragments);
  out += ' ';
  out += std::to_string(entry.total_size);
  out += ' ';
  for (size_t i = 0; i < entry.fragments.size(); ++i) {
    if (i) out += ';';
    out += format_fragment_arg(entry.fragments[i]);
  }
  return out;
}

LogicalFileEntry parse_entry(std::string_view text) {
  auto tokens = split_ws(text);
  if (tokens.size() != 4) fail(ErrorCode::kProtocol, "bad entry encoding");
  LogicalFileEntry entry;
  entry.lfn = percent_decode(tokens[0]);
  entry.n_fragments = static_cast<uint32_t>(parse_u64(tokens[1]));
  entry.total_size = parse_u64(tokens[2]);
  for (auto frag : split(tokens[3], ';'))
    if (!frag.empty()) entry.fragments.push_back(parse_fragment_arg(frag));
  if (entry.fragments.size() != entry.n_fragments)
    fail(ErrorCode::kProtocol, "entry fragment count mismatch");
  return entry;
}

std::string format_node(const NodeInfo& n) {
  std::string out = percent_encode(n.node_id);
  out += ' ';
  out += percent_encode(n.address);
  out += ' ';
  out += percent_encode(n.storage_root);
  out += ' ';
  out += std::to_string(n.rate_limit_bps);
  out += ' ';
  out += n.up ? "up" : "down";
  return out;
}

NodeInfo parse_node(std::string_view text) {
  auto tokens = split_ws(text);
  if (tokens.size() != 5) fail(ErrorCode::kProtocol, "bad node encoding");
  NodeInfo n;
  n.node_id = percent_decode(tokens[0]);
  n.address = percent_decode(tokens[1]);
  n.storage_root = percent_decode(tokens[2]);
  n.rate_limit_bps = parse_u64(tokens[3]);
  n.up = tokens[4] == "up";
  return n;
}

}  // namespace df

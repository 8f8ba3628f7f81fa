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

#include "df/catalog_service.hpp"

#include "df/bytes.hpp"
#include "df/catalog_protocol.hpp"

namespace df {

CatalogService::CatalogService(Catalog& catalog, const Addr& addr) : catalog_(catalog) {
  server_ = std::make_unique<TcpServer>(TcpListener::bind(addr), [this](TcpConn& conn) {
    for (;;) {
      auto line = conn.recv_line();
      if (!line) return;
      if (line->empty()) continue;
      conn.send_all(handle_line(*line) + "\n");
    }
  });
}

CatalogService::~CatalogService() { stop(); }

void CatalogService::start() { server_->start(); }

void CatalogService::stop() { server_->stop(); }

std::string CatalogService::handle_line(const std::string& line) {
  try {
    auto tokens = split_ws(line);
    if (tokens.empty()) fail(ErrorCode::kProtocol, "empty request");
    std::string_view verb = tokens[0];

    if (verb == "REGISTER") {
      if (tokens.size() != 4) fail(ErrorCode::kProtocol, "REGISTER <lfn> <n> <frags>");
      std::string lfn = percent_decode(tokens[1]);
      size_t n = parse_u64(tokens[2]);
      std::vector<FragmentMeta> metas;
      for (auto frag : split(tokens[3], ';'))
        if (!frag.empty()) metas.push_back(parse_fragment_arg(frag));
      if (metas.size() != n) fail(ErrorCode::kProtocol, "REGISTER fragment count mismatch");
      return "OK " + format_entry(catalog_.register_file(lfn, std::move(metas)));
    }
    if (verb == "ADDREPLICA") {
      if (tokens.size() != 6) fail(ErrorCode::kProtocol, "ADDREPLICA <lfn> <index> <node> <path> <crc>");
      ReplicaLocation loc;
      loc.node_id = percent_decode(tokens[3]);
      loc.path = percent_decode(tokens[4]);
      loc.crc32 = parse_hex_u32(tokens[5]);
      return "OK " + format_entry(catalog_.add_replica(percent_decode(tokens[1]),
                                                       static_cast<uint32_t>(parse_u64(tokens[2])), loc));
    }
    if (verb == "RMREPLICA") {
      if (tokens.size() != 4) fail(ErrorCode::kProtocol, "RMREPLICA <lfn> <index> <node>");
      return "OK " + format_entry(catalog_.remove_replica(percent_decode(tokens[1]),
                                                          static_cast<uint32_t>(parse_u64(tokens[2])),
                                                          percent_decode(tokens[3])));
    }
    if (verb == "LOOKUP") {
      if (tokens.size() != 2) fail(ErrorCode::kProtocol, "LOOKUP <lfn>");
      return "OK " + format_entry(catalog_.lookup(percent_decode(tokens[1])));
    }
    if (verb == "LIST") {
      if (tokens.size() != 2) fail(ErrorCode::kProtocol, "LIST <glob>");
      auto entries = catalog_.list_files(percent_decode(tokens[1]));
      std::string out = "OK " + std::to_string(entries.size());
      for (size_t i = 0; i < entries.size(); ++i) {
        out += i ? "|" : " ";
        out += format_entry(entries[i]);
      }
      return out;
    }
    if (verb == "NODES") {
      if (tokens.size() == 1) {
        auto nodes = catalog_.nodes();
        std::string out = "OK " + std::to_string(nodes.size());
        for (size_t i = 0; i < nodes.size(); ++i) {
          out += i ? "|" : " ";
          out += format_node(nodes[i]);
        }
        return out;
      }
      if (tokens.size() != 6) fail(ErrorCode::kProtocol, "NODES <id> <addr> <root> <rate> <up|down>");
      NodeInfo node;
      node.node_id = percent_decode(tokens[1]);
      node.address = percent_decode(tokens[2]);
      node.storage_root = percent_decode(tokens[3]);
      node.rate_limit_bps = parse_u64(tokens[4]);
      node.up = tokens[5] == "up";
      catalog_.upsert_node(node);
      return "OK registered";
    }
    fail(ErrorCode::kProtocol, "unknown verb '" + std::string(verb) + "'");
  } catch (const Error& e) {
    return std::string("ERR ") + to_string(e.code()) + " " + e.what();
  } catch (const std::exception& e) {
    return std::string("ERR ") + to_string(ErrorCode::kIoFailure) + " " + e.what();
  }
}

}  // namespace df

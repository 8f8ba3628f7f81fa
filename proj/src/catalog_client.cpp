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

#include "df/catalog_client.hpp"

#include "df/bytes.hpp"
#include "df/catalog_protocol.hpp"

namespace df {

CatalogClient::CatalogClient(const Addr& addr, double timeout_seconds)
    : addr_(addr), timeout_(timeout_seconds) {}

std::string CatalogClient::request(const std::string& line) {
  std::lock_guard<std::mutex> lock(mu_);
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      if (!conn_) conn_ = TcpConn::connect(addr_, timeout_);
      conn_->send_all(line + "\n");
      auto resp = conn_->recv_line();
      if (!resp) {
        conn_.reset();
        continue;  // server closed between requests; retry on a fresh conn
      }
      return *resp;
    } catch (const Error& e) {
      conn_.reset();
      if (attempt == 1)
        fail(ErrorCode::kCatalogUnreachable,
             "catalog at " + addr_.str() + " unreachable: " + e.what());
    }
  }
  fail(ErrorCode::kCatalogUnreachable, "catalog at " + addr_.str() + " unreachable");
}

namespace {

std::string expect_ok(const std::string& resp) {
  if (resp.rfind("OK", 0) == 0) return resp.size() > 3 ? resp.substr(3) : std::string();
  if (resp.rfind("ERR ", 0) == 0) {
    auto rest = std::string_view(resp).substr(4);
    auto sp = rest.find(' ');
    auto code = error_code_from_string(rest.substr(0, sp));
    std::string msg = sp == std::string_view::npos ? "" : std::string(rest.substr(sp + 1));
    throw Error(code, msg);
  }
  fail(ErrorCode::kProtocol, "malformed catalog response: " + resp);
}

}  // namespace

LogicalFileEntry CatalogClient::register_file(const std::string& lfn,
                                              const std::vector<FragmentMeta>& metas) {
  std::string req = "REGISTER ";
  req += percent_encode(lfn);
  req += ' ';
  req += std::to_string(metas.size());
  req += ' ';
  for (size_t i = 0; i < metas.size(); ++i) {
    if (i) req += ';';
    req += format_fragment_arg(metas[i]);
  }
  return parse_entry(expect_ok(request(req)));
}

LogicalFileEntry CatalogClient::add_replica(const std::string& lfn, uint32_t index,
                                            const ReplicaLocation& loc) {
  std::string req = "ADDREPLICA ";
  req += percent_encode(lfn);
  req += ' ';
  req += std::to_string(index);
  req += ' ';
  req += percent_encode(loc.node_id);
  req += ' ';
  req += percent_encode(loc.path);
  req += ' ';
  req += hex_u32(loc.crc32);
  return parse_entry(expect_ok(request(req)));
}

LogicalFileEntry CatalogClient::remove_replica(const std::string& lfn, uint32_t index,
                                               const std::string& node_id) {
  std::string req = "RMREPLICA ";
  req += percent_encode(lfn);
  req += ' ';
  req += std::to_string(index);
  req += ' ';
  req += percent_encode(node_id);
  return parse_entry(expect_ok(request(req)));
}

LogicalFileEntry CatalogClient::lookup(const std::string& lfn) {
  return parse_entry(expect_ok(request("LOOKUP " + percent_encode(lfn))));
}

std::vector<LogicalFileEntry> CatalogClient::list(const std::string& glob_pattern) {
  std::string payload = expect_ok(request("LIST " + percent_encode(glob_pattern)));
  auto sp = payload.find(' ');
  size_t count = parse_u64(std::string_view(payload).substr(0, sp));
  std::vector<LogicalFileEntry> out;
  if (count == 0) return out;
  for (auto part : split(std::string_view(payload).substr(sp + 1), '|'))
    out.push_back(parse_entry(part));
  if (out.size() != count) fail(ErrorCode::kProtocol, "LIST count mismatch");
  return out;
}

std::vector<NodeInfo> CatalogClient::nodes() {
  std::string payload = expect_ok(request("NODES"));
  auto sp = payload.find(' ');
  size_t count = parse_u64(std::string_view(payload).substr(0, sp));
  std::vector<NodeInfo> out;
  if (count == 0) return out;
  for (auto part : split(std::string_view(payload).substr(sp + 1), '|'))
    out.push_back(parse_node(part));
  if (out.size() != count) fail(ErrorCode::kProtocol, "NODES count mismatch");
  return out;
}

void CatalogClient::announce_node(const NodeInfo& node) {
  std::string req = "NODES ";
  req += percent_encode(node.node_id);
  req += ' ';
  req += percent_encode(node.address);
  req += ' ';
  req += percent_encode(node.storage_root);
  req += ' ';
  req += std::to_string(node.rate_limit_bps);
  req += ' ';
  req += node.up ? "up" : "down";
  expect_ok(request(req));
}

}  // namespace df

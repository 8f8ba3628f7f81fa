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

#include "df/node_client.hpp"

#include "df/bytes.hpp"

namespace df {

namespace {

void put_fragment_ref(std::string& out, std::string_view lfn, uint32_t index) {
  put_u16le(out, static_cast<uint16_t>(lfn.size()));
  out += lfn;
  put_u32le(out, index);
}

}  // namespace

NodeClient::NodeClient(const Addr& addr, double timeout_seconds)
    : addr_(addr), timeout_(timeout_seconds) {}

std::string NodeClient::request(MsgType type, std::string body) {
  std::lock_guard<std::mutex> lock(mu_);
  if (!conn_) conn_ = TcpConn::connect(addr_, timeout_);
  try {
    std::string frame;
    put_u32le(frame, static_cast<uint32_t>(body.size()));
    put_u8(frame, static_cast<uint8_t>(type));
    frame += body;
    conn_->send_all(frame);

    char header[5];
    if (!conn_->recv_exact(header, sizeof(header)))
      fail(ErrorCode::kProtocol, "node closed connection");
    ByteReader hr(std::string_view(header, sizeof(header)));
    uint32_t body_len = hr.u32le();
    uint8_t status = hr.u8();
    std::string resp(body_len, '\0');
    if (body_len && !conn_->recv_exact(resp.data(), body_len))
      fail(ErrorCode::kProtocol, "node closed connection mid-response");
    if (status != 0) throw Error(static_cast<ErrorCode>(status), resp);
    return resp;
  } catch (...) {
    conn_.reset();  // connection state unknown after an I/O error
    throw;
  }
}

PutResult NodeClient::put(std::string_view lfn, uint32_t index, std::string_view payload) {
  std::string body;
  put_fragment_ref(body, lfn, index);
  put_u64le(body, payload.size());
  body += payload;
  std::string resp = request(MsgType::kPut, std::move(body));
  ByteReader r(resp);
  PutResult res;
  res.size = r.u64le();
  res.crc32 = r.u32le();
  return res;
}

std::string NodeClient::get(std::string_view lfn, uint32_t index, uint64_t offset, uint64_t length) {
  std::string body;
  put_fragment_ref(body, lfn, index);
  put_u64le(body, offset);
  put_u64le(body, length);
  return request(MsgType::kGet, std::move(body));
}

uint64_t NodeClient::stat(std::string_view lfn, uint32_t index) {
  std::string body;
  put_fragment_ref(body, lfn, index);
  std::string resp = request(MsgType::kStat, std::move(body));
  ByteReader r(resp);
  return r.u64le();
}

uint32_t NodeClient::crc(std::string_view lfn, uint32_t index) {
  std::string body;
  put_fragment_ref(body, lfn, index);
  std::string resp = request(MsgType::kCrc, std::move(body));
  ByteReader r(resp);
  return r.u32le();
}

NodeHealth NodeClient::ping(bool self_test) {
  std::string body;
  if (self_test) put_u8(body, 0x01);
  std::string resp = request(MsgType::kPing, std::move(body));
  ByteReader r(resp);
  NodeHealth h;
  h.free_bytes = r.u64le();
  h.measured_write_bps = r.u64le();
  h.measured_read_bps = r.u64le();
  h.load_flags = r.u8();
  return h;
}

PutResult NodeClient::pull(std::string_view lfn, uint32_t index, const std::string& src_addr) {
  std::string body;
  put_fragment_ref(body, lfn, index);
  put_u16le(body, static_cast<uint16_t>(src_addr.size()));
  body += src_addr;
  std::string resp = request(MsgType::kPull, std::move(body));
  ByteReader r(resp);
  PutResult res;
  res.size = r.u64le();
  res.crc32 = r.u32le();
  return res;
}

}  // namespace df

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

#include "df/storage_service.hpp"

#include <condition_variable>
#include <deque>
#include <mutex>
#include <thread>

#include "df/bytes.hpp"
#include "df/catalog_client.hpp"
#include "df/node_client.hpp"

namespace df {

namespace {

constexpr uint32_t kMaxFrameBody = 256u << 20;

struct FragmentRef {
  std::string lfn;
  uint32_t index;
};

FragmentRef read_fragment_ref(ByteReader& r) {
  FragmentRef ref;
  uint16_t lfn_len = r.u16le();
  ref.lfn = r.str(lfn_len);
  ref.index = r.u32le();
  return ref;
}

}  // namespace

StorageService::StorageService(std::shared_ptr<StorageNode> node, const Addr& addr)
    : node_(std::move(node)) {
  server_ = std::make_unique<TcpServer>(TcpListener::bind(addr),
                                        [this](TcpConn& conn) { handle_conn(conn); });
}

StorageService::~StorageService() { stop(); }

void StorageService::start() { server_->start(); }

void StorageService::stop() { server_->stop(); }

void StorageService::announce(const Addr& catalog_addr) {
  CatalogClient catalog(catalog_addr);
  NodeInfo info;
  info.node_id = node_->config().node_id;
  info.address = server_->addr().str();
  info.storage_root = node_->config().root.string();
  info.rate_limit_bps = node_->config().rate_limit_bps;
  info.up = true;
  catalog.announce_node(info);
}

void StorageService::handle_conn(TcpConn& conn) {
  for (;;) {
    char header[5];
    if (!conn.recv_exact(header, sizeof(header))) return;
    ByteReader hr(std::string_view(header, sizeof(header)));
    uint32_t body_len = hr.u32le();
    uint8_t msg_type = hr.u8();
    if (body_len > kMaxFrameBody) return;  // oversized frame: drop connection
    std::string body(body_len, '\0');
    if (body_len && !conn.recv_exact(body.data(), body_len)) return;

    std::string response;
    uint8_t status = 0;
    try {
      response = handle_message(msg_type, body);
    } catch (const Error& e) {
      status = static_cast<uint8_t>(e.code());
      response = e.what();
    } catch (const std::exception& e) {
      status = static_cast<uint8_t>(ErrorCode::kIoFailure);
      response = e.what();
    }
    std::string frame;
    put_u32le(frame, static_cast<uint32_t>(response.size()));
    put_u8(frame, status);
    frame += response;
    conn.send_all(frame);
  }
}

std::string StorageService::handle_message(uint8_t msg_type, std::string_view body) {
  ByteReader r(body);
  switch (static_cast<MsgType>(msg_type)) {
    case MsgType::kPut: {
      auto ref = read_fragment_ref(r);
      uint64_t size = r.u64le();
      if (size != r.remaining()) fail(ErrorCode::kProtocol, "PUT size/payload mismatch");
      FragmentMeta meta = node_->put_fragment(ref.lfn, ref.index, r.take(size));
      std::string out;
      put_u64le(out, meta.size_bytes);
      put_u32le(out, meta.crc32);
      return out;
    }
    case MsgType::kGet: {
      auto ref = read_fragment_ref(r);
      uint64_t offset = r.u64le();
      uint64_t length = r.u64le();
      return node_->get_fragment(ref.lfn, ref.index, offset, length);
    }
    case MsgType::kStat: {
      auto ref = read_fragment_ref(r);
      std::string out;
      put_u64le(out, node_->fragment_size(ref.lfn, ref.index));
      return out;
    }
    case MsgType::kCrc: {
      auto ref = read_fragment_ref(r);
      std::string out;
      put_u32le(out, node_->checksum(ref.lfn, ref.index));
      return out;
    }
    case MsgType::kPing: {
      bool self_test = r.remaining() > 0 && r.u8() == 0x01;
      NodeHealth health;
      if (self_test) {
        health = node_->probe();
      } else {
        health.load_flags = node_->config().load_flags;
      }
      std::string out;
      put_u64le(out, health.free_bytes);
      put_u64le(out, health.measured_write_bps);
      put_u64le(out, health.measured_read_bps);
      put_u8(out, health.load_flags);
      return out;
    }
    case MsgType::kPull: {
      auto ref = read_fragment_ref(r);
      uint16_t addr_len = r.u16le();
      std::string src_addr = r.str(addr_len);

      // Third-party pull: fetch from the source through our own put path so
      // both rate limiters apply. Reads are pipelined ahead of writes with a
      // small bounded queue; otherwise the two limiters would alternate and
      // halve the pair rate.
      NodeClient src(Addr::parse(src_addr));
      uint64_t total = src.stat(ref.lfn, ref.index);
      auto stream = node_->open_put(ref.lfn, ref.index, /*overwrite=*/true);
      uint64_t chunk = node_->config().pull_chunk_bytes;
      if (chunk == 0) chunk = 1 << 20;

      std::mutex mu;
      std::condition_variable cv;
      std::deque<std::string> queue;
      bool reader_done = false;
      bool cancel = false;
      std::exception_ptr reader_error;

      std::thread reader([&] {
        try {
          for (uint64_t off = 0; off < total;) {
            uint64_t len = std::min(chunk, total - off);
            std::string data = src.get(ref.lfn, ref.index, off, len);
            if (data.size() != len) fail(ErrorCode::kProtocol, "short pull chunk");
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return queue.size() < 2 || cancel; });
            if (cancel) break;
            queue.push_back(std::move(data));
            cv.notify_all();
            off += len;
          }
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          reader_error = std::current_exception();
        }
        {
          std::lock_guard<std::mutex> lock(mu);
          reader_done = true;
        }
        cv.notify_all();
      });

      uint64_t written = 0;
      std::exception_ptr writer_error;
      try {
        while (written < total) {
          std::string data;
          {
            std::unique_lock<std::mutex> lock(mu);
            cv.wait(lock, [&] { return !queue.empty() || reader_done; });
            if (queue.empty()) break;  // reader finished early (error)
            data = std::move(queue.front());
            queue.pop_front();
            cv.notify_all();
          }
          stream.append(data);
          written += data.size();
        }
      } catch (...) {
        writer_error = std::current_exception();
        std::lock_guard<std::mutex> lock(mu);
        cancel = true;
        cv.notify_all();
      }
      reader.join();
      if (writer_error) std::rethrow_exception(writer_error);
      if (reader_error) std::rethrow_exception(reader_error);
      if (written != total) fail(ErrorCode::kIoFailure, "pull ended short");

      FragmentMeta meta = stream.commit();
      std::string out;
      put_u64le(out, meta.size_bytes);
      put_u32le(out, meta.crc32);
      return out;
    }
  }
  fail(ErrorCode::kProtocol, "unknown message type " + std::to_string(msg_type));
}

}  // namespace df

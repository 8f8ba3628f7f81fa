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

#include "df/storage.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <sys/statvfs.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstring>
#include <random>

#include "df/bytes.hpp"
#include "df/error.hpp"

namespace df {

namespace fs = std::filesystem;

namespace {

constexpr size_t kIoChunk = 256 * 1024;  // throttle granularity

uint32_t fnv1a32(std::string_view s) {
  uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

[[noreturn]] void fail_io(const std::string& what) {
  if (errno == ENOSPC) fail(ErrorCode::kDiskFull, what + ": " + std::strerror(errno));
  fail(ErrorCode::kIoFailure, what + ": " + std::strerror(errno));
}

std::string tmp_suffix() {
  static std::atomic<uint64_t> counter{0};
  return ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
}

}  // namespace

StorageNode::StorageNode(StorageConfig config)
    : config_(std::move(config)), bucket_(config_.rate_limit_bps) {
  std::error_code ec;
  fs::create_directories(config_.root, ec);
  if (ec) fail(ErrorCode::kIoFailure, "cannot create storage root " + config_.root.string());
}

std::string StorageNode::escape_lfn(std::string_view lfn) {
  std::string out;
  out.reserve(lfn.size());
  for (char c : lfn) {
    if (c == '%')
      out += "%25";
    else if (c == '/')
      out += "%2F";
    else
      out.push_back(c);
  }
  return out;
}

fs::path StorageNode::fragment_path(const fs::path& root, std::string_view lfn, uint32_t index) {
  std::string escaped = escape_lfn(lfn);
  uint32_t h = fnv1a32(escaped);
  char bucket[3];
  std::snprintf(bucket, sizeof(bucket), "%02x", (h >> 24) & 0xFF);
  return root / bucket / (escaped + "." + std::to_string(index) + ".frag");
}

// ---------------------------------------------------------------------------
// PutStream
// ---------------------------------------------------------------------------

StorageNode::PutStream::PutStream(StorageNode& node, std::string lfn, uint32_t index, bool overwrite)
    : node_(&node), lfn_(std::move(lfn)), index_(index), overwrite_(overwrite) {
  final_path_ = node.fragment_path(lfn_, index_);
  if (!overwrite_ && fs::exists(final_path_))
    fail(ErrorCode::kExists, "fragment already present: " + final_path_.string());
  std::error_code ec;
  fs::create_directories(final_path_.parent_path(), ec);
  tmp_path_ = final_path_;
  tmp_path_ += tmp_suffix();
  fd_ = ::open(tmp_path_.c_str(), O_WRONLY | O_CREAT | O_EXCL | O_CLOEXEC, 0644);
  if (fd_ < 0) fail_io("open " + tmp_path_.string());
}

StorageNode::PutStream::PutStream(PutStream&& other) noexcept
    : node_(other.node_),
      lfn_(std::move(other.lfn_)),
      index_(other.index_),
      overwrite_(other.overwrite_),
      tmp_path_(std::move(other.tmp_path_)),
      final_path_(std::move(other.final_path_)),
      fd_(other.fd_),
      size_(other.size_),
      crc_(other.crc_),
      done_(other.done_) {
  other.fd_ = -1;
  other.done_ = true;
}

StorageNode::PutStream::~PutStream() {
  if (!done_) abort();
}

void StorageNode::PutStream::append(std::string_view bytes) {
  size_t off = 0;
  while (off < bytes.size()) {
    size_t n = std::min(kIoChunk, bytes.size() - off);
    node_->bucket_.acquire(n);
    size_t written = 0;
    while (written < n) {
      ssize_t w = ::write(fd_, bytes.data() + off + written, n - written);
      if (w < 0) {
        if (errno == EINTR) continue;
        fail_io("write " + tmp_path_.string());
      }
      written += static_cast<size_t>(w);
    }
    crc_.update(bytes.substr(off, n));
    size_ += n;
    off += n;
  }
}

FragmentMeta StorageNode::PutStream::commit() {
  if (done_) fail(ErrorCode::kIoFailure, "put stream already finished");
  if (::fsync(fd_) != 0) fail_io("fsync " + tmp_path_.string());
  ::close(fd_);
  fd_ = -1;
  if (overwrite_) {
    if (::rename(tmp_path_.c_str(), final_path_.c_str()) != 0) fail_io("rename into place");
  } else {
    // link+unlink keeps the no-overwrite guarantee atomic: a concurrent
    // writer of the same path loses with EEXIST.
    if (::link(tmp_path_.c_str(), final_path_.c_str()) != 0) {
      int err = errno;
      ::unlink(tmp_path_.c_str());
      done_ = true;
      if (err == EEXIST)
        fail(ErrorCode::kExists, "fragment already present: " + final_path_.string());
      errno = err;
      fail_io("link into place");
    }
    ::unlink(tmp_path_.c_str());
  }
  done_ = true;
  FragmentMeta meta;
  meta.index = index_;
  meta.size_bytes = size_;
  meta.crc32 = crc_.value();
  meta.replicas.push_back({node_->config_.node_id, final_path_.string(), meta.crc32});
  return meta;
}

void StorageNode::PutStream::abort() {
  if (done_) return;
  if (fd_ >= 0) ::close(fd_);
  fd_ = -1;
  ::unlink(tmp_path_.c_str());
  done_ = true;
}

StorageNode::PutStream StorageNode::open_put(std::string_view lfn, uint32_t index, bool overwrite) {
  return PutStream(*this, std::string(lfn), index, overwrite);
}

FragmentMeta StorageNode::put_fragment(std::string_view lfn, uint32_t index, std::string_view bytes,
                                       bool overwrite) {
  PutStream stream = open_put(lfn, index, overwrite);
  stream.append(bytes);
  return stream.commit();
}

std::string StorageNode::get_fragment(std::string_view lfn, uint32_t index, uint64_t offset,
                                      uint64_t length) {
  fs::path path = fragment_path(lfn, index);
  int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0)
    fail(ErrorCode::kNotFound, "no fragment " + std::to_string(index) + " of '" + std::string(lfn) +
                                   "' at " + path.string());
  struct stat st{};
  if (::fstat(fd, &st) != 0) {
    ::close(fd);
    fail_io("stat " + path.string());
  }
  uint64_t size = static_cast<uint64_t>(st.st_size);
  if (offset > size) {
    ::close(fd);
    fail(ErrorCode::kRangeError, "offset " + std::to_string(offset) + " beyond size " +
                                     std::to_string(size));
  }
  if (length == 0) length = size - offset;
  if (offset + length > size) {
    ::close(fd);
    fail(ErrorCode::kRangeError, "range [" + std::to_string(offset) + ", +" +
                                     std::to_string(length) + ") beyond size " + std::to_string(size));
  }
  std::string out(length, '\0');
  uint64_t got = 0;
  while (got < length) {
    size_t n = std::min<uint64_t>(kIoChunk, length - got);
    bucket_.acquire(n);
    ssize_t r = ::pread(fd, out.data() + got, n, static_cast<off_t>(offset + got));
    if (r < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      fail_io("read " + path.string());
    }
    if (r == 0) {
      ::close(fd);
      fail(ErrorCode::kIoFailure, "short read from " + path.string());
    }
    got += static_cast<uint64_t>(r);
  }
  ::close(fd);
  return out;
}

uint64_t StorageNode::fragment_size(std::string_view lfn, uint32_t index) const {
  std::error_code ec;
  auto size = fs::file_size(fragment_path(lfn, index), ec);
  if (ec)
    fail(ErrorCode::kNotFound, "no fragment " + std::to_string(index) + " of '" + std::string(lfn) + "'");
  return size;
}

bool StorageNode::has_fragment(std::string_view lfn, uint32_t index) const {
  std::error_code ec;
  return fs::exists(fragment_path(lfn, index), ec);
}

uint32_t StorageNode::checksum(std::string_view lfn, uint32_t index) {
  fs::path path = fragment_path(lfn, index);
  int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0)
    fail(ErrorCode::kNotFound, "no fragment " + std::to_string(index) + " of '" + std::string(lfn) + "'");
  Crc32 crc;
  std::string buf(kIoChunk, '\0');
  for (;;) {
    ssize_t r = ::read(fd, buf.data(), buf.size());
    if (r < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      fail_io("read " + path.string());
    }
    if (r == 0) break;
    bucket_.acquire(static_cast<uint64_t>(r));
    crc.update(std::string_view(buf.data(), static_cast<size_t>(r)));
  }
  ::close(fd);
  return crc.value();
}

NodeHealth StorageNode::probe() {
  NodeHealth health;
  health.load_flags = config_.load_flags;

  struct statvfs vfs{};
  if (::statvfs(config_.root.c_str(), &vfs) == 0)
    health.free_bytes = static_cast<uint64_t>(vfs.f_bavail) * vfs.f_frsize;

  // Scratch size: ~0.25 s of traffic through the limiter, clamped so an
  // unlimited node still measures something and a slow node stays quick.
  uint64_t rate = config_.rate_limit_bps;
  uint64_t scratch = rate ? std::clamp<uint64_t>(rate / 4, 64 * 1024, 8ull << 20) : (4ull << 20);
  std::string payload(scratch, '\0');
  std::mt19937 rng(12345);
  for (auto& c : payload) c = static_cast<char>(rng());

  const std::string scratch_lfn = ".probe/scratch";
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  put_fragment(scratch_lfn, 0, payload, /*overwrite=*/true);
  auto t1 = clock::now();
  std::string back = get_fragment(scratch_lfn, 0);
  auto t2 = clock::now();
  std::error_code ec;
  fs::remove(fragment_path(scratch_lfn, 0), ec);

  if (back.size() != payload.size())
    fail(ErrorCode::kIoFailure, "probe read returned wrong size");
  double wsec = std::chrono::duration<double>(t1 - t0).count();
  double rsec = std::chrono::duration<double>(t2 - t1).count();
  health.measured_write_bps = wsec > 0 ? static_cast<uint64_t>(scratch / wsec) : 0;
  health.measured_read_bps = rsec > 0 ? static_cast<uint64_t>(scratch / rsec) : 0;
  return health;
}

}  // namespace df

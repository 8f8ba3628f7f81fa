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
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "df/catalog.hpp"
#include "df/crc32.hpp"
#include "df/token_bucket.hpp"

namespace df {

enum LoadFlag : uint8_t {
  kLoadExtraProcesses = 0x1,
  kLoadHighFragmentation = 0x2,
};

struct NodeHealth {
  uint64_t free_bytes = 0;
  uint64_t measured_write_bps = 0;
  uint64_t measured_read_bps = 0;
  uint8_t load_flags = 0;
};

struct StorageConfig {
  std::string node_id;
  std::filesystem::path root;
  uint64_t rate_limit_bps = 0;  // 0 = unlimited
  uint8_t load_flags = 0;       // injected load markers, echoed by probe()
  uint64_t pull_chunk_bytes = 1 << 20;
};

// Node-local fragment store. Fragments live under
//   <root>/<hh>/<escaped-lfn>.<index>.frag
// where <hh> is the first two hex digits of an FNV-1a hash of the escaped
// lfn, and escaping maps '%' -> %25 and '/' -> %2F. One token bucket
// throttles reads and writes alike when a rate limit is configured.
class StorageNode {
 public:
  explicit StorageNode(StorageConfig config);

  const StorageConfig& config() const { return config_; }
  TokenBucket& bucket() { return bucket_; }

  static std::string escape_lfn(std::string_view lfn);
  static std::filesystem::path fragment_path(const std::filesystem::path& root,
                                             std::string_view lfn, uint32_t index);
  std::filesystem::path fragment_path(std::string_view lfn, uint32_t index) const {
    return fragment_path(config_.root, lfn, index);
  }

  // Writes the fragment to a temp name, fsyncs and renames into place.
  // Returns the meta with one replica location on this node.
  FragmentMeta put_fragment(std::string_view lfn, uint32_t index, std::string_view bytes,
                            bool overwrite = false);

  // Incremental writer used by the pull path; same temp+rename discipline.
  class PutStream {
   public:
    ~PutStream();
    PutStream(PutStream&&) noexcept;
    PutStream& operator=(PutStream&&) = delete;
    void append(std::string_view bytes);
    FragmentMeta commit();
    void abort();

   private:
    friend class StorageNode;
    PutStream(StorageNode& node, std::string lfn, uint32_t index, bool overwrite);
    StorageNode* node_;
    std::string lfn_;
    uint32_t index_;
    bool overwrite_;
    std::filesystem::path tmp_path_, final_path_;
    int fd_ = -1;
    uint64_t size_ = 0;
    Crc32 crc_;
    bool done_ = false;
  };

  PutStream open_put(std::string_view lfn, uint32_t index, bool overwrite = false);

  // length 0 means "to end of fragment".
  std::string get_fragment(std::string_view lfn, uint32_t index, uint64_t offset = 0,
                           uint64_t length = 0);

  uint64_t fragment_size(std::string_view lfn, uint32_t index) const;
  uint32_t checksum(std::string_view lfn, uint32_t index);
  bool has_fragment(std::string_view lfn, uint32_t index) const;

  // Short self-test: write and read a scratch file through the limiter and
  // report the observed rates plus the configured load flags.
  NodeHealth probe();

 private:
  StorageConfig config_;
  TokenBucket bucket_;
};

}  // namespace df

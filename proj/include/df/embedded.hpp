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

#include <filesystem>
#include <memory>
#include <vector>

#include "df/catalog.hpp"
#include "df/catalog_client.hpp"
#include "df/catalog_service.hpp"
#include "df/storage.hpp"
#include "df/storage_service.hpp"

namespace df {

struct EmbeddedClusterOptions {
  uint32_t n_nodes = 1;
  std::vector<uint64_t> rate_limits_bps;  // per node; empty = unlimited
  std::filesystem::path base_dir;         // cluster state root; empty = fresh temp dir
  bool durable_catalog = true;            // log catalog mutations under base_dir
  bool remove_on_destroy = false;         // only honored for generated temp dirs
};

// Catalog service plus N storage daemons on loopback, all in-process.
// Node ids are n0..n{N-1}; roots live under <base_dir>/<node_id>.
class EmbeddedCluster {
 public:
  explicit EmbeddedCluster(EmbeddedClusterOptions options);
  ~EmbeddedCluster();

  EmbeddedCluster(const EmbeddedCluster&) = delete;
  EmbeddedCluster& operator=(const EmbeddedCluster&) = delete;

  Addr catalog_addr() const;
  Catalog& catalog() { return *catalog_; }
  std::unique_ptr<CatalogClient> make_catalog_client() const;

  uint32_t n_nodes() const { return static_cast<uint32_t>(nodes_.size()); }
  StorageNode& node(uint32_t i) { return *nodes_[i]; }
  const Addr& node_addr(uint32_t i) const;
  std::string node_id(uint32_t i) const { return "n" + std::to_string(i); }

  const std::filesystem::path& base_dir() const { return base_dir_; }

 private:
  std::filesystem::path base_dir_;
  bool owns_dir_ = false;
  bool remove_on_destroy_ = false;
  std::unique_ptr<Catalog> catalog_;
  std::unique_ptr<CatalogService> catalog_service_;
  std::vector<std::shared_ptr<StorageNode>> nodes_;
  std::vector<std::unique_ptr<StorageService>> services_;
};

}  // namespace df

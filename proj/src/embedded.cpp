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

#include "df/embedded.hpp"

#include <random>

#include "df/error.hpp"

namespace df {

namespace fs = std::filesystem;

namespace {

fs::path make_temp_dir() {
  auto base = fs::temp_directory_path();
  std::random_device rd;
  for (int i = 0; i < 64; ++i) {
    fs::path candidate = base / ("datafarm." + std::to_string(rd()));
    std::error_code ec;
    if (fs::create_directories(candidate, ec) && !ec) return candidate;
  }
  fail(ErrorCode::kIoFailure, "cannot create a temp cluster directory");
}

}  // namespace

EmbeddedCluster::EmbeddedCluster(EmbeddedClusterOptions options) {
  if (options.n_nodes < 1) fail(ErrorCode::kInvalidArgument, "need at least one node");
  if (!options.rate_limits_bps.empty() && options.rate_limits_bps.size() != options.n_nodes)
    fail(ErrorCode::kInvalidArgument, "rate_limits_bps size must match n_nodes");

  if (options.base_dir.empty()) {
    base_dir_ = make_temp_dir();
    owns_dir_ = true;
    remove_on_destroy_ = options.remove_on_destroy;
  } else {
    base_dir_ = options.base_dir;
    std::error_code ec;
    fs::create_directories(base_dir_, ec);
  }

  if (options.durable_catalog)
    catalog_ = std::make_unique<Catalog>(base_dir_ / "catalog");
  else
    catalog_ = std::make_unique<Catalog>();
  catalog_service_ = std::make_unique<CatalogService>(*catalog_, Addr{"127.0.0.1", 0});
  catalog_service_->start();

  for (uint32_t i = 0; i < options.n_nodes; ++i) {
    StorageConfig cfg;
    cfg.node_id = node_id(i);
    cfg.root = base_dir_ / cfg.node_id;
    cfg.rate_limit_bps = options.rate_limits_bps.empty() ? 0 : options.rate_limits_bps[i];
    auto node = std::make_shared<StorageNode>(cfg);
    auto service = std::make_unique<StorageService>(node, Addr{"127.0.0.1", 0});
    service->start();
    service->announce(catalog_service_->addr());
    nodes_.push_back(std::move(node));
    services_.push_back(std::move(service));
  }
}

EmbeddedCluster::~EmbeddedCluster() {
  for (auto& s : services_) s->stop();
  catalog_service_->stop();
  if (owns_dir_ && remove_on_destroy_) {
    std::error_code ec;
    fs::remove_all(base_dir_, ec);
  }
}

Addr EmbeddedCluster::catalog_addr() const { return catalog_service_->addr(); }

std::unique_ptr<CatalogClient> EmbeddedCluster::make_catalog_client() const {
  return std::make_unique<CatalogClient>(catalog_service_->addr());
}

const Addr& EmbeddedCluster::node_addr(uint32_t i) const { return services_[i]->addr(); }

}  // namespace df

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

#include <string>
#include <string_view>

#include "df/catalog.hpp"

namespace df {

// One-line text forms used by the catalog control protocol. Fields are
// percent-encoded and space-separated; fragments use ':'-separated subfields
// with replicas as node=path pairs; multiple entries/nodes join with '|'.

std::string format_entry(const LogicalFileEntry& entry);
LogicalFileEntry parse_entry(std::string_view text);

std::string format_node(const NodeInfo& node);
NodeInfo parse_node(std::string_view text);

std::string format_fragment_arg(const FragmentMeta& meta);
FragmentMeta parse_fragment_arg(std::string_view text);

}  // namespace df

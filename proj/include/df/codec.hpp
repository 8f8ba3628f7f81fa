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
#include <optional>
#include <string>
#include <string_view>

namespace df {

// Column-segment codecs. `deflate` is raw RFC 1951 applied to a stride-4
// byte-plane shuffle of the segment: plane j holds the bytes at offsets
// congruent to j mod 4 (in order), any non-multiple-of-4 tail is appended
// verbatim. The shuffle groups the like bytes of the little-endian float32
// columns so the entropy coder sees them as runs; it is exactly invertible.
enum class Codec : uint8_t {
  kStored = 0,
  kDeflate = 1,
};

std::optional<Codec> codec_from_name(std::string_view name);
const char* to_string(Codec codec);

// Segment bytes -> stored payload. Deterministic for a given input.
std::string codec_compress(Codec codec, std::string_view segment);

// Stored payload -> segment bytes. `raw_len` is the declared segment size;
// a mismatch with the decoded size is an IoFailure.
std::string codec_decompress(Codec codec, std::string_view payload, size_t raw_len);

// Exposed for tests.
std::string shuffle_planes(std::string_view data);
std::string unshuffle_planes(std::string_view data);

}  // namespace df

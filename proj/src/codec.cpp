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

#include "df/codec.hpp"

#include <zlib.h>

#include <cstring>

#include "df/error.hpp"

namespace df {

namespace {
constexpr int kDeflateLevel = 6;
constexpr int kRawWindowBits = -15;  // raw RFC 1951, no zlib header
}  // namespace

std::optional<Codec> codec_from_name(std::string_view name) {
  if (name == "stored") return Codec::kStored;
  if (name == "deflate") return Codec::kDeflate;
  return std::nullopt;
}

const char* to_string(Codec codec) {
  switch (codec) {
    case Codec::kStored: return "stored";
    case Codec::kDeflate: return "deflate";
  }
  return "unknown";
}

std::string shuffle_planes(std::string_view data) {
  const size_t words = data.size() / 4;
  std::string out(data.size(), '\0');
  for (size_t j = 0; j < 4; ++j)
    for (size_t i = 0; i < words; ++i) out[j * words + i] = data[i * 4 + j];
  std::memcpy(out.data() + 4 * words, data.data() + 4 * words, data.size() - 4 * words);
  return out;
}

std::string unshuffle_planes(std::string_view data) {
  const size_t words = data.size() / 4;
  std::string out(data.size(), '\0');
  for (size_t j = 0; j < 4; ++j)
    for (size_t i = 0; i < words; ++i) out[i * 4 + j] = data[j * words + i];
  std::memcpy(out.data() + 4 * words, data.data() + 4 * words, data.size() - 4 * words);
  return out;
}

namespace {

std::string deflate_raw(std::string_view in) {
  z_stream zs{};
  if (deflateInit2(&zs, kDeflateLevel, Z_DEFLATED, kRawWindowBits, 8, Z_DEFAULT_STRATEGY) != Z_OK)
    fail(ErrorCode::kIoFailure, "deflateInit2 failed");
  std::string out(deflateBound(&zs, static_cast<uLong>(in.size())), '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = deflate(&zs, Z_FINISH);
  if (rc != Z_STREAM_END) {
    deflateEnd(&zs);
    fail(ErrorCode::kIoFailure, "deflate failed rc=" + std::to_string(rc));
  }
  out.resize(zs.total_out);
  deflateEnd(&zs);
  return out;
}

std::string inflate_raw(std::string_view in, size_t raw_len) {
  z_stream zs{};
  if (inflateInit2(&zs, kRawWindowBits) != Z_OK) fail(ErrorCode::kIoFailure, "inflateInit2 failed");
  std::string out(raw_len, '\0');
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(in.data()));
  zs.avail_in = static_cast<uInt>(in.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  int rc = inflate(&zs, Z_FINISH);
  size_t produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != raw_len)
    fail(ErrorCode::kIoFailure, "inflate failed rc=" + std::to_string(rc) + " produced=" +
                                    std::to_string(produced) + " expected=" + std::to_string(raw_len));
  return out;
}

}  // namespace

std::string codec_compress(Codec codec, std::string_view segment) {
  switch (codec) {
    case Codec::kStored: return std::string(segment);
    case Codec::kDeflate: return deflate_raw(shuffle_planes(segment));
  }
  fail(ErrorCode::kInvalidArgument, "unknown codec");
}

std::string codec_decompress(Codec codec, std::string_view payload, size_t raw_len) {
  switch (codec) {
    case Codec::kStored: {
      if (payload.size() != raw_len)
        fail(ErrorCode::kIoFailure, "stored payload length mismatch");
      return std::string(payload);
    }
    case Codec::kDeflate: return unshuffle_planes(inflate_raw(payload, raw_len));
  }
  fail(ErrorCode::kInvalidArgument, "unknown codec");
}

}  // namespace df

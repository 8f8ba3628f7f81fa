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
#include <string>
#include <string_view>
#include <vector>

#include "df/error.hpp"

namespace df {

// Little-endian scalar append/read helpers shared by the data-plane framing,
// the event file layout and the catalog log.

inline void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

inline void put_u16le(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

inline void put_u32le(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64le(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

// Cursor over an immutable byte buffer. Throws Protocol on underrun so the
// wire decoders never read past a frame.
class ByteReader {
 public:
  explicit ByteReader(std::string_view buf) : buf_(buf) {}

  uint8_t u8() { return static_cast<uint8_t>(take(1)[0]); }

  uint16_t u16le() {
    auto s = take(2);
    return static_cast<uint16_t>(static_cast<uint8_t>(s[0]) |
                                 (static_cast<uint16_t>(static_cast<uint8_t>(s[1])) << 8));
  }

  uint32_t u32le() {
    auto s = take(4);
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(s[i]);
    return v;
  }

  uint64_t u64le() {
    auto s = take(8);
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<uint8_t>(s[i]);
    return v;
  }

  std::string_view take(size_t n) {
    if (n > buf_.size() - pos_) fail(ErrorCode::kProtocol, "short buffer");
    std::string_view s = buf_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::string str(size_t n) { return std::string(take(n)); }

  size_t remaining() const { return buf_.size() - pos_; }
  size_t pos() const { return pos_; }

 private:
  std::string_view buf_;
  size_t pos_ = 0;
};

// Percent-encoding for text-protocol fields (control plane, catalog log).
// Everything outside [A-Za-z0-9._/~-] is escaped, so field separators
// (space, tab, ':', ',', ';', '=', '|') never appear raw inside a field.

inline bool percent_safe(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
         c == '.' || c == '_' || c == '/' || c == '~' || c == '-';
}

inline std::string percent_encode(std::string_view s) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (percent_safe(c)) {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(hex[(static_cast<uint8_t>(c) >> 4) & 0xF]);
      out.push_back(hex[static_cast<uint8_t>(c) & 0xF]);
    }
  }
  return out;
}

inline int hex_digit(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

inline std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%') {
      if (i + 2 >= s.size()) fail(ErrorCode::kProtocol, "truncated percent escape");
      int hi = hex_digit(s[i + 1]);
      int lo = hex_digit(s[i + 2]);
      if (hi < 0 || lo < 0) fail(ErrorCode::kProtocol, "bad percent escape");
      out.push_back(static_cast<char>((hi << 4) | lo));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

inline std::string hex_u32(uint32_t v) {
  static const char* hex = "0123456789abcdef";
  std::string out(8, '0');
  for (int i = 7; i >= 0; --i) {
    out[i] = hex[v & 0xF];
    v >>= 4;
  }
  return out;
}

inline uint32_t parse_hex_u32(std::string_view s) {
  uint32_t v = 0;
  if (s.empty() || s.size() > 8) fail(ErrorCode::kProtocol, "bad hex field");
  for (char c : s) {
    int d = hex_digit(c);
    if (d < 0) fail(ErrorCode::kProtocol, "bad hex field");
    v = (v << 4) | static_cast<uint32_t>(d);
  }
  return v;
}

inline uint64_t parse_u64(std::string_view s) {
  if (s.empty()) fail(ErrorCode::kProtocol, "empty integer field");
  uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') fail(ErrorCode::kProtocol, "bad integer field");
    v = v * 10 + static_cast<uint64_t>(c - '0');
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// Splits on runs of spaces; no empty tokens.
inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && s[i] == ' ') ++i;
    size_t start = i;
    while (i < s.size() && s[i] != ' ') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

}  // namespace df

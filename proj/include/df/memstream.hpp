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

#include <istream>
#include <ostream>
#include <streambuf>
#include <string>
#include <string_view>

namespace df {

// Read-only, seekable istream over an external buffer. No copy.
class imemstream : private std::streambuf, public std::istream {
 public:
  explicit imemstream(std::string_view data) : std::istream(this) {
    char* p = const_cast<char*>(data.data());
    setg(p, p, p + data.size());
  }

 protected:
  std::streambuf::pos_type seekoff(std::streambuf::off_type off, std::ios_base::seekdir dir,
                                   std::ios_base::openmode) override {
    char* base = eback();
    char* target = nullptr;
    switch (dir) {
      case std::ios_base::beg: target = base + off; break;
      case std::ios_base::cur: target = gptr() + off; break;
      case std::ios_base::end: target = egptr() + off; break;
      default: return std::streambuf::pos_type(std::streambuf::off_type(-1));
    }
    if (target < base || target > egptr())
      return std::streambuf::pos_type(std::streambuf::off_type(-1));
    setg(base, target, egptr());
    return std::streambuf::pos_type(target - base);
  }

  std::streambuf::pos_type seekpos(std::streambuf::pos_type pos,
                                   std::ios_base::openmode which) override {
    return seekoff(std::streambuf::off_type(pos), std::ios_base::beg, which);
  }
};

// Append-only ostream into an owned string; steal the result when done.
class omemstream : private std::streambuf, public std::ostream {
 public:
  omemstream() : std::ostream(this) {}

  std::string take() { return std::move(data_); }
  const std::string& data() const { return data_; }

 protected:
  std::streambuf::int_type overflow(std::streambuf::int_type ch) override {
    if (ch != std::streambuf::traits_type::eof()) data_.push_back(static_cast<char>(ch));
    return ch;
  }
  std::streamsize xsputn(const char* s, std::streamsize n) override {
    data_.append(s, static_cast<size_t>(n));
    return n;
  }

 private:
  std::string data_;
};

}  // namespace df

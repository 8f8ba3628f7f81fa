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

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <thread>

namespace df {

// Blocking token bucket. One token = one byte. Capacity is a fixed window
// of 0.1 s worth of tokens and the bucket starts empty, so moving B bytes
// through a bucket of rate r takes at least B/r seconds from a cold start.
// Shared by all streams of one node; FIFO in lock-acquisition order.
class TokenBucket {
 public:
  explicit TokenBucket(uint64_t rate_bps, double burst_seconds = 0.1)
      : rate_(static_cast<double>(rate_bps)),
        capacity_(static_cast<double>(rate_bps) * burst_seconds),
        last_(Clock::now()) {}

  // Blocks until `bytes` tokens are granted. rate 0 means unlimited.
  void acquire(uint64_t bytes) {
    if (rate_ <= 0.0) return;
    Clock::time_point deadline;
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto now = Clock::now();
      if (now > last_) {
        double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(capacity_, tokens_ + elapsed * rate_);
        last_ = now;
      }
      double need = static_cast<double>(bytes);
      if (tokens_ >= need) {
        tokens_ -= need;
        return;
      }
      need -= tokens_;
      tokens_ = 0.0;
      // Advance the refill clock past `now` so concurrent acquirers queue
      // behind this grant instead of double-spending the same window.
      last_ += std::chrono::duration_cast<Clock::duration>(
          std::chrono::duration<double>(need / rate_));
      deadline = last_;
    }
    std::this_thread::sleep_until(deadline);
  }

  uint64_t rate_bps() const { return static_cast<uint64_t>(rate_); }
  bool unlimited() const { return rate_ <= 0.0; }

 private:
  using Clock = std::chrono::steady_clock;

  const double rate_;
  const double capacity_;
  std::mutex mu_;
  double tokens_ = 0.0;
  Clock::time_point last_;
};

}  // namespace df

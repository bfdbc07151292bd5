// Copyright 2026 The ReplayKit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REPLAYKIT__TIME_HPP_
#define REPLAYKIT__TIME_HPP_

#include <cmath>
#include <compare>
#include <cstdint>

namespace replaykit
{

/// Nanoseconds on a monotonic clock.  The zero point is owned by whichever
/// component stamped the value (the bus stamps receipt times relative to its
/// own construction).
using MonotonicNs = std::int64_t;

constexpr std::int64_t kNsPerSec = 1000000000;

/// Wall-style message timestamp carried inside message payloads.
/// Invariant: 0 <= nsec < 1e9.
struct Timestamp
{
  std::int64_t sec {0};
  std::int32_t nsec {0};

  auto operator<=>(const Timestamp &) const = default;

  bool valid() const {return nsec >= 0 && nsec < kNsPerSec;}

  std::int64_t to_ns() const {return sec * kNsPerSec + nsec;}

  static Timestamp from_ns(std::int64_t ns)
  {
    Timestamp t;
    t.sec = ns / kNsPerSec;
    t.nsec = static_cast<std::int32_t>(ns % kNsPerSec);
    if (t.nsec < 0) {
      t.sec -= 1;
      t.nsec += static_cast<std::int32_t>(kNsPerSec);
    }
    return t;
  }

  /// Non-negative seconds to a normalized stamp; used for virtual sim time.
  static Timestamp from_seconds(double seconds)
  {
    const double whole = std::floor(seconds);
    Timestamp t;
    t.sec = static_cast<std::int64_t>(whole);
    t.nsec = static_cast<std::int32_t>(std::llround((seconds - whole) * 1e9));
    if (t.nsec >= kNsPerSec) {
      t.sec += 1;
      t.nsec -= static_cast<std::int32_t>(kNsPerSec);
    }
    return t;
  }
};

}  // namespace replaykit

#endif  // REPLAYKIT__TIME_HPP_

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

#ifndef SUPPORT__GENERATORS_HPP_
#define SUPPORT__GENERATORS_HPP_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "replaykit/value.hpp"

namespace testsupport
{

/// Deterministic source for property tests; every generator takes one of
/// these so a failing case is reproducible from the seed alone.
class Rng
{
public:
  explicit Rng(std::uint64_t seed)
  : engine_(seed) {}

  std::uint64_t bits() {return engine_();}

  /// Uniform in [lo, hi] inclusive.
  std::int64_t range(std::int64_t lo, std::int64_t hi)
  {
    return lo + static_cast<std::int64_t>(engine_() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::size_t index(std::size_t n) {return static_cast<std::size_t>(engine_() % n);}

  bool chance(double p)
  {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_) < p;
  }

  double uniform(double lo, double hi)
  {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }

  std::mt19937_64 & engine() {return engine_;}

private:
  std::mt19937_64 engine_;
};

/// Finite double drawn from raw bit patterns (resampling non-finite
/// draws), mixed with round and extreme values.
double random_finite_double(Rng & rng);

/// Valid UTF-8 string mixing ASCII, characters that need escaping, and
/// multi-byte sequences.
std::string random_string(Rng & rng, std::size_t max_len = 16);

/// Map key: like random_string but never empty, never "$"-prefixed.
std::string random_key(Rng & rng);

/// Arbitrary value tree; `depth` bounds nesting.
replaykit::Value random_value(Rng & rng, int depth = 4);

/// Map-shaped tree with no top-level "_type" key, as a message payload.
replaykit::Value random_payload(Rng & rng, int depth = 3);

/// Unique directory under the system temp root, removed on destruction.
class TempDir
{
public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir &) = delete;
  TempDir & operator=(const TempDir &) = delete;

  const std::filesystem::path & path() const {return path_;}

private:
  std::filesystem::path path_;
};

}  // namespace testsupport

#endif  // SUPPORT__GENERATORS_HPP_

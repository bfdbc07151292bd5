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

// Query equivalence: 1,000 randomized (store state, query) pairs return
// exactly what a linear scan over the inserted rows returns, order
// included.

#include <string>

#include "acceptance.hpp"
#include "replaykit/doc_store.hpp"
#include "support/generators.hpp"
#include "support/store_oracle.hpp"

using namespace replaykit;
using acceptance::report;

int main()
{
  testsupport::Rng rng(774422);
  const acceptance::Stopwatch timer;

  const int kStores = 100;
  const int kQueriesPerStore = 10;
  int mismatches = 0;

  for (int s = 0; s < kStores; ++s) {
    testsupport::TempDir dir;
    DocStore store(dir.path());
    const auto filled = testsupport::fill_random_store(
      rng, store, "runs", 20 + static_cast<int>(rng.index(60)));

    for (int q = 0; q < kQueriesPerStore; ++q) {
      const Query query = testsupport::random_query(rng, filled);
      const auto expected = testsupport::oracle_query(filled.rows, query);
      const auto got = store.query("runs", query);
      if (!(got == expected)) {
        ++mismatches;
      }
    }
  }

  const double elapsed = timer.seconds();
  const int total = kStores * kQueriesPerStore;
  report(mismatches == 0, "1000 random queries match the linear-scan result exactly",
    std::to_string(total - mismatches) + "/" + std::to_string(total));
  report(elapsed < 30.0, "runtime under 30 s", std::to_string(elapsed) + " s");
  return acceptance::verdict();
}

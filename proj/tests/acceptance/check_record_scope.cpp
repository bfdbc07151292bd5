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

// Recording brackets: publishes that happen before the recording scope
// opens or after it closes never land in the session; what lands is
// exactly what was published inside, per topic and in order.  200
// randomized interleavings.

#include <map>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "replaykit/btree.hpp"
#include "replaykit/bus.hpp"
#include "replaykit/doc_store.hpp"
#include "replaykit/document.hpp"
#include "replaykit/message.hpp"
#include "replaykit/recorder.hpp"
#include "support/generators.hpp"

using namespace replaykit;
using acceptance::report;

namespace
{

const std::vector<std::string> kTopics {"/alpha", "/beta", "/gamma"};

std::string marker_payload(int phase, int n)
{
  return canonical_json(encode(make_planar_twist(phase * 1000.0 + n, 0.0)));
}

}  // namespace

int main()
{
  testsupport::Rng rng(33011);
  const acceptance::Stopwatch timer;

  const int kTrials = 200;
  int clean_trials = 0;

  for (int trial = 0; trial < kTrials; ++trial) {
    testsupport::TempDir dir;
    Bus bus;
    DocStore store(dir.path());
    Recorder recorder(bus, store);

    const std::size_t n_topics = 1 + rng.index(kTopics.size());
    std::vector<std::string> topics(kTopics.begin(), kTopics.begin() + n_topics);
    for (const auto & topic : topics) {
      bus.advertise(topic, types::kTwist);
    }

    // Scripted counts per topic for each phase.
    std::map<std::string, int> before;
    std::map<std::string, int> inside;
    std::map<std::string, int> after;
    for (const auto & topic : topics) {
      before[topic] = static_cast<int>(rng.index(5));
      inside[topic] = static_cast<int>(rng.index(5));
      after[topic] = static_cast<int>(rng.index(5));
    }

    const auto publish_phase = [&](int phase, std::map<std::string, int> & counts) {
        // Round-robin with random topic choice, preserving per-topic order.
        std::map<std::string, int> sent;
        int total = 0;
        for (const auto & [topic, n] : counts) {
          total += n;
        }
        while (total > 0) {
          const std::string & topic = topics[rng.index(topics.size())];
          if (sent[topic] >= counts[topic]) {
            continue;
          }
          bus.publish(topic, make_planar_twist(phase * 1000.0 + sent[topic], 0.0));
          ++sent[topic];
          --total;
        }
      };

    publish_phase(1, before);

    Node root;
    root.kind = Node::Kind::RecordScope;
    root.label = "trial";
    root.topics = topics;
    Node child;
    child.kind = Node::Kind::Action;
    child.name = "PublishInside";
    root.children.push_back(child);

    ActionRegistry registry;
    registry.register_action("PublishInside",
      [&](const Node &, TickContext &) {
        publish_phase(2, inside);
        return Status::SUCCESS;
      });
    Executor executor(registry);
    TickContext ctx;
    ctx.recorder = &recorder;
    ctx.collection = "runs";
    const Status status = executor.tick(root, ctx);

    publish_phase(3, after);

    bool ok = status == Status::SUCCESS && ctx.session_ids.size() == 1;
    if (ok) {
      Query q;
      q.session_id = ctx.session_ids.front();
      const auto rows = store.query("runs", q);

      std::map<std::string, std::vector<std::string>> got;
      for (const auto & env : rows) {
        got[env.topic].push_back(canonical_json(env.payload));
      }
      std::size_t expected_total = 0;
      for (const auto & topic : topics) {
        expected_total += inside[topic];
        std::vector<std::string> expected;
        for (int n = 0; n < inside[topic]; ++n) {
          expected.push_back(marker_payload(2, n));
        }
        ok = ok && got[topic] == expected;
      }
      ok = ok && rows.size() == expected_total;
    }
    clean_trials += ok ? 1 : 0;
  }

  report(clean_trials == kTrials,
    "captured messages equal the inside-scope set, per topic and in order",
    std::to_string(clean_trials) + "/" + std::to_string(kTrials) + " trials, " +
    std::to_string(timer.seconds()) + " s");
  return acceptance::verdict();
}

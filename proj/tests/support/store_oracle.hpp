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

#ifndef SUPPORT__STORE_ORACLE_HPP_
#define SUPPORT__STORE_ORACLE_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "replaykit/doc_store.hpp"
#include "support/generators.hpp"

namespace testsupport
{

/// Reference implementation of query semantics, written as the dumbest
/// possible linear scan over the insertion-ordered rows.  The production
/// store is compared against this; keep it independent of the store's
/// internals.
inline std::vector<replaykit::Envelope> oracle_query(
  const std::vector<replaykit::Envelope> & rows, const replaykit::Query & q)
{
  struct Tagged
  {
    const replaykit::Envelope * env;
    std::size_t insert_index;
  };
  std::vector<Tagged> kept;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const replaykit::Envelope & e = rows[i];
    if (q.session_id.has_value() && e.session_id != *q.session_id) {continue;}
    if (q.topics.has_value() && q.topics->find(e.topic) == q.topics->end()) {continue;}
    if (q.t_lo.has_value() && e.record_time < *q.t_lo) {continue;}
    if (q.t_hi.has_value() && e.record_time >= *q.t_hi) {continue;}
    if (q.behavior_prefix.has_value()) {
      const std::string & prefix = *q.behavior_prefix;
      const std::string & path = e.behavior_path;
      const bool match = prefix.empty() || path == prefix ||
        (path.size() > prefix.size() && path.rfind(prefix + "/", 0) == 0);
      if (!match) {continue;}
    }
    kept.push_back({&e, i});
  }
  std::sort(kept.begin(), kept.end(),
    [](const Tagged & a, const Tagged & b) {
      if (a.env->record_time != b.env->record_time) {
        return a.env->record_time < b.env->record_time;
      }
      if (a.env->seq != b.env->seq) {return a.env->seq < b.env->seq;}
      return a.insert_index < b.insert_index;
    });
  std::vector<replaykit::Envelope> out;
  out.reserve(kept.size());
  for (const auto & t : kept) {
    out.push_back(*t.env);
  }
  return out;
}

struct FilledStore
{
  std::vector<replaykit::Envelope> rows;  // in insertion order
  std::vector<std::string> sessions;
  std::vector<std::string> topics;
  std::vector<std::string> behavior_paths;
};

/// Populates `store`/`collection` with random sessions and envelopes,
/// returning everything inserted in order.
inline FilledStore fill_random_store(Rng & rng, replaykit::DocStore & store,
  const std::string & collection, int n_rows)
{
  FilledStore filled;
  filled.topics = {"/cmd_vel", "/robotsound", "/perception/grasp_target", "/viz/marker",
    "/nav/goto_goal"};
  filled.topics.resize(1 + rng.index(filled.topics.size()));
  filled.behavior_paths = {"nav", "nav/detour", "pick", "pick/grasp/close", "patrol"};

  const std::size_t n_sessions = 1 + rng.index(4);
  std::vector<std::uint64_t> next_seq(n_sessions, 1);
  for (std::size_t s = 0; s < n_sessions; ++s) {
    filled.sessions.push_back(replaykit::generate_session_id());
    store.begin_session(collection, filled.sessions[s],
      filled.behavior_paths[s % filled.behavior_paths.size()],
      static_cast<replaykit::MonotonicNs>(rng.index(1000)));
  }

  replaykit::MonotonicNs clock = 1000;
  for (int i = 0; i < n_rows; ++i) {
    const std::size_t s = rng.index(n_sessions);
    replaykit::Envelope env;
    env.session_id = filled.sessions[s];
    env.behavior_path = filled.behavior_paths[s % filled.behavior_paths.size()];
    env.topic = filled.topics[rng.index(filled.topics.size())];
    env.type_name = "Sample";
    // Frequent collisions in record_time exercise the ordering rule.
    clock += rng.index(3);
    env.record_time = clock;
    if (rng.chance(0.4)) {
      env.msg_stamp = replaykit::Timestamp{
        static_cast<std::int64_t>(rng.index(100)),
        static_cast<std::int32_t>(rng.index(1000000000))};
    }
    env.seq = next_seq[s]++;
    env.payload = replaykit::Value(replaykit::Value::Map{
        {"_type", replaykit::Value("Sample")},
        {"n", replaykit::Value(static_cast<std::int64_t>(i))}});
    store.insert(collection, env);
    filled.rows.push_back(std::move(env));
  }
  return filled;
}

inline replaykit::Query random_query(Rng & rng, const FilledStore & filled)
{
  replaykit::Query q;
  if (rng.chance(0.4) && !filled.sessions.empty()) {
    q.session_id = filled.sessions[rng.index(filled.sessions.size())];
  }
  if (rng.chance(0.4)) {
    std::set<std::string> topics;
    const std::size_t n = 1 + rng.index(filled.topics.size());
    for (std::size_t i = 0; i < n; ++i) {
      topics.insert(filled.topics[rng.index(filled.topics.size())]);
    }
    if (rng.chance(0.2)) {
      topics.insert("/never_used");
    }
    q.topics = std::move(topics);
  }
  if (rng.chance(0.5)) {
    q.t_lo = 1000 + static_cast<replaykit::MonotonicNs>(rng.index(600));
  }
  if (rng.chance(0.5)) {
    q.t_hi = 1000 + static_cast<replaykit::MonotonicNs>(rng.index(600));
  }
  if (rng.chance(0.4)) {
    static const char * prefixes[] = {"nav", "nav/detour", "pick", "pick/grasp", "na", ""};
    q.behavior_prefix = prefixes[rng.index(6)];
  }
  return q;
}

}  // namespace testsupport

#endif  // SUPPORT__STORE_ORACLE_HPP_

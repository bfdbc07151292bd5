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

#ifndef REPLAYKIT__REPLAYER_HPP_
#define REPLAYKIT__REPLAYER_HPP_

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "replaykit/bus.hpp"
#include "replaykit/doc_store.hpp"
#include "replaykit/errors.hpp"

namespace replaykit
{

class InvalidRate : public Error
{
public:
  explicit InvalidRate(double rate)
  : Error("replay rate must be finite and positive, got " + std::to_string(rate)),
    rate(rate) {}
  double rate;
};

/// A replay that stopped abnormally: an internal publish failed.
/// Cooperative cancel() is not an error and reports normally.
class ReplayAborted : public Error
{
public:
  explicit ReplayAborted(const std::string & why)
  : Error("replay aborted: " + why) {}
};

/// Envelopes grouped per topic, in (record_time, seq) order within each
/// stream, plus the common time origin t0 (the earliest record_time in
/// the selection).
struct ReplayPlan
{
  std::map<std::string, std::vector<Envelope>> streams;
  std::map<std::string, std::string> topic_types;
  MonotonicNs t0 {0};
  std::size_t total {0};
  double rate {1.0};
};

/// Builds the per-topic streams for `query` at `rate`.  An empty result
/// is a valid plan that replays nothing.
ReplayPlan make_plan(const DocStore & store, const std::string & collection,
  const Query & query, double rate = 1.0);

struct ReplayOptions
{
  /// Reporting threshold only: max_lateness beyond this marks the report
  /// `late`, publishes are never reordered or dropped because of it.
  std::chrono::nanoseconds tolerance {std::chrono::milliseconds(20)};
  /// When set, a worker that wakes later than this past its target skips
  /// the message instead of publishing it.  Unset replays everything.
  std::optional<std::chrono::nanoseconds> skip_if_later_than;
  /// Construction leaves the workers parked before the start barrier
  /// until release() (lets tests cancel before anything is published).
  bool hold_start {false};
};

struct ReplayReport
{
  std::size_t planned {0};
  std::size_t published {0};
  std::size_t skipped {0};
  std::map<std::string, std::size_t> per_topic_published;
  /// Max over messages of (actual - scheduled) publish time.
  std::chrono::nanoseconds max_lateness {0};
  bool late {false};      // max_lateness exceeded options.tolerance
  bool partial {false};   // cancelled before the plan finished
  std::chrono::nanoseconds wall_duration {0};
};

/// Replays one plan onto a bus: one worker per topic, a shared start
/// barrier, and a common wall origin stamped exactly once when the last
/// worker arrives.  Message k of a stream is published at
///   wall_start + (record_time_k - t0) / rate
/// and late wake-ups never reorder a stream (later messages shift back).
class ReplaySession
{
public:
  /// Advertises every stream topic (TypeConflict propagates) and spawns
  /// the workers.
  ReplaySession(const ReplayPlan & plan, Bus & bus, ReplayOptions options = {});
  ~ReplaySession();

  ReplaySession(const ReplaySession &) = delete;
  ReplaySession & operator=(const ReplaySession &) = delete;

  /// Opens the start gate (no-op unless hold_start).
  void release();

  /// Blocks until every stream finishes and returns the report.
  ReplayReport wait();

  /// Stops publishing as soon as possible.  No publish happens after
  /// this returns; the report marks the replay partial if anything was
  /// left unpublished.  Idempotent, and safe before release().
  ReplayReport cancel();

  bool finished() const;

private:
  struct Shared;
  std::shared_ptr<Shared> shared_;
};

/// Plan-and-wait convenience for the common blocking case.
ReplayReport replay(const ReplayPlan & plan, Bus & bus, ReplayOptions options = {});

}  // namespace replaykit

#endif  // REPLAYKIT__REPLAYER_HPP_

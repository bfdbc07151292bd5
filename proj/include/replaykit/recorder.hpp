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

#ifndef REPLAYKIT__RECORDER_HPP_
#define REPLAYKIT__RECORDER_HPP_

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "replaykit/bus.hpp"
#include "replaykit/doc_store.hpp"
#include "replaykit/errors.hpp"

namespace replaykit
{

class InvalidTopics : public Error
{
public:
  explicit InvalidTopics(const std::string & why)
  : Error("invalid topic list: " + why) {}
};

class AlreadyStopped : public Error
{
public:
  AlreadyStopped()
  : Error("recording already stopped") {}
};

struct RecorderOptions
{
  /// Strict: every requested topic must already be advertised when the
  /// recording starts.  Relaxed: unadvertised topics are subscribed
  /// pending their advertise (needs a permissive bus).
  bool strict_topics {true};
  /// Worker wake-up interval while idle; latency ceiling for stop().
  std::chrono::nanoseconds poll {std::chrono::milliseconds(2)};
};

struct RecordingSummary
{
  std::string session_id;
  std::string behavior_path;
  MonotonicNs started_at {0};
  MonotonicNs stopped_at {0};
  std::size_t message_count {0};
  /// Messages whose payload refused to serialize (reserved keys,
  /// non-finite floats); they are skipped, never partially written.
  std::size_t dropped {0};
  std::map<std::string, std::size_t> topic_counts;
};

/// One live recording session.  Move-only; destroying an active handle
/// stops it.
class RecordingHandle
{
public:
  RecordingHandle();
  RecordingHandle(const RecordingHandle &) = delete;
  RecordingHandle & operator=(const RecordingHandle &) = delete;
  RecordingHandle(RecordingHandle &&) noexcept;
  RecordingHandle & operator=(RecordingHandle &&) noexcept;
  ~RecordingHandle();

  bool active() const;
  const std::string & session_id() const;

  /// Flushes every delivery received before this call, closes the
  /// session, and returns its summary.  Publishes that happen after
  /// stop() returns can never appear in the session.  Throws
  /// AlreadyStopped on a second call.
  RecordingSummary stop();

private:
  friend class Recorder;
  struct State;
  explicit RecordingHandle(std::unique_ptr<State> state);
  std::unique_ptr<State> state_;
};

/// Behavior-scoped topic recorder: start() subscribes to a topic set and
/// streams every delivery into one store session as envelopes stamped
/// with the bus receipt time.
class Recorder
{
public:
  Recorder(Bus & bus, DocStore & store, RecorderOptions options = {});

  /// Begins a session in `collection` and returns its handle.  All
  /// subscriptions are established before this returns, so a message
  /// published afterward is guaranteed to be captured.
  RecordingHandle start(const std::vector<std::string> & topics,
    const std::string & behavior_path, const std::string & collection);

  Bus & bus() {return bus_;}
  DocStore & store() {return store_;}

private:
  Bus & bus_;
  DocStore & store_;
  RecorderOptions options_;
};

}  // namespace replaykit

#endif  // REPLAYKIT__RECORDER_HPP_

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

#include "replaykit/recorder.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>
#include <utility>

#include "replaykit/message.hpp"

namespace replaykit
{

struct RecordingHandle::State
{
  Bus * bus {nullptr};
  DocStore * store {nullptr};
  std::string collection;
  std::string session_id;
  std::string behavior_path;
  MonotonicNs started_at {0};
  std::chrono::nanoseconds poll {std::chrono::milliseconds(2)};

  std::atomic<bool> stopping {false};
  bool stopped {false};

  /// Guards sequence assignment and the matching insert, so envelope seq
  /// order equals store insertion order.
  std::mutex insert_mutex;
  std::uint64_t next_seq {1};
  std::size_t message_count {0};
  std::size_t dropped {0};
  std::map<std::string, std::size_t> topic_counts;

  struct Worker
  {
    std::string topic;
    Subscription sub;
    std::thread thread;
  };
  std::vector<std::unique_ptr<Worker>> workers;

  /// Last-resort cleanup; a proper shutdown goes through stop().
  ~State()
  {
    for (auto & worker : workers) {
      worker->sub.close();
    }
    stopping.store(true, std::memory_order_release);
    for (auto & worker : workers) {
      if (worker->thread.joinable()) {
        worker->thread.join();
      }
    }
  }

  void record(const std::string & topic, const Delivery & delivery)
  {
    Envelope env;
    env.session_id = session_id;
    env.behavior_path = behavior_path;
    env.topic = topic;
    env.type_name = delivery.message->type_name;
    env.record_time = delivery.receipt_time;
    env.msg_stamp = stamp_of(delivery.message->payload);

    std::lock_guard lock(insert_mutex);
    try {
      env.payload = encode(*delivery.message);
      env.seq = next_seq;
      store->insert(collection, env);
    } catch (const Error &) {
      dropped += 1;
      return;
    }
    next_seq += 1;
    message_count += 1;
    topic_counts[topic] += 1;
  }

  void run_worker(Worker & worker)
  {
    while (!stopping.load(std::memory_order_acquire)) {
      if (auto d = worker.sub.pop(poll)) {
        record(worker.topic, *d);
      }
    }
    // Drain deliveries admitted before stop() closed the queue.
    while (auto d = worker.sub.try_pop()) {
      record(worker.topic, *d);
    }
  }
};

RecordingHandle::RecordingHandle(std::unique_ptr<State> state)
: state_(std::move(state)) {}

RecordingHandle::RecordingHandle() = default;
RecordingHandle::RecordingHandle(RecordingHandle &&) noexcept = default;

RecordingHandle & RecordingHandle::operator=(RecordingHandle && other) noexcept
{
  if (this != &other) {
    if (active()) {
      try {
        stop();
      } catch (...) {
      }
    }
    state_ = std::move(other.state_);
  }
  return *this;
}

RecordingHandle::~RecordingHandle()
{
  if (active()) {
    try {
      stop();
    } catch (...) {
    }
  }
}

bool RecordingHandle::active() const
{
  return state_ != nullptr && !state_->stopped;
}

const std::string & RecordingHandle::session_id() const
{
  static const std::string empty;
  return state_ ? state_->session_id : empty;
}

RecordingSummary RecordingHandle::stop()
{
  if (!active()) {
    throw AlreadyStopped();
  }
  // Close the intake first: messages published from here on are not
  // admitted, while everything already queued stays poppable.
  for (auto & worker : state_->workers) {
    worker->sub.stop_accepting();
  }
  state_->stopping.store(true, std::memory_order_release);
  for (auto & worker : state_->workers) {
    if (worker->thread.joinable()) {
      worker->thread.join();
    }
  }
  const MonotonicNs stopped_at = state_->bus->now_ns();
  state_->store->end_session(state_->collection, state_->session_id, stopped_at);
  state_->stopped = true;

  RecordingSummary summary;
  summary.session_id = state_->session_id;
  summary.behavior_path = state_->behavior_path;
  summary.started_at = state_->started_at;
  summary.stopped_at = stopped_at;
  summary.message_count = state_->message_count;
  summary.dropped = state_->dropped;
  summary.topic_counts = state_->topic_counts;
  return summary;
}

Recorder::Recorder(Bus & bus, DocStore & store, RecorderOptions options)
: bus_(bus), store_(store), options_(options) {}

RecordingHandle Recorder::start(const std::vector<std::string> & topics,
  const std::string & behavior_path, const std::string & collection)
{
  if (topics.empty()) {
    throw InvalidTopics("must name at least one topic");
  }
  std::vector<std::string> unique_topics;
  for (const auto & topic : topics) {
    if (topic.empty()) {
      throw InvalidTopics("topic names must be non-empty");
    }
    if (std::find(unique_topics.begin(), unique_topics.end(), topic) == unique_topics.end()) {
      unique_topics.push_back(topic);
    }
  }
  if (options_.strict_topics) {
    for (const auto & topic : unique_topics) {
      if (!bus_.has_topic(topic)) {
        throw UnknownTopic(topic);
      }
    }
  }

  auto state = std::make_unique<RecordingHandle::State>();
  state->bus = &bus_;
  state->store = &store_;
  state->collection = collection;
  state->session_id = generate_session_id();
  state->behavior_path = behavior_path;
  state->started_at = bus_.now_ns();
  state->poll = options_.poll;
  store_.begin_session(collection, state->session_id, behavior_path, state->started_at);

  // Subscribe everything before spawning workers (and before returning),
  // so no message published after start() can be missed.
  for (const auto & topic : unique_topics) {
    auto worker = std::make_unique<RecordingHandle::State::Worker>();
    worker->topic = topic;
    worker->sub = bus_.subscribe(topic);
    state->workers.push_back(std::move(worker));
  }
  for (auto & worker : state->workers) {
    worker->thread = std::thread(
      [state_ptr = state.get(), worker_ptr = worker.get()] {
        state_ptr->run_worker(*worker_ptr);
      });
  }
  return RecordingHandle(std::move(state));
}

}  // namespace replaykit

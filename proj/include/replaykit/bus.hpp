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

#ifndef REPLAYKIT__BUS_HPP_
#define REPLAYKIT__BUS_HPP_

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "replaykit/errors.hpp"
#include "replaykit/message.hpp"
#include "replaykit/time.hpp"

namespace replaykit
{

class UnknownTopic : public Error
{
public:
  explicit UnknownTopic(const std::string & topic)
  : Error("unknown topic: " + topic), topic(topic) {}
  std::string topic;
};

/// Re-advertising a topic with a different type, or publishing a message
/// whose type does not match the advertised one.
class TypeConflict : public Error
{
public:
  TypeConflict(const std::string & topic, const std::string & advertised,
    const std::string & offered)
  : Error("type conflict on " + topic + ": advertised '" + advertised +
      "', offered '" + offered + "'"),
    topic(topic), advertised(advertised), offered(offered) {}
  std::string topic;
  std::string advertised;
  std::string offered;
};

class InvalidTopicName : public Error
{
public:
  explicit InvalidTopicName(const std::string & topic)
  : Error("invalid topic name: '" + topic + "'"), topic(topic) {}
  std::string topic;
};

struct TopicInfo
{
  std::string name;
  std::string type_name;
  MonotonicNs advertised_at {0};
};

/// One message as seen by a subscriber: the bus receipt time (stamped once
/// at publish, identical across subscribers), the per-topic sequence
/// number starting at 1, and the shared immutable message.
struct Delivery
{
  MonotonicNs receipt_time {0};
  std::uint64_t seq {0};
  std::shared_ptr<const TypedMessage> message;
};

struct BusOptions
{
  /// Per-subscriber queue bound.  A full queue blocks the publisher until
  /// the subscriber drains (messages are never dropped or reordered).
  std::size_t queue_capacity {4096};
  /// Strict: publish and subscribe require the topic to be advertised and
  /// publish checks the message type.  Permissive: subscribing creates a
  /// pending topic whose type binds on the first advertise.
  bool strict {true};
};

namespace detail
{
struct SubQueue;
struct Topic;
}  // namespace detail

/// Movable handle to a per-subscriber queue.  Destroying (or closing) the
/// handle detaches it: later publishes skip it, already queued messages
/// are discarded.
class Subscription
{
public:
  Subscription() = default;
  Subscription(const Subscription &) = delete;
  Subscription & operator=(const Subscription &) = delete;
  Subscription(Subscription &&) noexcept = default;
  Subscription & operator=(Subscription &&) noexcept = default;
  ~Subscription();

  /// Next delivery, waiting up to `timeout`; nullopt on timeout or when
  /// the subscription is closed and drained.
  std::optional<Delivery> pop(std::chrono::nanoseconds timeout);
  std::optional<Delivery> try_pop();

  /// Stop accepting new messages; pending ones stay poppable.  After the
  /// queue drains, pop() returns nullopt immediately.
  void stop_accepting();
  void close();

  bool valid() const {return queue_ != nullptr;}
  const std::string & topic() const;

private:
  friend class Bus;
  explicit Subscription(std::shared_ptr<detail::SubQueue> queue);
  std::shared_ptr<detail::SubQueue> queue_;
};

/// In-process topic bus.  Per-topic publishes are totally ordered, every
/// subscriber sees that order, and each delivery carries a receipt time
/// from a monotonic clock whose zero is the bus construction instant.
class Bus
{
public:
  explicit Bus(BusOptions options = {});
  ~Bus();

  Bus(const Bus &) = delete;
  Bus & operator=(const Bus &) = delete;

  /// Registers `topic` with `type_name`.  Idempotent for the same type;
  /// TypeConflict for a different one.
  TopicInfo advertise(const std::string & topic, const std::string & type_name);

  /// Delivers `message` to current subscribers of `topic` and returns the
  /// stamped delivery.  Blocks while any subscriber queue is full.
  Delivery publish(const std::string & topic, TypedMessage message);

  /// New subscription seeing only messages published after this call.
  Subscription subscribe(const std::string & topic);

  std::optional<TopicInfo> topic_info(const std::string & topic) const;
  std::vector<TopicInfo> topics() const;
  bool has_topic(const std::string & topic) const;

  /// Nanoseconds since bus construction on the monotonic clock; the
  /// domain of every receipt_time it stamps.
  MonotonicNs now_ns() const;

private:
  detail::Topic & topic_or_throw(const std::string & topic);

  BusOptions options_;
  std::chrono::steady_clock::time_point epoch_;
  mutable std::mutex topics_mutex_;
  std::vector<std::unique_ptr<detail::Topic>> topics_;
};

}  // namespace replaykit

#endif  // REPLAYKIT__BUS_HPP_

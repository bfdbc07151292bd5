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

#include "replaykit/bus.hpp"

#include <algorithm>
#include <utility>

namespace replaykit
{

namespace detail
{

struct SubQueue
{
  explicit SubQueue(std::string topic_name, std::size_t capacity)
  : topic(std::move(topic_name)), capacity(capacity) {}

  std::string topic;
  std::size_t capacity;

  std::mutex mutex;
  std::condition_variable not_empty;
  std::condition_variable not_full;
  std::deque<Delivery> items;
  bool closed {false};

  /// False once closed (the publisher skips this queue from then on).
  bool push(const Delivery & d)
  {
    std::unique_lock lock(mutex);
    not_full.wait(lock, [&] {return closed || items.size() < capacity;});
    if (closed) {return false;}
    items.push_back(d);
    not_empty.notify_one();
    return true;
  }

  std::optional<Delivery> pop(std::chrono::nanoseconds timeout)
  {
    std::unique_lock lock(mutex);
    not_empty.wait_for(lock, timeout, [&] {return closed || !items.empty();});
    if (items.empty()) {return std::nullopt;}
    Delivery d = std::move(items.front());
    items.pop_front();
    not_full.notify_one();
    return d;
  }

  std::optional<Delivery> try_pop()
  {
    std::lock_guard lock(mutex);
    if (items.empty()) {return std::nullopt;}
    Delivery d = std::move(items.front());
    items.pop_front();
    not_full.notify_one();
    return d;
  }

  void stop_accepting()
  {
    std::lock_guard lock(mutex);
    closed = true;
    not_full.notify_all();
    not_empty.notify_all();
  }

  void close()
  {
    std::lock_guard lock(mutex);
    closed = true;
    items.clear();
    not_full.notify_all();
    not_empty.notify_all();
  }
};

struct Topic
{
  TopicInfo info;
  bool advertised {false};

  /// Serializes publishes: sequence assignment, receipt stamping, and
  /// fan-out happen under this lock, which is what gives every
  /// subscriber the same total order.
  std::mutex publish_mutex;
  std::uint64_t next_seq {1};
  std::vector<std::shared_ptr<SubQueue>> queues;
};

}  // namespace detail

// --- Subscription ---------------------------------------------------------

Subscription::Subscription(std::shared_ptr<detail::SubQueue> queue)
: queue_(std::move(queue)) {}

Subscription::~Subscription()
{
  if (queue_) {queue_->close();}
}

std::optional<Delivery> Subscription::pop(std::chrono::nanoseconds timeout)
{
  if (!queue_) {return std::nullopt;}
  return queue_->pop(timeout);
}

std::optional<Delivery> Subscription::try_pop()
{
  if (!queue_) {return std::nullopt;}
  return queue_->try_pop();
}

void Subscription::stop_accepting()
{
  if (queue_) {queue_->stop_accepting();}
}

void Subscription::close()
{
  if (queue_) {queue_->close();}
}

const std::string & Subscription::topic() const
{
  static const std::string empty;
  return queue_ ? queue_->topic : empty;
}

// --- Bus ------------------------------------------------------------------

namespace
{

bool topic_name_ok(const std::string & name)
{
  if (name.empty() || name[0] != '/') {return false;}
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
      (c >= '0' && c <= '9') || c == '_' || c == '/';
    if (!ok) {return false;}
  }
  return name.back() != '/' && name.find("//") == std::string::npos;
}

}  // namespace

Bus::Bus(BusOptions options)
: options_(options), epoch_(std::chrono::steady_clock::now()) {}

Bus::~Bus()
{
  std::lock_guard lock(topics_mutex_);
  for (auto & topic : topics_) {
    std::lock_guard pub_lock(topic->publish_mutex);
    for (auto & q : topic->queues) {
      q->close();
    }
  }
}

MonotonicNs Bus::now_ns() const
{
  return std::chrono::duration_cast<std::chrono::nanoseconds>(
    std::chrono::steady_clock::now() - epoch_).count();
}

TopicInfo Bus::advertise(const std::string & topic, const std::string & type_name)
{
  if (!topic_name_ok(topic)) {
    throw InvalidTopicName(topic);
  }
  if (type_name.empty()) {
    throw TypeConflict(topic, "", type_name);
  }
  std::lock_guard lock(topics_mutex_);
  for (auto & t : topics_) {
    if (t->info.name != topic) {continue;}
    if (!t->advertised) {
      // Pending entry created by a permissive subscribe; bind it now.
      t->info.type_name = type_name;
      t->info.advertised_at = now_ns();
      t->advertised = true;
      return t->info;
    }
    if (t->info.type_name != type_name) {
      throw TypeConflict(topic, t->info.type_name, type_name);
    }
    return t->info;
  }
  auto t = std::make_unique<detail::Topic>();
  t->info = TopicInfo{topic, type_name, now_ns()};
  t->advertised = true;
  topics_.push_back(std::move(t));
  return topics_.back()->info;
}

detail::Topic & Bus::topic_or_throw(const std::string & topic)
{
  for (auto & t : topics_) {
    if (t->info.name == topic) {return *t;}
  }
  throw UnknownTopic(topic);
}

Delivery Bus::publish(const std::string & topic, TypedMessage message)
{
  detail::Topic * t = nullptr;
  {
    std::lock_guard lock(topics_mutex_);
    t = &topic_or_throw(topic);
    if (!t->advertised) {
      throw UnknownTopic(topic);
    }
    if (options_.strict && message.type_name != t->info.type_name) {
      throw TypeConflict(topic, t->info.type_name, message.type_name);
    }
  }
  // The topic entry is never removed once created, so `t` stays valid
  // after topics_mutex_ is released.
  std::lock_guard pub_lock(t->publish_mutex);
  Delivery d;
  d.receipt_time = now_ns();
  d.seq = t->next_seq++;
  d.message = std::make_shared<const TypedMessage>(std::move(message));
  bool any_closed = false;
  for (auto & q : t->queues) {
    if (!q->push(d)) {any_closed = true;}
  }
  if (any_closed) {
    auto & qs = t->queues;
    qs.erase(
      std::remove_if(qs.begin(), qs.end(),
        [](const std::shared_ptr<detail::SubQueue> & q) {
          std::lock_guard l(q->mutex);
          return q->closed;
        }),
      qs.end());
  }
  return d;
}

Subscription Bus::subscribe(const std::string & topic)
{
  if (!topic_name_ok(topic)) {
    throw InvalidTopicName(topic);
  }
  std::lock_guard lock(topics_mutex_);
  detail::Topic * t = nullptr;
  for (auto & entry : topics_) {
    if (entry->info.name == topic) {
      t = entry.get();
      break;
    }
  }
  if (t == nullptr) {
    if (options_.strict) {
      throw UnknownTopic(topic);
    }
    auto created = std::make_unique<detail::Topic>();
    created->info = TopicInfo{topic, "", 0};
    created->advertised = false;
    topics_.push_back(std::move(created));
    t = topics_.back().get();
  }
  auto queue = std::make_shared<detail::SubQueue>(topic, options_.queue_capacity);
  {
    std::lock_guard pub_lock(t->publish_mutex);
    t->queues.push_back(queue);
  }
  return Subscription(std::move(queue));
}

std::optional<TopicInfo> Bus::topic_info(const std::string & topic) const
{
  std::lock_guard lock(topics_mutex_);
  for (const auto & t : topics_) {
    if (t->info.name == topic && t->advertised) {return t->info;}
  }
  return std::nullopt;
}

std::vector<TopicInfo> Bus::topics() const
{
  std::lock_guard lock(topics_mutex_);
  std::vector<TopicInfo> out;
  for (const auto & t : topics_) {
    if (t->advertised) {out.push_back(t->info);}
  }
  return out;
}

bool Bus::has_topic(const std::string & topic) const
{
  return topic_info(topic).has_value();
}

}  // namespace replaykit

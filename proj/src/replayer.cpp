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

#include "replaykit/replayer.hpp"

#include <atomic>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <utility>

#include "replaykit/message.hpp"

namespace replaykit
{

ReplayPlan make_plan(const DocStore & store, const std::string & collection,
  const Query & query, double rate)
{
  if (!std::isfinite(rate) || rate <= 0.0) {
    throw InvalidRate(rate);
  }
  ReplayPlan plan;
  plan.rate = rate;
  const std::vector<Envelope> rows = store.query(collection, query);
  if (!rows.empty()) {
    plan.t0 = rows.front().record_time;
  }
  plan.total = rows.size();
  for (const Envelope & env : rows) {
    auto [it, inserted] = plan.topic_types.emplace(env.topic, env.type_name);
    (void)it;
    plan.streams[env.topic].push_back(env);
  }
  return plan;
}

namespace
{

using Clock = std::chrono::steady_clock;

/// All workers rendezvous here once released; the last arrival stamps
/// the common wall origin, exactly once.
struct StartBarrier
{
  explicit StartBarrier(std::size_t count)
  : remaining(count) {}

  std::mutex mutex;
  std::condition_variable cv;
  std::size_t remaining;
  bool open {false};
  Clock::time_point wall_start;

  Clock::time_point arrive_and_wait()
  {
    std::unique_lock lock(mutex);
    if (--remaining == 0) {
      wall_start = Clock::now();
      open = true;
      cv.notify_all();
    } else {
      cv.wait(lock, [this] {return open;});
    }
    return wall_start;
  }
};

}  // namespace

struct ReplaySession::Shared
{
  Bus * bus {nullptr};
  ReplayOptions options;
  double rate {1.0};
  MonotonicNs t0 {0};
  std::size_t planned {0};
  std::map<std::string, std::vector<Envelope>> streams;

  std::mutex control_mutex;
  std::condition_variable control_cv;
  bool released {false};
  bool cancelled {false};

  StartBarrier barrier;
  std::atomic<std::size_t> workers_done {0};
  std::size_t worker_count {0};
  std::exception_ptr failure;

  std::mutex result_mutex;
  std::size_t published {0};
  std::size_t skipped {0};
  std::map<std::string, std::size_t> per_topic_published;
  std::chrono::nanoseconds max_lateness {0};
  Clock::time_point last_activity;
  bool wall_started {false};
  Clock::time_point wall_start;

  std::mutex join_mutex;
  bool joined {false};
  std::vector<std::thread> threads;

  explicit Shared(std::size_t n_workers)
  : barrier(n_workers), worker_count(n_workers) {}

  bool wait_for_slot(Clock::time_point target)
  {
    std::unique_lock lock(control_mutex);
    control_cv.wait_until(lock, target, [this] {return cancelled;});
    return !cancelled;
  }

  void run_worker(const std::string & topic, const std::vector<Envelope> & stream)
  {
    {
      std::unique_lock lock(control_mutex);
      control_cv.wait(lock, [this] {return released || cancelled;});
    }
    // Arrive even when cancelled so the barrier always completes.
    const Clock::time_point wall = barrier.arrive_and_wait();
    {
      std::lock_guard lock(result_mutex);
      if (!wall_started) {
        wall_started = true;
        wall_start = wall;
        last_activity = wall;
      }
    }

    for (const Envelope & env : stream) {
      const auto offset = std::chrono::nanoseconds(
        std::llround(static_cast<double>(env.record_time - t0) / rate));
      const Clock::time_point target = wall + offset;
      if (!wait_for_slot(target)) {
        break;
      }
      const auto wake_lateness = Clock::now() - target;
      if (options.skip_if_later_than && wake_lateness > *options.skip_if_later_than) {
        std::lock_guard lock(result_mutex);
        skipped += 1;
        last_activity = Clock::now();
        continue;
      }
      try {
        bus->publish(topic, decode(env.payload, env.type_name, DecodeMode::Permissive));
      } catch (...) {
        std::scoped_lock locks(control_mutex, result_mutex);
        if (!failure) {
          failure = std::current_exception();
        }
        cancelled = true;
        control_cv.notify_all();
        break;
      }
      const Clock::time_point actual = Clock::now();
      std::lock_guard lock(result_mutex);
      published += 1;
      per_topic_published[topic] += 1;
      max_lateness = std::max(max_lateness, std::chrono::duration_cast<
          std::chrono::nanoseconds>(actual - target));
      last_activity = actual;
    }
    workers_done.fetch_add(1, std::memory_order_release);
  }

  void release()
  {
    std::lock_guard lock(control_mutex);
    released = true;
    control_cv.notify_all();
  }

  void cancel_flag()
  {
    std::lock_guard lock(control_mutex);
    cancelled = true;
    released = true;  // parked workers must pass the gate to exit
    control_cv.notify_all();
  }

  void join_all()
  {
    std::lock_guard lock(join_mutex);
    if (joined) {return;}
    for (auto & t : threads) {
      if (t.joinable()) {
        t.join();
      }
    }
    joined = true;
  }

  ReplayReport report()
  {
    std::lock_guard lock(result_mutex);
    ReplayReport r;
    r.planned = planned;
    r.published = published;
    r.skipped = skipped;
    r.per_topic_published = per_topic_published;
    r.max_lateness = max_lateness;
    r.late = max_lateness > options.tolerance;
    r.partial = published + skipped < planned;
    if (wall_started) {
      r.wall_duration = std::chrono::duration_cast<std::chrono::nanoseconds>(
        last_activity - wall_start);
    }
    return r;
  }
};

ReplaySession::ReplaySession(const ReplayPlan & plan, Bus & bus, ReplayOptions options)
: shared_(std::make_shared<Shared>(plan.streams.size()))
{
  shared_->bus = &bus;
  shared_->options = options;
  shared_->rate = plan.rate;
  shared_->t0 = plan.t0;
  shared_->planned = plan.total;
  shared_->streams = plan.streams;

  // Advertise before any thread exists so a type conflict surfaces here
  // and not mid-replay.
  for (const auto & [topic, type_name] : plan.topic_types) {
    bus.advertise(topic, type_name);
  }

  for (const auto & [topic, stream] : shared_->streams) {
    shared_->threads.emplace_back(
      [shared = shared_, topic_name = topic, &stream_ref = stream] {
        shared->run_worker(topic_name, stream_ref);
      });
  }
  if (!options.hold_start) {
    shared_->release();
  }
}

ReplaySession::~ReplaySession()
{
  if (shared_) {
    shared_->cancel_flag();
    shared_->join_all();
  }
}

void ReplaySession::release()
{
  shared_->release();
}

ReplayReport ReplaySession::wait()
{
  shared_->release();
  shared_->join_all();
  if (shared_->failure) {
    try {
      std::rethrow_exception(shared_->failure);
    } catch (const Error & e) {
      throw ReplayAborted(e.what());
    } catch (const std::exception & e) {
      throw ReplayAborted(e.what());
    }
  }
  return shared_->report();
}

ReplayReport ReplaySession::cancel()
{
  shared_->cancel_flag();
  shared_->join_all();
  return shared_->report();
}

bool ReplaySession::finished() const
{
  return shared_->workers_done.load(std::memory_order_acquire) == shared_->worker_count;
}

ReplayReport replay(const ReplayPlan & plan, Bus & bus, ReplayOptions options)
{
  ReplaySession session(plan, bus, options);
  return session.wait();
}

}  // namespace replaykit

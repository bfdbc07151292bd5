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

#ifndef REPLAYKIT__DOC_STORE_HPP_
#define REPLAYKIT__DOC_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "replaykit/errors.hpp"
#include "replaykit/time.hpp"
#include "replaykit/value.hpp"

namespace replaykit
{

class UnknownCollection : public Error
{
public:
  explicit UnknownCollection(const std::string & name)
  : Error("unknown collection: " + name), name(name) {}
  std::string name;
};

class UnknownSession : public Error
{
public:
  explicit UnknownSession(const std::string & session_id)
  : Error("unknown session: " + session_id), session_id(session_id) {}
  std::string session_id;
};

/// Envelope sequence numbers must be strictly increasing per session.
class SeqRegression : public Error
{
public:
  SeqRegression(const std::string & session_id, std::uint64_t offered, std::uint64_t last)
  : Error("seq regression in session " + session_id + ": " + std::to_string(offered) +
      " after " + std::to_string(last)),
    session_id(session_id), offered(offered), last(last) {}
  std::string session_id;
  std::uint64_t offered;
  std::uint64_t last;
};

class StorageFull : public Error
{
public:
  explicit StorageFull(const std::string & collection)
  : Error("collection " + collection + " exceeds the configured size limit"),
    collection(collection) {}
  std::string collection;
};

/// A collection file that does not parse; `line` is 1-based.
class CorruptCollection : public Error
{
public:
  CorruptCollection(const std::string & file, std::size_t line, const std::string & why)
  : Error("corrupt collection " + file + " at line " + std::to_string(line) + ": " + why),
    file(file), line(line) {}
  std::string file;
  std::size_t line;
};

class InvalidCollectionName : public Error
{
public:
  explicit InvalidCollectionName(const std::string & name)
  : Error("invalid collection name: '" + name + "'"), name(name) {}
  std::string name;
};

/// One stored message plus its recording context.
struct Envelope
{
  std::string session_id;
  std::string behavior_path;
  std::string topic;
  std::string type_name;
  MonotonicNs record_time {0};            // bus receipt time
  std::optional<Timestamp> msg_stamp;     // payload header.stamp, when present
  std::uint64_t seq {0};                  // per-session insert counter, 1-based
  Value payload;                          // encoded document, "_type" included

  bool operator==(const Envelope &) const = default;
};

struct SessionSummary
{
  std::string session_id;
  std::string behavior_path;
  MonotonicNs started_at {0};
  std::optional<MonotonicNs> ended_at;    // absent while open (or after a crash)
  bool open {true};
  std::size_t message_count {0};
  std::map<std::string, std::size_t> topic_counts;
};

/// All filters are conjunctive; an absent filter matches everything.
struct Query
{
  std::optional<std::string> session_id;
  std::optional<std::set<std::string>> topics;
  std::optional<MonotonicNs> t_lo;        // inclusive
  std::optional<MonotonicNs> t_hi;        // exclusive
  /// Path-component prefix: "nav" matches "nav" and "nav/detour",
  /// not "navx".  Empty matches everything.
  std::optional<std::string> behavior_prefix;
};

struct StoreOptions
{
  /// Per-collection byte budget; 0 means unlimited.
  std::uint64_t max_collection_bytes {0};
};

/// Append-only schemaless document store.  One file per collection
/// ("<name>.col") holding newline-delimited canonical documents with a
/// header line first; the in-memory index is rebuilt from the files on
/// open.  Writes go through a single writer lock; queries share a read
/// lock.  Every insert is flushed before it returns, so a crashed
/// process loses nothing it was told was stored; sessions that never
/// saw end_session read back as still open.
class DocStore
{
public:
  explicit DocStore(const std::filesystem::path & directory, StoreOptions options = {});
  ~DocStore();

  DocStore(const DocStore &) = delete;
  DocStore & operator=(const DocStore &) = delete;

  void begin_session(const std::string & collection, const std::string & session_id,
    const std::string & behavior_path, MonotonicNs at);
  void end_session(const std::string & collection, const std::string & session_id,
    MonotonicNs at);

  /// Appends one envelope.  Creates the collection (and an implicit open
  /// session) when needed.  Durable once it returns.
  void insert(const std::string & collection, const Envelope & envelope);

  /// Matching envelopes ordered by (record_time, seq), ties resolved by
  /// insertion order; the result is identical across repeated calls.
  std::vector<Envelope> query(const std::string & collection, const Query & q) const;

  std::vector<SessionSummary> list_sessions(const std::string & collection) const;
  std::vector<std::string> collections() const;
  bool has_collection(const std::string & name) const;

  const std::filesystem::path & directory() const {return directory_;}

  static bool collection_name_ok(const std::string & name);

private:
  struct CollectionState;

  CollectionState & collection_or_create(const std::string & name);
  const CollectionState & collection_or_throw(const std::string & name) const;
  void load_collection_file(const std::filesystem::path & file);
  void append_line(CollectionState & col, const std::string & line);

  std::filesystem::path directory_;
  StoreOptions options_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::unique_ptr<CollectionState>> collections_;
};

/// Random (v4-style) session identifier.
std::string generate_session_id();

}  // namespace replaykit

#endif  // REPLAYKIT__DOC_STORE_HPP_

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

#include "replaykit/doc_store.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <random>
#include <utility>

#include "replaykit/document.hpp"

namespace replaykit
{

namespace
{

constexpr char kFormatName[] = "replaykit-col";
constexpr std::int64_t kFormatVersion = 1;

std::string header_line()
{
  Value::Map m;
  m.emplace("format", Value(std::string(kFormatName)));
  m.emplace("version", Value(kFormatVersion));
  return canonical_json(Value(std::move(m)));
}

std::string envelope_line(const Envelope & env)
{
  Value::Map m;
  m.emplace("behavior_path", Value(env.behavior_path));
  if (env.msg_stamp) {
    m.emplace("msg_stamp", Value(Value::Map{
        {"sec", Value(env.msg_stamp->sec)},
        {"nsec", Value(static_cast<std::int64_t>(env.msg_stamp->nsec))}}));
  }
  m.emplace("payload", env.payload);
  m.emplace("record_time", Value(env.record_time));
  m.emplace("seq", Value(static_cast<std::int64_t>(env.seq)));
  m.emplace("session_id", Value(env.session_id));
  m.emplace("topic", Value(env.topic));
  m.emplace("type_name", Value(env.type_name));
  return canonical_json(Value(std::move(m)));
}

const Value & require(const Value & doc, const char * key, Value::Kind kind,
  const char * what)
{
  const Value * v = doc.find(key);
  if (v == nullptr || v->kind() != kind) {
    throw Error(std::string(what) + ": bad or missing '" + key + "'");
  }
  return *v;
}

bool component_prefix_match(const std::string & path, const std::string & prefix)
{
  if (prefix.empty()) {return true;}
  if (path.size() < prefix.size()) {return false;}
  if (path.compare(0, prefix.size(), prefix) != 0) {return false;}
  return path.size() == prefix.size() || path[prefix.size()] == '/';
}

}  // namespace

struct DocStore::CollectionState
{
  std::string name;
  std::filesystem::path file;
  std::ofstream appender;
  std::uint64_t bytes {0};

  struct SessionState
  {
    std::string behavior_path;
    MonotonicNs started_at {0};
    std::optional<MonotonicNs> ended_at;
    bool open {true};
    std::uint64_t last_seq {0};
    std::size_t message_count {0};
    std::map<std::string, std::size_t> topic_counts;
  };

  std::vector<Envelope> rows;  // insertion order
  std::map<std::string, SessionState> sessions;
  std::vector<std::string> session_order;

  SessionState & session(const std::string & id)
  {
    auto it = sessions.find(id);
    if (it == sessions.end()) {
      throw UnknownSession(id);
    }
    return it->second;
  }

  SessionState & session_or_create(const std::string & id, const std::string & behavior_path,
    MonotonicNs at)
  {
    auto it = sessions.find(id);
    if (it != sessions.end()) {return it->second;}
    SessionState s;
    s.behavior_path = behavior_path;
    s.started_at = at;
    auto [pos, inserted] = sessions.emplace(id, std::move(s));
    session_order.push_back(id);
    return pos->second;
  }
};

bool DocStore::collection_name_ok(const std::string & name)
{
  if (name.empty() || name.size() > 128) {return false;}
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
      (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) {return false;}
  }
  return name.front() != '.';
}

DocStore::DocStore(const std::filesystem::path & directory, StoreOptions options)
: directory_(directory), options_(options)
{
  std::filesystem::create_directories(directory_);
  std::vector<std::filesystem::path> files;
  for (const auto & entry : std::filesystem::directory_iterator(directory_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".col") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto & file : files) {
    load_collection_file(file);
  }
}

DocStore::~DocStore() = default;

void DocStore::load_collection_file(const std::filesystem::path & file)
{
  const std::string name = file.stem().string();
  if (!collection_name_ok(name)) {
    throw InvalidCollectionName(name);
  }
  auto col = std::make_unique<CollectionState>();
  col->name = name;
  col->file = file;

  std::ifstream in(file, std::ios::binary);
  if (!in) {
    throw Error("cannot open " + file.string());
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    col->bytes += line.size() + 1;
    Value doc;
    try {
      doc = parse_document(line);
    } catch (const DocumentError & e) {
      throw CorruptCollection(file.string(), line_no, e.what());
    }
    if (!doc.is_map()) {
      throw CorruptCollection(file.string(), line_no, "document is not a map");
    }
    try {
      if (line_no == 1) {
        const Value & format = require(doc, "format", Value::Kind::String, "header");
        const Value & version = require(doc, "version", Value::Kind::Int, "header");
        if (format.as_string() != kFormatName || version.as_int() != kFormatVersion) {
          throw Error("unsupported collection format");
        }
        continue;
      }
      if (const Value * meta = doc.find("_meta")) {
        if (!meta->is_string()) {
          throw Error("'_meta' must be a string");
        }
        const std::string & kind = meta->as_string();
        const std::string sid =
          require(doc, "session_id", Value::Kind::String, "meta").as_string();
        const MonotonicNs at = require(doc, "t", Value::Kind::Int, "meta").as_int();
        if (kind == "session_open") {
          const std::string path =
            require(doc, "behavior_path", Value::Kind::String, "meta").as_string();
          col->session_or_create(sid, path, at);
        } else if (kind == "session_close") {
          auto & s = col->session(sid);
          s.ended_at = at;
          s.open = false;
        } else {
          throw Error("unknown meta kind '" + kind + "'");
        }
        continue;
      }
      Envelope env;
      env.session_id = require(doc, "session_id", Value::Kind::String, "envelope").as_string();
      env.behavior_path =
        require(doc, "behavior_path", Value::Kind::String, "envelope").as_string();
      env.topic = require(doc, "topic", Value::Kind::String, "envelope").as_string();
      env.type_name = require(doc, "type_name", Value::Kind::String, "envelope").as_string();
      env.record_time = require(doc, "record_time", Value::Kind::Int, "envelope").as_int();
      env.seq = static_cast<std::uint64_t>(
        require(doc, "seq", Value::Kind::Int, "envelope").as_int());
      env.payload = require(doc, "payload", Value::Kind::Map, "envelope");
      if (const Value * stamp = doc.find("msg_stamp")) {
        const Value & sec = require(*stamp, "sec", Value::Kind::Int, "msg_stamp");
        const Value & nsec = require(*stamp, "nsec", Value::Kind::Int, "msg_stamp");
        env.msg_stamp = Timestamp{sec.as_int(), static_cast<std::int32_t>(nsec.as_int())};
      }
      auto & session = col->session_or_create(env.session_id, env.behavior_path,
        env.record_time);
      if (env.seq <= session.last_seq) {
        throw Error("seq " + std::to_string(env.seq) + " not increasing");
      }
      session.last_seq = env.seq;
      session.message_count += 1;
      session.topic_counts[env.topic] += 1;
      col->rows.push_back(std::move(env));
    } catch (const CorruptCollection &) {
      throw;
    } catch (const Error & e) {
      throw CorruptCollection(file.string(), line_no, e.what());
    }
  }
  if (line_no == 0) {
    throw CorruptCollection(file.string(), 1, "missing header line");
  }

  col->appender.open(file, std::ios::binary | std::ios::app);
  if (!col->appender) {
    throw Error("cannot open " + file.string() + " for append");
  }
  collections_.emplace(name, std::move(col));
}

DocStore::CollectionState & DocStore::collection_or_create(const std::string & name)
{
  auto it = collections_.find(name);
  if (it != collections_.end()) {return *it->second;}
  if (!collection_name_ok(name)) {
    throw InvalidCollectionName(name);
  }
  auto col = std::make_unique<CollectionState>();
  col->name = name;
  col->file = directory_ / (name + ".col");
  col->appender.open(col->file, std::ios::binary | std::ios::trunc);
  if (!col->appender) {
    throw Error("cannot create " + col->file.string());
  }
  const std::string header = header_line();
  col->appender << header << '\n';
  col->appender.flush();
  col->bytes = header.size() + 1;
  auto [pos, inserted] = collections_.emplace(name, std::move(col));
  return *pos->second;
}

const DocStore::CollectionState & DocStore::collection_or_throw(const std::string & name) const
{
  auto it = collections_.find(name);
  if (it == collections_.end()) {
    throw UnknownCollection(name);
  }
  return *it->second;
}

void DocStore::append_line(CollectionState & col, const std::string & line)
{
  if (options_.max_collection_bytes > 0 &&
    col.bytes + line.size() + 1 > options_.max_collection_bytes)
  {
    throw StorageFull(col.name);
  }
  col.appender << line << '\n';
  col.appender.flush();
  if (!col.appender) {
    throw Error("write to " + col.file.string() + " failed");
  }
  col.bytes += line.size() + 1;
}

void DocStore::begin_session(const std::string & collection, const std::string & session_id,
  const std::string & behavior_path, MonotonicNs at)
{
  if (session_id.empty()) {
    throw Error("session id must be non-empty");
  }
  std::unique_lock lock(mutex_);
  auto & col = collection_or_create(collection);
  if (col.sessions.count(session_id) > 0) {
    throw Error("session " + session_id + " already exists in " + collection);
  }
  Value::Map m;
  m.emplace("_meta", Value("session_open"));
  m.emplace("behavior_path", Value(behavior_path));
  m.emplace("session_id", Value(session_id));
  m.emplace("t", Value(at));
  append_line(col, canonical_json(Value(std::move(m))));
  col.session_or_create(session_id, behavior_path, at);
}

void DocStore::end_session(const std::string & collection, const std::string & session_id,
  MonotonicNs at)
{
  std::unique_lock lock(mutex_);
  auto it = collections_.find(collection);
  if (it == collections_.end()) {
    throw UnknownCollection(collection);
  }
  auto & session = it->second->session(session_id);
  if (!session.open) {
    throw Error("session " + session_id + " already ended");
  }
  Value::Map m;
  m.emplace("_meta", Value("session_close"));
  m.emplace("session_id", Value(session_id));
  m.emplace("t", Value(at));
  append_line(*it->second, canonical_json(Value(std::move(m))));
  session.ended_at = at;
  session.open = false;
}

void DocStore::insert(const std::string & collection, const Envelope & envelope)
{
  if (envelope.session_id.empty()) {
    throw Error("envelope session_id must be non-empty");
  }
  if (envelope.seq == 0) {
    throw SeqRegression(envelope.session_id, 0, 0);
  }
  if (!envelope.payload.is_map()) {
    throw Error("envelope payload must be a map");
  }
  // Serialization can throw (reserved keys, non-finite floats); doing it
  // before touching any state keeps a failed insert free of side effects.
  const std::string line = envelope_line(envelope);

  std::unique_lock lock(mutex_);
  auto & col = collection_or_create(collection);
  auto & session = col.session_or_create(envelope.session_id, envelope.behavior_path,
    envelope.record_time);
  if (envelope.seq <= session.last_seq) {
    throw SeqRegression(envelope.session_id, envelope.seq, session.last_seq);
  }
  append_line(col, line);
  session.last_seq = envelope.seq;
  session.message_count += 1;
  session.topic_counts[envelope.topic] += 1;
  col.rows.push_back(envelope);
}

std::vector<Envelope> DocStore::query(const std::string & collection, const Query & q) const
{
  std::shared_lock lock(mutex_);
  const auto & col = collection_or_throw(collection);
  std::vector<Envelope> out;
  for (const auto & env : col.rows) {
    if (q.session_id && env.session_id != *q.session_id) {continue;}
    if (q.topics && q.topics->count(env.topic) == 0) {continue;}
    if (q.t_lo && env.record_time < *q.t_lo) {continue;}
    if (q.t_hi && env.record_time >= *q.t_hi) {continue;}
    if (q.behavior_prefix && !component_prefix_match(env.behavior_path, *q.behavior_prefix)) {
      continue;
    }
    out.push_back(env);
  }
  std::stable_sort(out.begin(), out.end(),
    [](const Envelope & a, const Envelope & b) {
      if (a.record_time != b.record_time) {return a.record_time < b.record_time;}
      return a.seq < b.seq;
    });
  return out;
}

std::vector<SessionSummary> DocStore::list_sessions(const std::string & collection) const
{
  std::shared_lock lock(mutex_);
  const auto & col = collection_or_throw(collection);
  std::vector<SessionSummary> out;
  for (const auto & id : col.session_order) {
    const auto & s = col.sessions.at(id);
    SessionSummary summary;
    summary.session_id = id;
    summary.behavior_path = s.behavior_path;
    summary.started_at = s.started_at;
    summary.ended_at = s.ended_at;
    summary.open = s.open;
    summary.message_count = s.message_count;
    summary.topic_counts = s.topic_counts;
    out.push_back(std::move(summary));
  }
  return out;
}

std::vector<std::string> DocStore::collections() const
{
  std::shared_lock lock(mutex_);
  std::vector<std::string> names;
  for (const auto & [name, col] : collections_) {
    names.push_back(name);
  }
  return names;
}

bool DocStore::has_collection(const std::string & name) const
{
  std::shared_lock lock(mutex_);
  return collections_.count(name) > 0;
}

std::string generate_session_id()
{
  static std::mutex rng_mutex;
  static std::mt19937_64 rng(std::random_device{}());
  std::uint64_t hi;
  std::uint64_t lo;
  {
    std::lock_guard lock(rng_mutex);
    hi = rng();
    lo = rng();
  }
  // v4 layout: version nibble 4, variant bits 10.
  hi = (hi & 0xffffffffffff0fffULL) | 0x0000000000004000ULL;
  lo = (lo & 0x3fffffffffffffffULL) | 0x8000000000000000ULL;
  char buf[37];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
    static_cast<unsigned>(hi >> 32),
    static_cast<unsigned>((hi >> 16) & 0xffff),
    static_cast<unsigned>(hi & 0xffff),
    static_cast<unsigned>(lo >> 48),
    static_cast<unsigned long long>(lo & 0xffffffffffffULL));
  return std::string(buf);
}

}  // namespace replaykit

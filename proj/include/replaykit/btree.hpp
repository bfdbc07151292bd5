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

#ifndef REPLAYKIT__BTREE_HPP_
#define REPLAYKIT__BTREE_HPP_

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "replaykit/errors.hpp"
#include "replaykit/recorder.hpp"

namespace replaykit
{

class ParseError : public Error
{
public:
  ParseError(int line, int col, const std::string & why)
  : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + why),
    line(line), col(col) {}
  int line;
  int col;
};

class UnknownElement : public ParseError
{
public:
  UnknownElement(int line, int col, const std::string & element)
  : ParseError(line, col, "unknown element <" + element + ">"), element(element) {}
  std::string element;
};

class ArityError : public ParseError
{
public:
  ArityError(int line, int col, const std::string & element, const std::string & why)
  : ParseError(line, col, "<" + element + "> " + why), element(element) {}
  std::string element;
};

class DuplicateAction : public Error
{
public:
  explicit DuplicateAction(const std::string & name)
  : Error("action already registered: " + name), name(name) {}
  std::string name;
};

class UnknownAction : public Error
{
public:
  explicit UnknownAction(const std::string & name)
  : Error("action not registered: " + name), name(name) {}
  std::string name;
};

enum class Status
{
  SUCCESS,
  FAILURE,
  RUNNING,
};

const char * to_string(Status status);

/// Parsed tree node.  Control nodes restart from their first child on
/// every tick; there are no memory variants.
struct Node
{
  enum class Kind { Sequence, Fallback, Action, RecordScope };

  Kind kind;
  std::string name;                               // Action
  std::map<std::string, std::string> params;      // Action attributes besides name
  std::string label;                              // RecordScope
  std::vector<std::string> topics;                // RecordScope
  std::vector<Node> children;
  int line {0};
  int col {0};
};

/// Parses the XML-style tree text:
///
///   <Sequence>
///     <RecordScope label="nav" topics="/cmd_vel /robotsound">
///       <Action name="Drive" speed="0.4"/>
///     </RecordScope>
///   </Sequence>
///
/// Sequence and Fallback need at least one child, RecordScope exactly
/// one, Action none.  Unknown elements and malformed text raise the
/// error types above, each carrying a 1-based line and column.
Node parse_tree(const std::string & text);

struct TickContext
{
  /// Recording is skipped entirely when null; RecordScope nodes then
  /// just pass their child through.
  Recorder * recorder {nullptr};
  std::string collection;
  /// Session ids appended by RecordScope nodes, in start order.
  std::vector<std::string> session_ids;
  /// Engine notes (scope starts/stops), for logs and tests.
  std::vector<std::string> diagnostics;
};

using ActionFn = std::function<Status (const Node &, TickContext &)>;

class ActionRegistry
{
public:
  void register_action(const std::string & name, ActionFn fn);
  const ActionFn * find(const std::string & name) const;

private:
  std::map<std::string, ActionFn> actions_;
};

/// Ticks a tree against a registry.  The executor owns the recording
/// handles of RecordScope nodes that are mid-flight (their subtree
/// returned RUNNING), keyed by node identity; everything else about a
/// tick is stateless.
class Executor
{
public:
  explicit Executor(const ActionRegistry & registry);

  Status tick(const Node & root, TickContext & ctx);

  /// Ticks until the root settles, up to `max_ticks`; returns the last
  /// status (RUNNING if the budget ran out).
  Status run_to_completion(const Node & root, TickContext & ctx, int max_ticks = 10000);

private:
  Status tick_node(const Node & node, TickContext & ctx, std::vector<std::string> & scope_stack);

  const ActionRegistry & registry_;
  std::map<const Node *, RecordingHandle> open_scopes_;
};

}  // namespace replaykit

#endif  // REPLAYKIT__BTREE_HPP_

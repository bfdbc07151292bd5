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

#include "replaykit/btree.hpp"

#include <utility>

namespace replaykit
{

const char * to_string(Status status)
{
  switch (status) {
    case Status::SUCCESS: return "SUCCESS";
    case Status::FAILURE: return "FAILURE";
    case Status::RUNNING: return "RUNNING";
  }
  return "?";
}

// --- parser ---------------------------------------------------------------

namespace
{

struct Cursor
{
  const std::string & text;
  std::size_t pos {0};
  int line {1};
  int col {1};

  bool done() const {return pos >= text.size();}
  char peek() const {return text[pos];}

  bool starts_with(const char * s) const
  {
    return text.compare(pos, std::string::traits_type::length(s), s) == 0;
  }

  char take()
  {
    const char c = text[pos++];
    if (c == '\n') {
      line += 1;
      col = 1;
    } else {
      col += 1;
    }
    return c;
  }

  void skip(std::size_t n)
  {
    for (std::size_t i = 0; i < n && !done(); ++i) {
      take();
    }
  }

  [[noreturn]] void fail(const std::string & why) const
  {
    throw ParseError(line, col, why);
  }
};

bool is_space(char c)
{
  return c == ' ' || c == '\t' || c == '\n' || c == '\r';
}

bool is_name_char(char c)
{
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
         c == '_';
}

void skip_blank(Cursor & cur)
{
  while (!cur.done()) {
    if (is_space(cur.peek())) {
      cur.take();
    } else if (cur.starts_with("<!--")) {
      cur.skip(4);
      while (!cur.done() && !cur.starts_with("-->")) {
        cur.take();
      }
      if (cur.done()) {
        cur.fail("unterminated comment");
      }
      cur.skip(3);
    } else {
      break;
    }
  }
}

std::string read_name(Cursor & cur)
{
  if (cur.done() || !is_name_char(cur.peek())) {
    cur.fail("expected a name");
  }
  std::string name;
  while (!cur.done() && is_name_char(cur.peek())) {
    name.push_back(cur.take());
  }
  return name;
}

std::string read_quoted(Cursor & cur)
{
  if (cur.done() || cur.peek() != '"') {
    cur.fail("expected '\"'");
  }
  cur.take();
  std::string value;
  while (!cur.done() && cur.peek() != '"') {
    if (cur.peek() == '\n') {
      cur.fail("newline inside attribute value");
    }
    value.push_back(cur.take());
  }
  if (cur.done()) {
    cur.fail("unterminated attribute value");
  }
  cur.take();
  return value;
}

std::vector<std::string> split_topics(const std::string & raw)
{
  std::vector<std::string> out;
  std::string current;
  for (char c : raw) {
    if (c == ' ' || c == ',' || c == '\t') {
      if (!current.empty()) {
        out.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) {
    out.push_back(std::move(current));
  }
  return out;
}

Node::Kind kind_of(const std::string & element, int line, int col)
{
  if (element == "Sequence") {return Node::Kind::Sequence;}
  if (element == "Fallback") {return Node::Kind::Fallback;}
  if (element == "Action") {return Node::Kind::Action;}
  if (element == "RecordScope") {return Node::Kind::RecordScope;}
  throw UnknownElement(line, col, element);
}

const char * element_name(Node::Kind kind)
{
  switch (kind) {
    case Node::Kind::Sequence: return "Sequence";
    case Node::Kind::Fallback: return "Fallback";
    case Node::Kind::Action: return "Action";
    case Node::Kind::RecordScope: return "RecordScope";
  }
  return "?";
}

void check_node(const Node & node)
{
  const char * element = element_name(node.kind);
  switch (node.kind) {
    case Node::Kind::Sequence:
    case Node::Kind::Fallback:
      if (node.children.empty()) {
        throw ArityError(node.line, node.col, element, "needs at least one child");
      }
      break;
    case Node::Kind::Action:
      if (!node.children.empty()) {
        throw ArityError(node.line, node.col, element, "may not have children");
      }
      if (node.name.empty()) {
        throw ParseError(node.line, node.col, "<Action> needs a non-empty name attribute");
      }
      break;
    case Node::Kind::RecordScope:
      if (node.children.size() != 1) {
        throw ArityError(node.line, node.col, element,
                "needs exactly one child, got " + std::to_string(node.children.size()));
      }
      if (node.label.empty()) {
        throw ParseError(node.line, node.col, "<RecordScope> needs a non-empty label");
      }
      if (node.topics.empty()) {
        throw ParseError(node.line, node.col, "<RecordScope> needs a non-empty topics list");
      }
      break;
  }
}

Node parse_element(Cursor & cur)
{
  skip_blank(cur);
  if (cur.done() || cur.peek() != '<') {
    cur.fail("expected '<'");
  }
  Node node;
  node.line = cur.line;
  node.col = cur.col;
  cur.take();
  const std::string element = read_name(cur);
  node.kind = kind_of(element, node.line, node.col);

  // Attributes.
  while (true) {
    skip_blank(cur);
    if (cur.done()) {
      cur.fail("unterminated element");
    }
    if (cur.peek() == '>' || cur.starts_with("/>")) {
      break;
    }
    const int attr_line = cur.line;
    const int attr_col = cur.col;
    const std::string attr = read_name(cur);
    skip_blank(cur);
    if (cur.done() || cur.peek() != '=') {
      cur.fail("expected '=' after attribute name");
    }
    cur.take();
    skip_blank(cur);
    const std::string value = read_quoted(cur);
    if (attr == "name" && node.kind == Node::Kind::Action) {
      node.name = value;
    } else if (attr == "label" && node.kind == Node::Kind::RecordScope) {
      node.label = value;
    } else if (attr == "topics" && node.kind == Node::Kind::RecordScope) {
      node.topics = split_topics(value);
    } else if (node.kind == Node::Kind::Action) {
      node.params[attr] = value;
    } else {
      throw ParseError(attr_line, attr_col,
              "attribute '" + attr + "' not allowed on <" + element + ">");
    }
  }

  if (cur.starts_with("/>")) {
    cur.skip(2);
    check_node(node);
    return node;
  }
  cur.take();  // '>'

  // Children until the matching close tag.
  while (true) {
    skip_blank(cur);
    if (cur.done()) {
      cur.fail("missing </" + element + ">");
    }
    if (cur.starts_with("</")) {
      const int close_line = cur.line;
      const int close_col = cur.col;
      cur.skip(2);
      const std::string closing = read_name(cur);
      if (closing != element) {
        throw ParseError(close_line, close_col,
                "mismatched close tag </" + closing + ">, expected </" + element + ">");
      }
      skip_blank(cur);
      if (cur.done() || cur.peek() != '>') {
        cur.fail("expected '>'");
      }
      cur.take();
      break;
    }
    node.children.push_back(parse_element(cur));
  }
  check_node(node);
  return node;
}

}  // namespace

Node parse_tree(const std::string & text)
{
  Cursor cur{text};
  Node root = parse_element(cur);
  skip_blank(cur);
  if (!cur.done()) {
    cur.fail("trailing content after the root element");
  }
  return root;
}

// --- registry and executor ------------------------------------------------

void ActionRegistry::register_action(const std::string & name, ActionFn fn)
{
  if (actions_.count(name) > 0) {
    throw DuplicateAction(name);
  }
  actions_.emplace(name, std::move(fn));
}

const ActionFn * ActionRegistry::find(const std::string & name) const
{
  auto it = actions_.find(name);
  return it == actions_.end() ? nullptr : &it->second;
}

Executor::Executor(const ActionRegistry & registry)
: registry_(registry) {}

Status Executor::tick(const Node & root, TickContext & ctx)
{
  std::vector<std::string> scope_stack;
  return tick_node(root, ctx, scope_stack);
}

Status Executor::run_to_completion(const Node & root, TickContext & ctx, int max_ticks)
{
  Status status = Status::RUNNING;
  for (int i = 0; i < max_ticks && status == Status::RUNNING; ++i) {
    status = tick(root, ctx);
  }
  return status;
}

Status Executor::tick_node(const Node & node, TickContext & ctx,
  std::vector<std::string> & scope_stack)
{
  switch (node.kind) {
    case Node::Kind::Sequence:
      for (const Node & child : node.children) {
        const Status s = tick_node(child, ctx, scope_stack);
        if (s != Status::SUCCESS) {
          return s;
        }
      }
      return Status::SUCCESS;

    case Node::Kind::Fallback:
      for (const Node & child : node.children) {
        const Status s = tick_node(child, ctx, scope_stack);
        if (s != Status::FAILURE) {
          return s;
        }
      }
      return Status::FAILURE;

    case Node::Kind::Action: {
      const ActionFn * fn = registry_.find(node.name);
      if (fn == nullptr) {
        throw UnknownAction(node.name);
      }
      return (*fn)(node, ctx);
    }

    case Node::Kind::RecordScope: {
      scope_stack.push_back(node.label);
      std::string behavior_path = scope_stack.front();
      for (std::size_t i = 1; i < scope_stack.size(); ++i) {
        behavior_path += "/" + scope_stack[i];
      }
      if (ctx.recorder != nullptr && open_scopes_.count(&node) == 0) {
        RecordingHandle handle =
          ctx.recorder->start(node.topics, behavior_path, ctx.collection);
        ctx.session_ids.push_back(handle.session_id());
        ctx.diagnostics.push_back("scope '" + behavior_path + "' started session " +
          handle.session_id());
        open_scopes_.emplace(&node, std::move(handle));
      }
      Status status = Status::FAILURE;
      try {
        status = tick_node(node.children.front(), ctx, scope_stack);
      } catch (...) {
        // An exception unwinding through the scope closes its session;
        // the recording covers exactly the time the subtree ran.
        auto it = open_scopes_.find(&node);
        if (it != open_scopes_.end()) {
          try {
            it->second.stop();
          } catch (...) {
          }
          open_scopes_.erase(it);
        }
        scope_stack.pop_back();
        throw;
      }
      if (status != Status::RUNNING) {
        auto it = open_scopes_.find(&node);
        if (it != open_scopes_.end()) {
          const RecordingSummary summary = it->second.stop();
          ctx.diagnostics.push_back("scope '" + behavior_path + "' closed session " +
            summary.session_id + " with " + std::to_string(summary.message_count) +
            " messages");
          open_scopes_.erase(it);
        }
      }
      scope_stack.pop_back();
      return status;
    }
  }
  throw Error("unreachable node kind");
}

}  // namespace replaykit

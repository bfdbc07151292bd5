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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "replaykit/btree.hpp"
#include "support/generators.hpp"

using namespace replaykit;
using testsupport::TempDir;

TEST_CASE("parse_tree reads nesting, attributes, and comments")
{
  const Node root = parse_tree(R"(
    <!-- patrol behavior -->
    <Sequence>
      <RecordScope label="patrol" topics="/cmd_vel, /robotsound /viz/marker">
        <Fallback>
          <Action name="TryDock" port="2"/>
          <Action name="Wander"/>
        </Fallback>
      </RecordScope>
      <Action name="Announce" text="done"/>
    </Sequence>
  )");

  REQUIRE(root.kind == Node::Kind::Sequence);
  REQUIRE(root.children.size() == 2);
  const Node & scope = root.children[0];
  CHECK(scope.kind == Node::Kind::RecordScope);
  CHECK(scope.label == "patrol");
  CHECK(scope.topics == std::vector<std::string>{"/cmd_vel", "/robotsound", "/viz/marker"});
  REQUIRE(scope.children.size() == 1);
  CHECK(scope.children[0].kind == Node::Kind::Fallback);
  CHECK(scope.children[0].children[0].name == "TryDock");
  CHECK(scope.children[0].children[0].params.at("port") == "2");
  CHECK(root.children[1].params.at("text") == "done");
}

TEST_CASE("parse_tree reports position on malformed text")
{
  try {
    parse_tree("<Sequence>\n  <Action name=\"A\"\n</Sequence>");
    FAIL("expected ParseError");
  } catch (const ParseError & e) {
    CHECK(e.line == 3);
  }

  CHECK_THROWS_AS(parse_tree(""), ParseError);
  CHECK_THROWS_AS(parse_tree("<Sequence><Action name=\"A\"/>"), ParseError);
  CHECK_THROWS_AS(parse_tree("<Sequence><Action name=\"A\"/></Fallback>"), ParseError);
  CHECK_THROWS_AS(parse_tree("<Sequence><Action name=\"A\"/></Sequence> junk"), ParseError);
  CHECK_THROWS_AS(parse_tree("<Sequence speed=\"1\"><Action name=\"A\"/></Sequence>"),
    ParseError);
}

TEST_CASE("parse_tree rejects unknown elements with their location")
{
  try {
    parse_tree("<Sequence>\n  <Parallel/>\n</Sequence>");
    FAIL("expected UnknownElement");
  } catch (const UnknownElement & e) {
    CHECK(e.element == "Parallel");
    CHECK(e.line == 2);
  }
}

TEST_CASE("parse_tree enforces child arity per element")
{
  CHECK_THROWS_AS(parse_tree("<Sequence></Sequence>"), ArityError);
  CHECK_THROWS_AS(parse_tree("<Fallback></Fallback>"), ArityError);
  CHECK_THROWS_AS(
    parse_tree("<RecordScope label=\"x\" topics=\"/a\">"
      "<Action name=\"A\"/><Action name=\"B\"/></RecordScope>"),
    ArityError);
  CHECK_THROWS_AS(
    parse_tree("<Action name=\"A\"><Action name=\"B\"/></Action>"), ArityError);
  CHECK_THROWS_AS(
    parse_tree("<RecordScope topics=\"/a\"><Action name=\"A\"/></RecordScope>"), ParseError);
  CHECK_THROWS_AS(
    parse_tree("<RecordScope label=\"x\" topics=\"\"><Action name=\"A\"/></RecordScope>"),
    ParseError);
  CHECK_THROWS_AS(parse_tree("<Action/>"), ParseError);
}

TEST_CASE("registry rejects duplicate registrations")
{
  ActionRegistry registry;
  registry.register_action("A", [](const Node &, TickContext &) {return Status::SUCCESS;});
  CHECK_THROWS_AS(
    registry.register_action("A", [](const Node &, TickContext &) {return Status::FAILURE;}),
    DuplicateAction);
  CHECK(registry.find("A") != nullptr);
  CHECK(registry.find("B") == nullptr);
}

namespace
{

/// Registry whose actions "S", "F", "R" return fixed statuses and count
/// their invocations.
struct ScriptedActions
{
  ActionRegistry registry;
  std::map<std::string, int> calls;

  ScriptedActions()
  {
    auto make = [this](Status status) {
        return [this, status](const Node & node, TickContext &) {
                 calls[node.params.count("id") ? node.params.at("id") : node.name] += 1;
                 return status;
               };
      };
    registry.register_action("S", make(Status::SUCCESS));
    registry.register_action("F", make(Status::FAILURE));
    registry.register_action("R", make(Status::RUNNING));
  }
};

std::string leaf_list(const std::string & statuses)
{
  std::string out;
  for (std::size_t i = 0; i < statuses.size(); ++i) {
    out += "<Action name=\"" + std::string(1, statuses[i]) + "\" id=\"" +
      std::to_string(i) + "\"/>";
  }
  return out;
}

}  // namespace

TEST_CASE("sequence and fallback short-circuit and restart on every tick")
{
  ScriptedActions scripted;
  Executor exec(scripted.registry);
  TickContext ctx;

  SUBCASE("sequence stops at the first failure")
  {
    const Node tree = parse_tree("<Sequence>" + leaf_list("SFS") + "</Sequence>");
    CHECK(exec.tick(tree, ctx) == Status::FAILURE);
    CHECK(scripted.calls["0"] == 1);
    CHECK(scripted.calls["1"] == 1);
    CHECK(scripted.calls["2"] == 0);
  }

  SUBCASE("sequence stops at the first running child")
  {
    const Node tree = parse_tree("<Sequence>" + leaf_list("SRS") + "</Sequence>");
    CHECK(exec.tick(tree, ctx) == Status::RUNNING);
    CHECK(scripted.calls["2"] == 0);
    // No memory: the next tick starts from the first child again.
    CHECK(exec.tick(tree, ctx) == Status::RUNNING);
    CHECK(scripted.calls["0"] == 2);
  }

  SUBCASE("fallback stops at the first success or running child")
  {
    const Node tree = parse_tree("<Fallback>" + leaf_list("FSR") + "</Fallback>");
    CHECK(exec.tick(tree, ctx) == Status::SUCCESS);
    CHECK(scripted.calls["0"] == 1);
    CHECK(scripted.calls["1"] == 1);
    CHECK(scripted.calls["2"] == 0);
  }

  SUBCASE("fallback of all failures fails")
  {
    const Node tree = parse_tree("<Fallback>" + leaf_list("FFF") + "</Fallback>");
    CHECK(exec.tick(tree, ctx) == Status::FAILURE);
    CHECK(scripted.calls["2"] == 1);
  }
}

TEST_CASE("unregistered actions fail the tick loudly")
{
  ActionRegistry registry;
  Executor exec(registry);
  TickContext ctx;
  const Node tree = parse_tree("<Sequence><Action name=\"Ghost\"/></Sequence>");
  CHECK_THROWS_AS(exec.tick(tree, ctx), UnknownAction);
}

TEST_CASE("record scope wraps its subtree in exactly one session")
{
  TempDir dir;
  BusOptions bus_options;
  Bus bus(bus_options);
  DocStore store(dir.path());
  Recorder recorder(bus, store);
  bus.advertise("/talk", "SoundRequest");

  ActionRegistry registry;
  int remaining = 3;
  registry.register_action("Chatter",
    [&](const Node &, TickContext &) {
      bus.publish("/talk", make_sound_request("tick"));
      remaining -= 1;
      return remaining > 0 ? Status::RUNNING : Status::SUCCESS;
    });

  Executor exec(registry);
  TickContext ctx;
  ctx.recorder = &recorder;
  ctx.collection = "run";

  const Node tree = parse_tree(
    "<RecordScope label=\"chat\" topics=\"/talk\"><Action name=\"Chatter\"/></RecordScope>");

  bus.publish("/talk", make_sound_request("before"));

  CHECK(exec.tick(tree, ctx) == Status::RUNNING);
  CHECK(exec.tick(tree, ctx) == Status::RUNNING);
  CHECK(exec.tick(tree, ctx) == Status::SUCCESS);

  bus.publish("/talk", make_sound_request("after"));

  REQUIRE(ctx.session_ids.size() == 1);
  const auto sessions = store.list_sessions("run");
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].session_id == ctx.session_ids[0]);
  CHECK(sessions[0].behavior_path == "chat");
  CHECK(!sessions[0].open);

  Query q;
  q.session_id = ctx.session_ids[0];
  const auto rows = store.query("run", q);
  REQUIRE(rows.size() == 3);  // one per tick; neither "before" nor "after"
  for (const auto & row : rows) {
    CHECK(row.payload.find("text")->as_string() == "tick");
  }
}

TEST_CASE("record scope status is transparent and covers failures")
{
  TempDir dir;
  Bus bus;
  DocStore store(dir.path());
  Recorder recorder(bus, store);
  bus.advertise("/talk", "SoundRequest");

  ActionRegistry registry;
  registry.register_action("Doomed",
    [&](const Node &, TickContext &) {
      bus.publish("/talk", make_sound_request("trying"));
      return Status::FAILURE;
    });
  Executor exec(registry);
  TickContext ctx;
  ctx.recorder = &recorder;
  ctx.collection = "run";

  const Node tree = parse_tree(
    "<RecordScope label=\"attempt\" topics=\"/talk\"><Action name=\"Doomed\"/></RecordScope>");
  CHECK(exec.tick(tree, ctx) == Status::FAILURE);

  const auto sessions = store.list_sessions("run");
  REQUIRE(sessions.size() == 1);
  CHECK(!sessions[0].open);
  CHECK(sessions[0].message_count == 1);
}

TEST_CASE("nested scopes join their labels into a behavior path")
{
  TempDir dir;
  Bus bus;
  DocStore store(dir.path());
  Recorder recorder(bus, store);
  bus.advertise("/talk", "SoundRequest");

  ActionRegistry registry;
  registry.register_action("Speak",
    [&](const Node &, TickContext &) {
      bus.publish("/talk", make_sound_request("hi"));
      return Status::SUCCESS;
    });
  Executor exec(registry);
  TickContext ctx;
  ctx.recorder = &recorder;
  ctx.collection = "run";

  const Node tree = parse_tree(R"(
    <RecordScope label="patrol" topics="/talk">
      <Sequence>
        <RecordScope label="leg" topics="/talk">
          <Action name="Speak"/>
        </RecordScope>
      </Sequence>
    </RecordScope>
  )");
  CHECK(exec.tick(tree, ctx) == Status::SUCCESS);

  const auto sessions = store.list_sessions("run");
  REQUIRE(sessions.size() == 2);
  std::set<std::string> paths;
  for (const auto & s : sessions) {
    paths.insert(s.behavior_path);
  }
  CHECK(paths == std::set<std::string>{"patrol", "patrol/leg"});

  Query q;
  q.behavior_prefix = "patrol";
  CHECK(store.query("run", q).size() == 2);  // captured by both scopes
}

TEST_CASE("a null recorder turns scopes into plain decorators")
{
  ActionRegistry registry;
  registry.register_action("Go", [](const Node &, TickContext &) {return Status::SUCCESS;});
  Executor exec(registry);
  TickContext ctx;  // no recorder
  const Node tree = parse_tree(
    "<RecordScope label=\"x\" topics=\"/a\"><Action name=\"Go\"/></RecordScope>");
  CHECK(exec.tick(tree, ctx) == Status::SUCCESS);
  CHECK(ctx.session_ids.empty());
}

TEST_CASE("run_to_completion ticks until the tree settles")
{
  ScriptedActions scripted;
  int countdown = 5;
  scripted.registry.register_action("Countdown",
    [&](const Node &, TickContext &) {
      countdown -= 1;
      return countdown > 0 ? Status::RUNNING : Status::SUCCESS;
    });
  Executor exec(scripted.registry);
  TickContext ctx;
  const Node tree = parse_tree("<Sequence><Action name=\"Countdown\"/></Sequence>");
  CHECK(exec.run_to_completion(tree, ctx) == Status::SUCCESS);
  CHECK(countdown == 0);

  countdown = 1000000;
  CHECK(exec.run_to_completion(tree, ctx, 10) == Status::RUNNING);
}

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

// Control-node semantics: exhaustive truth tables for Sequence and
// Fallback at arity 1 through 4.  Every combination of child statuses
// (3^k per arity) is ticked once against scripted children, and the
// observed root status and child invocation counts are checked against
// the short-circuit rules computed independently here.

#include <string>
#include <vector>

#include "acceptance.hpp"
#include "replaykit/btree.hpp"

using namespace replaykit;
using acceptance::report;

namespace
{

Node stub_node(int slot)
{
  Node n;
  n.kind = Node::Kind::Action;
  n.name = "Stub";
  n.params["slot"] = std::to_string(slot);
  return n;
}

Node control_node(Node::Kind kind, int arity)
{
  Node n;
  n.kind = kind;
  for (int i = 0; i < arity; ++i) {
    n.children.push_back(stub_node(i));
  }
  return n;
}

// Index of the child whose status decides the parent, and the decision.
struct Expected
{
  Status status;
  int last_child_ticked;
};

Expected expect_sequence(const std::vector<Status> & children)
{
  for (size_t i = 0; i < children.size(); ++i) {
    if (children[i] != Status::SUCCESS) {
      return {children[i], static_cast<int>(i)};
    }
  }
  return {Status::SUCCESS, static_cast<int>(children.size()) - 1};
}

Expected expect_fallback(const std::vector<Status> & children)
{
  for (size_t i = 0; i < children.size(); ++i) {
    if (children[i] != Status::FAILURE) {
      return {children[i], static_cast<int>(i)};
    }
  }
  return {Status::FAILURE, static_cast<int>(children.size()) - 1};
}

const Status kAll[] = {Status::SUCCESS, Status::FAILURE, Status::RUNNING};

}  // namespace

int main()
{
  // The script and counters are rebound per trial; the registry entry
  // reads them through these pointers.
  std::vector<Status> script;
  std::vector<int> calls;

  ActionRegistry registry;
  registry.register_action("Stub", [&](const Node & node, TickContext &) {
      const int slot = std::stoi(node.params.at("slot"));
      ++calls[static_cast<size_t>(slot)];
      return script[static_cast<size_t>(slot)];
    });
  Executor executor(registry);

  const struct
  {
    Node::Kind kind;
    const char * label;
    Expected (*expect)(const std::vector<Status> &);
  } kinds[] = {
    {Node::Kind::Sequence, "Sequence", expect_sequence},
    {Node::Kind::Fallback, "Fallback", expect_fallback},
  };

  for (const auto & k : kinds) {
    int trials = 0;
    int status_bad = 0;
    int calls_bad = 0;

    for (int arity = 1; arity <= 4; ++arity) {
      const Node root = control_node(k.kind, arity);
      int combos = 1;
      for (int i = 0; i < arity; ++i) {
        combos *= 3;
      }
      for (int combo = 0; combo < combos; ++combo) {
        script.clear();
        int digits = combo;
        for (int i = 0; i < arity; ++i) {
          script.push_back(kAll[digits % 3]);
          digits /= 3;
        }
        calls.assign(static_cast<size_t>(arity), 0);

        TickContext ctx;
        const Status got = executor.tick(root, ctx);
        const Expected want = k.expect(script);
        ++trials;
        if (got != want.status) {
          ++status_bad;
        }
        // Children up to the deciding one run exactly once; later
        // siblings must not be touched.
        for (int i = 0; i < arity; ++i) {
          const int want_calls = i <= want.last_child_ticked ? 1 : 0;
          if (calls[static_cast<size_t>(i)] != want_calls) {
            ++calls_bad;
            break;
          }
        }
      }
    }

    report(status_bad == 0,
      std::string(k.label) + " status matches the truth table for arity 1..4",
      std::to_string(trials) + " combinations, " + std::to_string(status_bad) + " wrong");
    report(calls_bad == 0,
      std::string(k.label) + " short-circuits after the deciding child",
      std::to_string(calls_bad) + " of " + std::to_string(trials) +
      " combinations ticked the wrong children");
  }

  return acceptance::verdict();
}

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

// Canned scenarios: pick, navigate, and place each run to SUCCESS and
// leave one session whose topic set covers what the scenario is about;
// the navigate session must carry velocity commands, an obstacle point
// cloud, and the detour path.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "acceptance.hpp"
#include "replaykit/doc_store.hpp"
#include "replaykit/scenarios.hpp"
#include "support/generators.hpp"

using namespace replaykit;
using acceptance::report;

namespace
{

/// topic -> required stored type name.
const std::map<std::string, std::map<std::string, std::string>> kExpected {
  {"pick", {
      {topics::kGraspCloud, types::kPointCloud},
      {topics::kArmWithTorsoGoal, types::kJointTrajectoryGoal},
      {topics::kGripperGoal, types::kGripperGoal},
      {topics::kSound, types::kSoundRequest},
    }},
  {"navigate", {
      {topics::kCmdVel, types::kTwist},
      {topics::kObstacleCloud, types::kPointCloud},
      {topics::kDetourPath, types::kPath},
      {topics::kGotoGoal, types::kPoseStamped},
      {topics::kSound, types::kSoundRequest},
    }},
  {"place", {
      {topics::kCaddyMarker, types::kMarker},
      {topics::kArmWithTorsoGoal, types::kJointTrajectoryGoal},
      {topics::kGripperGoal, types::kGripperGoal},
      {topics::kSound, types::kSoundRequest},
    }},
};

}  // namespace

int main()
{
  for (const auto & name : scenario_names()) {
    testsupport::TempDir dir;
    Bus bus;
    DocStore store(dir.path());
    Recorder recorder(bus, store);
    ScenarioConfig cfg;
    SimWorld world(bus, sim_config_for(cfg));

    const ScenarioOutcome out = run_scenario(name, bus, world, &recorder, "runs", cfg);
    bool ok = out.status == Status::SUCCESS && out.session_ids.size() == 1;

    std::string missing;
    if (ok) {
      Query q;
      q.session_id = out.session_ids.front();
      std::map<std::string, std::string> seen_types;
      for (const auto & env : store.query("runs", q)) {
        seen_types[env.topic] = env.type_name;
      }
      for (const auto & [topic, type] : kExpected.at(name)) {
        const auto it = seen_types.find(topic);
        if (it == seen_types.end() || it->second != type) {
          ok = false;
          missing += " " + topic;
        }
      }
    }
    report(ok, name + " runs to SUCCESS with its expected topic set",
      ok ? "session " + out.session_ids.front() :
      (missing.empty() ? "run failed" : "missing:" + missing));
  }
  return acceptance::verdict();
}

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

#ifndef REPLAYKIT__SCENARIOS_HPP_
#define REPLAYKIT__SCENARIOS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "replaykit/btree.hpp"
#include "replaykit/bus.hpp"
#include "replaykit/errors.hpp"
#include "replaykit/recorder.hpp"
#include "replaykit/replayer.hpp"
#include "replaykit/simbot.hpp"

namespace replaykit
{

class UnknownScenario : public Error
{
public:
  explicit UnknownScenario(const std::string & name)
  : Error("unknown scenario: " + name), name(name) {}
  std::string name;
};

class ConfigError : public Error
{
public:
  ConfigError(int line, const std::string & why)
  : Error("config line " + std::to_string(line) + ": " + why), line(line) {}
  int line;
};

struct Waypoint
{
  double x {0.0};
  double y {0.0};
};

/// Everything a canned scenario needs: integration step, noise wiring
/// for the world the caller builds, and the scene geometry the actions
/// publish.  Loadable from a key=value file so runs can be tweaked
/// without recompiling.
struct ScenarioConfig
{
  double dt {0.02};
  /// Per-blocking-action step budget; an action that is still waiting on
  /// the simulator after this many steps fails its tick.
  int max_action_steps {20000};

  /// Base noise for the world built by the caller (see sim_config_for).
  NoiseConfig noise {};

  // Pick scene: a graspable object on a table in front of the robot.
  Xyz grasp_target {0.62, 0.04, 0.80};
  double torso_lift {0.30};
  double gripper_open {0.10};
  double gripper_closed {0.015};

  // Navigate scene: an obstacle on the direct route and the detour the
  // planner would have produced around it.
  Xyz obstacle {0.80, 0.55, 0.0};
  std::vector<Waypoint> nav_waypoints {
    {0.00, 0.60}, {0.45, 0.95}, {1.15, 0.80}, {1.60, 0.25}};

  // Place scene: the caddy the held object goes into.
  Xyz caddy_position {0.55, -0.35, 0.75};
};

/// Parses `key = value` lines ('#' starts a full-line comment, blank
/// lines skipped) on top of the defaults.  Unknown keys and malformed
/// values raise ConfigError with the 1-based line number.  Waypoints
/// are written `nav_waypoints = x,y; x,y; ...`.
ScenarioConfig load_scenario_config(const std::filesystem::path & path);

/// World settings matching `config` (noise carried over, everything
/// else default).
SimConfig sim_config_for(const ScenarioConfig & config);

/// Names accepted by scenario_tree_text and run_scenario, sorted.
std::vector<std::string> scenario_names();

/// Tree text for one of the canned scenarios; UnknownScenario otherwise.
std::string scenario_tree_text(const std::string & name);

/// Registers the action vocabulary the canned trees use.  `bus` and
/// `world` must outlive the registry; `config` is copied.
///
/// Fire-and-forget publishers (return SUCCESS within one tick):
///   Say text=...                 speech request
///   PublishGraspCloud            cloud around the pick target
///   PublishObstacleCloud         cloud at the blocking obstacle
///   PublishPath                  the detour polyline
///   PublishCaddyMarker           cube marker over the caddy
///
/// Blocking actions (publish a goal, then step the world until the
/// simulator settles; FAILURE if the step budget runs out):
///   HeadPoint [x= y= z=]         look at a point (default: grasp target)
///   TorsoLift height=            raise or lower the torso
///   ArmTrajectory pose=          named arm pose, see arm_pose_names()
///   Gripper position=            move the fingers
///   DriveWaypoints               drive the configured waypoints in order
///
/// Plus AlwaysSuccess and AlwaysFailure for tree plumbing and tests.
void register_scenario_actions(ActionRegistry & registry, Bus & bus, SimWorld & world,
  const ScenarioConfig & config);

/// Named targets understood by ArmTrajectory, sorted.
std::vector<std::string> arm_pose_names();

struct ScenarioOutcome
{
  Status status {Status::FAILURE};
  std::vector<std::string> session_ids;
  std::vector<std::string> diagnostics;
  BaseState final_base {};
};

/// Parses the named scenario, registers the standard actions, and runs
/// the tree to completion.  Recording happens only when `recorder` is
/// non-null; sessions then land in `collection`.
ScenarioOutcome run_scenario(const std::string & name, Bus & bus, SimWorld & world,
  Recorder * recorder, const std::string & collection, const ScenarioConfig & config);

struct DriveReport
{
  /// True when the plan carries /cmd_vel: recorded base commands are
  /// applied open loop and recorded drive goals are ignored, so the
  /// base is driven from exactly one authority.
  bool command_mode {false};
  std::size_t replayed {0};          // envelopes published to the bus
  std::size_t commands_applied {0};  // /cmd_vel fed to the simulator
  std::size_t goals_ignored {0};     // drive goals dropped in command mode
  std::size_t forwarded {0};         // other topics handed to the simulator
  std::size_t steps {0};             // integration steps taken
  double virtual_duration {0.0};     // simulated seconds
  BaseState final_base {};
  std::map<std::string, double> final_joints;
};

/// Replays `plan` into a fresh simulator on `bus`, entirely in simulated
/// time so a rerun with the same plan and seed is bit-identical.
///
/// Command mode (plan contains /cmd_vel): each recorded command is one
/// integration step, other envelopes are forwarded to the simulator
/// without advancing it, and recorded drive goals are counted but
/// dropped.  Goal mode (no /cmd_vel): the world subscribes its normal
/// inputs, envelopes are published on the recorded timeline (scaled by
/// the plan rate) while the world steps to keep up, then runs until the
/// controllers settle.
DriveReport drive_replay(const ReplayPlan & plan, Bus & bus, const SimConfig & sim_config,
  double dt = 0.02);

}  // namespace replaykit

#endif  // REPLAYKIT__SCENARIOS_HPP_

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

#include "replaykit/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <string_view>
#include <utility>

#include "replaykit/message.hpp"

namespace replaykit
{
namespace
{

constexpr std::size_t kMaxBridgeSteps = 10'000'000;

// --- small parsing helpers ------------------------------------------------

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) {
    return "";
  }
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> to_double(const std::string & text)
{
  double out {};
  const char * first = text.data();
  const char * last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
    return std::nullopt;
  }
  return out;
}

double config_double(const std::string & text, int line)
{
  auto v = to_double(text);
  if (!v) {
    throw ConfigError(line, "expected a finite number, got '" + text + "'");
  }
  return *v;
}

bool config_bool(const std::string & text, int line)
{
  if (text == "true" || text == "1") {
    return true;
  }
  if (text == "false" || text == "0") {
    return false;
  }
  throw ConfigError(line, "expected true/false, got '" + text + "'");
}

std::uint64_t config_u64(const std::string & text, int line)
{
  std::uint64_t out {};
  const char * first = text.data();
  const char * last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(line, "expected a non-negative integer, got '" + text + "'");
  }
  return out;
}

int config_steps(const std::string & text, int line)
{
  int out {};
  const char * first = text.data();
  const char * last = first + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || out <= 0) {
    throw ConfigError(line, "expected a positive integer, got '" + text + "'");
  }
  return out;
}

std::vector<Waypoint> config_waypoints(const std::string & text, int line)
{
  std::vector<Waypoint> out;
  std::string_view rest(text);
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string pair = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view() : rest.substr(semi + 1);
    if (pair.empty()) {
      continue;
    }
    const auto comma = pair.find(',');
    if (comma == std::string::npos) {
      throw ConfigError(line, "waypoint '" + pair + "' is not x,y");
    }
    auto x = to_double(trim(std::string_view(pair).substr(0, comma)));
    auto y = to_double(trim(std::string_view(pair).substr(comma + 1)));
    if (!x || !y) {
      throw ConfigError(line, "waypoint '" + pair + "' is not x,y");
    }
    out.push_back({*x, *y});
  }
  if (out.empty()) {
    throw ConfigError(line, "nav_waypoints needs at least one x,y pair");
  }
  return out;
}

// --- scene geometry -------------------------------------------------------

std::vector<Xyz> grasp_cloud_points(const Xyz & c)
{
  // The target centroid plus the corners of a small box around it.
  std::vector<Xyz> pts {c};
  const double d = 0.012;
  for (double dx : {-d, d}) {
    for (double dy : {-d, d}) {
      for (double dz : {-d, d}) {
        pts.push_back({c.x + dx, c.y + dy, c.z + dz});
      }
    }
  }
  return pts;
}

std::vector<Xyz> obstacle_cloud_points(const Xyz & c)
{
  // A short ring of returns just above the floor, plus the top.
  std::vector<Xyz> pts;
  for (int k = 0; k < 12; ++k) {
    const double a = 2.0 * std::numbers::pi * k / 12.0;
    pts.push_back({c.x + 0.12 * std::cos(a), c.y + 0.12 * std::sin(a), 0.03});
  }
  pts.push_back({c.x, c.y, 0.08});
  return pts;
}

/// Heading of each leg, so waypoint poses face the direction of travel.
/// The last waypoint keeps the previous heading.
std::vector<double> waypoint_yaws(const std::vector<Waypoint> & wps)
{
  std::vector<double> yaws(wps.size(), 0.0);
  for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
    yaws[i] = std::atan2(wps[i + 1].y - wps[i].y, wps[i + 1].x - wps[i].x);
  }
  if (wps.size() > 1) {
    yaws.back() = yaws[wps.size() - 2];
  }
  return yaws;
}

/// Joint targets for ArmTrajectory, in arm_with_torso joint order.
const std::map<std::string, std::vector<double>> & arm_poses()
{
  static const std::map<std::string, std::vector<double>> poses {
    {"grasp", {0.30, 0.12, 0.80, -0.10, 0.60, 0.05, 1.10, 0.00}},
    {"lift", {0.30, 0.10, 0.40, -0.10, 0.90, 0.05, 0.80, 0.00}},
    {"place", {0.30, -0.60, 0.55, 0.00, 0.85, 0.00, 0.90, 0.00}},
    {"pregrasp", {0.30, 0.10, 0.45, -0.10, 1.00, 0.05, 0.80, 0.00}},
    {"tucked", {0.05, 1.32, 1.40, -0.20, 1.72, 0.00, 1.66, 0.00}},
  };
  return poses;
}

// --- action plumbing ------------------------------------------------------

std::string require_param(const Node & node, const std::string & key)
{
  const auto it = node.params.find(key);
  if (it == node.params.end()) {
    throw Error("action " + node.name + " needs parameter '" + key + "'");
  }
  return it->second;
}

double param_double(const Node & node, const std::string & key)
{
  const std::string text = require_param(node, key);
  auto v = to_double(text);
  if (!v) {
    throw Error("action " + node.name + ": parameter '" + key + "' is not a number: " + text);
  }
  return *v;
}

double param_double_or(const Node & node, const std::string & key, double fallback)
{
  return node.params.count(key) ? param_double(node, key) : fallback;
}

template<typename Done>
bool run_world_until(SimWorld & world, double dt, int max_steps, Done && done)
{
  for (int k = 0; k < max_steps; ++k) {
    if (done()) {
      return true;
    }
    world.step(dt);
  }
  return done();
}

/// Publishes a goal, lets the world pull it in, and steps until `done`.
template<typename Done>
Status blocking_goal(Bus & bus, SimWorld & world, const ScenarioConfig & config,
  const std::string & topic, TypedMessage goal, Done && done)
{
  bus.publish(topic, std::move(goal));
  world.step(config.dt);
  const bool settled =
    run_world_until(world, config.dt, config.max_action_steps, std::forward<Done>(done));
  return settled ? Status::SUCCESS : Status::FAILURE;
}

}  // namespace

// --- configuration --------------------------------------------------------

ScenarioConfig load_scenario_config(const std::filesystem::path & path)
{
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open scenario config: " + path.string());
  }
  ScenarioConfig cfg;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string stripped = trim(raw);
    if (stripped.empty() || stripped.front() == '#') {
      continue;
    }
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(line_no, "expected key = value, got '" + stripped + "'");
    }
    const std::string key = trim(std::string_view(stripped).substr(0, eq));
    const std::string value = trim(std::string_view(stripped).substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(line_no, "missing key before '='");
    }

    if (key == "dt") {
      cfg.dt = config_double(value, line_no);
      if (cfg.dt <= 0.0) {
        throw ConfigError(line_no, "dt must be positive");
      }
    } else if (key == "max_action_steps") {
      cfg.max_action_steps = config_steps(value, line_no);
    } else if (key == "noise_enabled") {
      cfg.noise.enabled = config_bool(value, line_no);
    } else if (key == "noise_sigma_v") {
      cfg.noise.sigma_v = config_double(value, line_no);
    } else if (key == "noise_sigma_w") {
      cfg.noise.sigma_w = config_double(value, line_no);
    } else if (key == "noise_seed") {
      cfg.noise.seed = config_u64(value, line_no);
    } else if (key == "grasp_x") {
      cfg.grasp_target.x = config_double(value, line_no);
    } else if (key == "grasp_y") {
      cfg.grasp_target.y = config_double(value, line_no);
    } else if (key == "grasp_z") {
      cfg.grasp_target.z = config_double(value, line_no);
    } else if (key == "torso_lift") {
      cfg.torso_lift = config_double(value, line_no);
    } else if (key == "gripper_open") {
      cfg.gripper_open = config_double(value, line_no);
    } else if (key == "gripper_closed") {
      cfg.gripper_closed = config_double(value, line_no);
    } else if (key == "obstacle_x") {
      cfg.obstacle.x = config_double(value, line_no);
    } else if (key == "obstacle_y") {
      cfg.obstacle.y = config_double(value, line_no);
    } else if (key == "caddy_x") {
      cfg.caddy_position.x = config_double(value, line_no);
    } else if (key == "caddy_y") {
      cfg.caddy_position.y = config_double(value, line_no);
    } else if (key == "caddy_z") {
      cfg.caddy_position.z = config_double(value, line_no);
    } else if (key == "nav_waypoints") {
      cfg.nav_waypoints = config_waypoints(value, line_no);
    } else {
      throw ConfigError(line_no, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

SimConfig sim_config_for(const ScenarioConfig & config)
{
  SimConfig sim;
  sim.noise = config.noise;
  return sim;
}

// --- canned trees ---------------------------------------------------------

std::vector<std::string> scenario_names()
{
  return {"navigate", "pick", "place"};
}

std::string scenario_tree_text(const std::string & name)
{
  if (name == "pick") {
    return R"(<Sequence>
  <RecordScope label="pick" topics="/robotsound /perception/grasp_target /head_controller/point_head/goal /torso_controller/follow_joint_trajectory/goal /arm_with_torso_controller/follow_joint_trajectory/goal /gripper_controller/gripper_action/goal /sim/joint_states">
    <Sequence>
      <Action name="Say" text="picking up the object on the table"/>
      <Action name="PublishGraspCloud"/>
      <Action name="HeadPoint"/>
      <Action name="TorsoLift"/>
      <Action name="ArmTrajectory" pose="pregrasp"/>
      <Action name="Gripper" position="open"/>
      <Action name="ArmTrajectory" pose="grasp"/>
      <Action name="Gripper" position="closed"/>
      <Action name="ArmTrajectory" pose="lift"/>
      <Action name="Say" text="pick complete"/>
    </Sequence>
  </RecordScope>
</Sequence>
)";
  }
  if (name == "navigate") {
    return R"(<Sequence>
  <RecordScope label="navigate" topics="/robotsound /perception/ground_obstacle /nav/detour_path /nav/goto_goal /cmd_vel /sim/base_pose">
    <Sequence>
      <Action name="Say" text="obstacle ahead, taking the detour"/>
      <Action name="PublishObstacleCloud"/>
      <Action name="PublishPath"/>
      <Action name="DriveWaypoints"/>
      <Action name="Say" text="reached the goal"/>
    </Sequence>
  </RecordScope>
</Sequence>
)";
  }
  if (name == "place") {
    return R"(<Sequence>
  <RecordScope label="place" topics="/robotsound /viz/caddy_marker /arm_with_torso_controller/follow_joint_trajectory/goal /gripper_controller/gripper_action/goal /sim/joint_states">
    <Sequence>
      <Action name="Say" text="placing the object in the caddy"/>
      <Action name="PublishCaddyMarker"/>
      <Action name="ArmTrajectory" pose="place"/>
      <Action name="Gripper" position="open"/>
      <Action name="ArmTrajectory" pose="tucked"/>
      <Action name="Say" text="place complete"/>
    </Sequence>
  </RecordScope>
</Sequence>
)";
  }
  throw UnknownScenario(name);
}

std::vector<std::string> arm_pose_names()
{
  std::vector<std::string> names;
  for (const auto & [name, targets] : arm_poses()) {
    names.push_back(name);
  }
  return names;
}

// --- actions --------------------------------------------------------------

void register_scenario_actions(ActionRegistry & registry, Bus & bus, SimWorld & world,
  const ScenarioConfig & config)
{
  registry.register_action("AlwaysSuccess",
    [](const Node &, TickContext &) {return Status::SUCCESS;});
  registry.register_action("AlwaysFailure",
    [](const Node &, TickContext &) {return Status::FAILURE;});

  registry.register_action("Say",
    [&bus](const Node & node, TickContext &) {
      bus.publish(topics::kSound, make_sound_request(require_param(node, "text")));
      return Status::SUCCESS;
    });

  registry.register_action("PublishGraspCloud",
    [&bus, &world, config](const Node &, TickContext &) {
      bus.publish(topics::kGraspCloud,
        make_point_cloud("base_link", world.now_stamp(),
          grasp_cloud_points(config.grasp_target)));
      return Status::SUCCESS;
    });

  registry.register_action("PublishObstacleCloud",
    [&bus, &world, config](const Node &, TickContext &) {
      bus.publish(topics::kObstacleCloud,
        make_point_cloud("odom", world.now_stamp(),
          obstacle_cloud_points(config.obstacle)));
      return Status::SUCCESS;
    });

  registry.register_action("PublishPath",
    [&bus, &world, config](const Node &, TickContext &) {
      const auto yaws = waypoint_yaws(config.nav_waypoints);
      std::vector<Value> poses;
      for (std::size_t i = 0; i < config.nav_waypoints.size(); ++i) {
        const auto & wp = config.nav_waypoints[i];
        poses.push_back(make_pose_stamped("odom", world.now_stamp(),
          planar_pose_value(wp.x, wp.y, yaws[i])).payload);
      }
      bus.publish(topics::kDetourPath, make_path("odom", world.now_stamp(), poses));
      return Status::SUCCESS;
    });

  registry.register_action("PublishCaddyMarker",
    [&bus, &world, config](const Node &, TickContext &) {
      const auto & c = config.caddy_position;
      bus.publish(topics::kCaddyMarker,
        make_marker("odom", world.now_stamp(), "cube",
          pose_value(point_value(c.x, c.y, c.z), yaw_quaternion_value(0.0)),
          Xyz {0.30, 0.20, 0.12}, color_value(0.85, 0.20, 0.15, 1.0)));
      return Status::SUCCESS;
    });

  registry.register_action("HeadPoint",
    [&bus, &world, config](const Node & node, TickContext &) {
      const double x = param_double_or(node, "x", config.grasp_target.x);
      const double y = param_double_or(node, "y", config.grasp_target.y);
      const double z = param_double_or(node, "z", config.grasp_target.z);
      return blocking_goal(bus, world, config, topics::kHeadPointGoal,
        TypedMessage {types::kPoint, point_value(x, y, z)},
        [&world] {return !world.head().active();});
    });

  registry.register_action("TorsoLift",
    [&bus, &world, config](const Node & node, TickContext &) {
      const double height = param_double_or(node, "height", config.torso_lift);
      const double current = world.joint_position("torso_lift_joint");
      // 0.10 m/s lift speed, never under half a second.
      const double duration = std::max(std::abs(height - current) / 0.10, 0.5);
      return blocking_goal(bus, world, config, topics::kTorsoGoal,
        make_joint_trajectory_goal({"torso_lift_joint"},
          {{{current}, 0.0}, {{height}, duration}}),
        [&world] {return !world.arm_with_torso().active();});
    });

  registry.register_action("ArmTrajectory",
    [&bus, &world, config](const Node & node, TickContext &) {
      const std::string pose = require_param(node, "pose");
      const auto it = arm_poses().find(pose);
      if (it == arm_poses().end()) {
        throw Error("action ArmTrajectory: unknown pose '" + pose + "'");
      }
      const double duration = param_double_or(node, "duration", 2.0);
      return blocking_goal(bus, world, config, topics::kArmWithTorsoGoal,
        make_joint_trajectory_goal(world.arm_with_torso().joints(),
          {{world.arm_with_torso().positions(), 0.0}, {it->second, duration}}),
        [&world] {return !world.arm_with_torso().active();});
    });

  registry.register_action("Gripper",
    [&bus, &world, config](const Node & node, TickContext &) {
      const std::string text = require_param(node, "position");
      double position = 0.0;
      if (text == "open") {
        position = config.gripper_open;
      } else if (text == "closed") {
        position = config.gripper_closed;
      } else if (auto v = to_double(text)) {
        position = *v;
      } else {
        throw Error("action Gripper: position must be open, closed, or a number");
      }
      return blocking_goal(bus, world, config, topics::kGripperGoal,
        make_gripper_goal(position, 60.0),
        [&world] {return !world.gripper().active();});
    });

  registry.register_action("DriveWaypoints",
    [&bus, &world, config](const Node &, TickContext &) {
      const auto yaws = waypoint_yaws(config.nav_waypoints);
      for (std::size_t i = 0; i < config.nav_waypoints.size(); ++i) {
        const auto & wp = config.nav_waypoints[i];
        const Status leg = blocking_goal(bus, world, config, topics::kGotoGoal,
          make_pose_stamped("odom", world.now_stamp(),
            planar_pose_value(wp.x, wp.y, yaws[i])),
          [&world] {return !world.goto_active();});
        if (leg != Status::SUCCESS) {
          return Status::FAILURE;
        }
      }
      return Status::SUCCESS;
    });
}

// --- running --------------------------------------------------------------

ScenarioOutcome run_scenario(const std::string & name, Bus & bus, SimWorld & world,
  Recorder * recorder, const std::string & collection, const ScenarioConfig & config)
{
  const Node root = parse_tree(scenario_tree_text(name));
  ActionRegistry registry;
  register_scenario_actions(registry, bus, world, config);
  Executor executor(registry);

  TickContext ctx;
  ctx.recorder = recorder;
  ctx.collection = collection;
  const Status status = executor.run_to_completion(root, ctx);

  ScenarioOutcome outcome;
  outcome.status = status;
  outcome.session_ids = std::move(ctx.session_ids);
  outcome.diagnostics = std::move(ctx.diagnostics);
  outcome.final_base = world.base();
  return outcome;
}

// --- replaying into a fresh simulator -------------------------------------

DriveReport drive_replay(const ReplayPlan & plan, Bus & bus, const SimConfig & sim_config,
  double dt)
{
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw Error("drive_replay: dt must be finite and positive");
  }
  const bool command_mode = plan.streams.count(topics::kCmdVel) > 0;

  // In command mode the recorded commands are the only base authority,
  // so the world must not also consume bus traffic on its own.
  SimConfig cfg = sim_config;
  cfg.subscribe_inputs = !command_mode;
  SimWorld world(bus, cfg);
  for (const auto & [topic, type] : plan.topic_types) {
    bus.advertise(topic, type);
  }

  std::vector<const Envelope *> order;
  for (const auto & [topic, stream] : plan.streams) {
    for (const auto & env : stream) {
      order.push_back(&env);
    }
  }
  std::stable_sort(order.begin(), order.end(),
    [](const Envelope * a, const Envelope * b) {
      return std::tie(a->record_time, a->seq) < std::tie(b->record_time, b->seq);
    });

  DriveReport report;
  report.command_mode = command_mode;

  const auto bounded_step = [&world, &report, dt] {
      if (report.steps >= kMaxBridgeSteps) {
        throw Error("drive_replay: step budget exhausted, simulator never settled");
      }
      world.step(dt);
      ++report.steps;
    };

  for (const Envelope * env : order) {
    if (command_mode && env->topic == topics::kGotoGoal) {
      ++report.goals_ignored;
      continue;
    }
    TypedMessage msg = decode(env->payload, env->type_name, DecodeMode::Permissive);
    if (command_mode) {
      bus.publish(env->topic, msg);
      ++report.replayed;
      world.handle(env->topic, msg);
      if (env->topic == topics::kCmdVel) {
        // One recorded command, one integration step: the replayed
        // trajectory is a pure function of the command stream.
        world.advance(dt);
        ++report.steps;
        ++report.commands_applied;
      } else {
        ++report.forwarded;
      }
    } else {
      // Recorded timeline, in simulated seconds, scaled by the rate.
      const double rel =
        static_cast<double>(env->record_time - plan.t0) / 1e9 / plan.rate;
      while (world.now_s() + 1e-9 < rel) {
        bounded_step();
      }
      bus.publish(env->topic, std::move(msg));
      ++report.replayed;
      world.drain();
    }
  }
  if (!command_mode) {
    while (!world.idle()) {
      bounded_step();
    }
  }

  report.virtual_duration = world.now_s();
  report.final_base = world.base();
  for (const JointGroup * group :
    {&world.arm_with_torso(), &world.head(), &world.gripper()})
  {
    for (std::size_t i = 0; i < group->joints().size(); ++i) {
      report.final_joints[group->joints()[i]] = group->positions()[i];
    }
  }
  return report;
}

}  // namespace replaykit

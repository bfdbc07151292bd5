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

#include "replaykit/simbot.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace replaykit
{

namespace
{

constexpr double kPi = 3.14159265358979323846;

const std::vector<std::string> & arm_with_torso_joints()
{
  static const std::vector<std::string> joints = {
    "torso_lift_joint", "shoulder_pan_joint", "shoulder_lift_joint",
    "upperarm_roll_joint", "elbow_flex_joint", "forearm_roll_joint",
    "wrist_flex_joint", "wrist_roll_joint"};
  return joints;
}

const std::vector<std::string> & head_joints()
{
  static const std::vector<std::string> joints = {"head_pan_joint", "head_tilt_joint"};
  return joints;
}

const std::vector<std::string> & gripper_joints()
{
  static const std::vector<std::string> joints = {"gripper_finger_joint"};
  return joints;
}

double uniform01(std::mt19937_64 & engine)
{
  // 53 mantissa bits; strictly inside [0, 1).
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

}  // namespace

double wrap_angle(double a)
{
  a = std::fmod(a + kPi, 2.0 * kPi);  // (-2pi, 2pi)
  if (a <= 0.0) {
    a += 2.0 * kPi;
  }
  return a - kPi;  // (-pi, pi]
}

double SeededGaussian::next()
{
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform01(engine_);
  } while (u1 <= 0.0);
  const double u2 = uniform01(engine_);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  spare_ = r * std::sin(angle);
  has_spare_ = true;
  return r * std::cos(angle);
}

NoiseModel::NoiseModel(const NoiseConfig & config)
: config_(config), gauss_(config.seed)
{
  if (!(config.sigma_v >= 0.0) || !(config.sigma_w >= 0.0)) {
    throw NonFiniteInput("noise sigmas must be >= 0");
  }
}

void NoiseModel::perturb(double & v, double & w)
{
  if (!config_.enabled) {
    return;
  }
  if (v == 0.0 && w == 0.0) {
    return;  // no actuation, no actuation noise
  }
  // Fixed draw order (v then w) keeps trajectories seed-reproducible.
  v += config_.sigma_v * gauss_.next();
  w += config_.sigma_w * gauss_.next();
}

BaseState apply_twist(const BaseState & s, const PlanarTwist & cmd, double dt,
  NoiseModel & noise)
{
  if (!std::isfinite(s.x) || !std::isfinite(s.y) || !std::isfinite(s.theta)) {
    throw NonFiniteInput("base state");
  }
  if (!std::isfinite(cmd.v) || !std::isfinite(cmd.w)) {
    throw NonFiniteInput("twist command");
  }
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw NonFiniteInput("dt must be positive and finite");
  }

  double v = cmd.v;
  double w = cmd.w;
  noise.perturb(v, w);

  BaseState out = s;
  if (std::fabs(w) < 1e-9) {
    out.x += v * dt * std::cos(s.theta);
    out.y += v * dt * std::sin(s.theta);
  } else {
    out.x += (v / w) * (std::sin(s.theta + w * dt) - std::sin(s.theta));
    out.y += (v / w) * (std::cos(s.theta) - std::cos(s.theta + w * dt));
  }
  out.theta = wrap_angle(s.theta + w * dt);
  return out;
}

// --- JointGroup -----------------------------------------------------------

JointGroup::JointGroup(std::vector<std::string> joints, std::vector<double> start)
: joints_(std::move(joints)), positions_(std::move(start))
{
  if (joints_.empty() || joints_.size() != positions_.size()) {
    throw Error("joint group needs one start position per joint");
  }
}

double JointGroup::position_of(const std::string & joint) const
{
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i] == joint) {
      return positions_[i];
    }
  }
  throw Error("unknown joint: " + joint);
}

void JointGroup::set_goal(const Value & goal_payload, double now_s)
{
  const Value * names = goal_payload.find("joint_names");
  const Value * points = goal_payload.find("points");
  if (names == nullptr || !names->is_array() || points == nullptr || !points->is_array()) {
    throw MalformedGoal("expected joint_names and points arrays");
  }
  if (names->as_array().empty()) {
    throw MalformedGoal("joint_names is empty");
  }
  if (points->as_array().empty()) {
    throw MalformedGoal("points is empty");
  }

  Goal goal;
  goal.t0 = now_s;
  for (const Value & name : names->as_array()) {
    if (!name.is_string()) {
      throw MalformedGoal("joint name must be a string");
    }
    const auto it = std::find(joints_.begin(), joints_.end(), name.as_string());
    if (it == joints_.end()) {
      throw MalformedGoal("unknown joint: " + name.as_string());
    }
    goal.index.push_back(static_cast<std::size_t>(it - joints_.begin()));
  }

  double prev_time = -1.0;
  for (const Value & point : points->as_array()) {
    const Value * positions = point.find("positions");
    const Value * time = point.find("time_from_start");
    if (positions == nullptr || !positions->is_array() || time == nullptr) {
      throw MalformedGoal("point needs positions and time_from_start");
    }
    const double t = time->number();
    if (!std::isfinite(t) || t < 0.0) {
      throw MalformedGoal("time_from_start must be finite and >= 0");
    }
    if (t <= prev_time) {
      throw MalformedGoal("time_from_start must be strictly increasing");
    }
    prev_time = t;
    if (positions->as_array().size() != goal.index.size()) {
      throw MalformedGoal("positions arity does not match joint_names");
    }
    std::vector<double> row;
    for (const Value & p : positions->as_array()) {
      const double pos = p.number();
      if (!std::isfinite(pos)) {
        throw MalformedGoal("position must be finite");
      }
      row.push_back(pos);
    }
    goal.times.push_back(t);
    goal.waypoints.push_back(std::move(row));
  }

  for (const std::size_t slot : goal.index) {
    goal.hold.push_back(positions_[slot]);
  }
  goal_ = std::move(goal);
}

void JointGroup::advance(double now_s)
{
  if (!goal_) {
    return;
  }
  const Goal & goal = *goal_;
  const double elapsed = now_s - goal.t0;

  if (elapsed < goal.times.front()) {
    // Before the first waypoint the commanded joints hold their receipt
    // positions.
    for (std::size_t k = 0; k < goal.index.size(); ++k) {
      positions_[goal.index[k]] = goal.hold[k];
    }
    return;
  }
  if (elapsed >= goal.times.back()) {
    for (std::size_t k = 0; k < goal.index.size(); ++k) {
      positions_[goal.index[k]] = goal.waypoints.back()[k];
    }
    goal_.reset();  // clamped to the final waypoint: goal complete
    return;
  }

  std::size_t seg = 0;
  while (elapsed >= goal.times[seg + 1]) {
    ++seg;
  }
  const double span = goal.times[seg + 1] - goal.times[seg];
  const double u = (elapsed - goal.times[seg]) / span;
  for (std::size_t k = 0; k < goal.index.size(); ++k) {
    const double a = goal.waypoints[seg][k];
    const double b = goal.waypoints[seg + 1][k];
    positions_[goal.index[k]] = a + u * (b - a);
  }
}

// --- SimWorld -------------------------------------------------------------

namespace
{

/// Start positions: a tucked arm, lowered torso, level head, open gripper.
std::vector<double> arm_with_torso_start()
{
  return {0.05, 1.32, 1.40, -0.20, 1.72, 0.0, 1.66, 0.0};
}

TypedMessage synth_trajectory(const std::vector<std::string> & joints,
  const std::vector<double> & from, const std::vector<double> & to, double duration)
{
  // Two-point trajectory starting at the current positions so motion is
  // linear from receipt (time 0) to the target.
  return make_joint_trajectory_goal(joints,
           {{from, 0.0}, {to, std::max(duration, 1e-6)}});
}

}  // namespace

SimWorld::SimWorld(Bus & bus, SimConfig config)
: bus_(bus), config_(config), noise_(config.noise),
  arm_torso_(arm_with_torso_joints(), arm_with_torso_start()),
  head_(head_joints(), {0.0, 0.0}),
  gripper_(gripper_joints(), {0.05})
{
  // One advertisement authority for the whole topic set keeps a strict bus
  // usable by every producer (scenario actions, replayer, the sim itself).
  bus_.advertise(topics::kCmdVel, types::kTwist);
  bus_.advertise(topics::kGotoGoal, types::kPoseStamped);
  bus_.advertise(topics::kArmWithTorsoGoal, types::kJointTrajectoryGoal);
  bus_.advertise(topics::kTorsoGoal, types::kJointTrajectoryGoal);
  bus_.advertise(topics::kHeadTrajectoryGoal, types::kJointTrajectoryGoal);
  bus_.advertise(topics::kHeadPointGoal, types::kPoint);
  bus_.advertise(topics::kGripperGoal, types::kGripperGoal);
  bus_.advertise(topics::kBasePose, types::kPoseStamped);
  bus_.advertise(topics::kJointStates, types::kJointState);
  bus_.advertise(topics::kSound, types::kSoundRequest);
  bus_.advertise(topics::kGraspCloud, types::kPointCloud);
  bus_.advertise(topics::kObstacleCloud, types::kPointCloud);
  bus_.advertise(topics::kDetourPath, types::kPath);
  bus_.advertise(topics::kCaddyMarker, types::kMarker);

  if (config_.subscribe_inputs) {
    for (const char * topic : {topics::kCmdVel, topics::kGotoGoal,
      topics::kArmWithTorsoGoal, topics::kTorsoGoal, topics::kHeadTrajectoryGoal,
      topics::kHeadPointGoal, topics::kGripperGoal, topics::kSound,
      topics::kGraspCloud, topics::kObstacleCloud, topics::kDetourPath,
      topics::kCaddyMarker})
    {
      inputs_.push_back(bus_.subscribe(topic));
    }
  }
}

void SimWorld::handle_cmd_vel(const TypedMessage & msg)
{
  const PlanarTwist cmd = planar_twist_of(msg.payload);
  if (!std::isfinite(cmd.v) || !std::isfinite(cmd.w)) {
    throw MalformedGoal("non-finite twist");
  }
  pending_twist_ = cmd;  // latest command wins within one step
}

void SimWorld::handle_goto(const TypedMessage & msg)
{
  const Value * pose = msg.payload.find("pose");
  if (pose == nullptr) {
    throw MalformedGoal("goto goal needs a pose");
  }
  const PlanarPose goal = planar_pose_of(*pose);
  if (!std::isfinite(goal.x) || !std::isfinite(goal.y)) {
    throw MalformedGoal("non-finite goto goal");
  }
  goto_goal_ = goal;  // orientation is carried but the controller ignores it
}

void SimWorld::handle(const std::string & topic, const TypedMessage & msg)
{
  try {
    if (topic == topics::kCmdVel) {
      handle_cmd_vel(msg);
    } else if (topic == topics::kGotoGoal) {
      handle_goto(msg);
      counters_.goals_received += 1;
    } else if (topic == topics::kArmWithTorsoGoal || topic == topics::kTorsoGoal) {
      arm_torso_.set_goal(msg.payload, time_);
      counters_.goals_received += 1;
    } else if (topic == topics::kHeadTrajectoryGoal) {
      head_.set_goal(msg.payload, time_);
      counters_.goals_received += 1;
    } else if (topic == topics::kHeadPointGoal) {
      // Point the head: aim pan/tilt at a base-frame point via a synthesized
      // two-waypoint trajectory at the configured head speed.
      const Value * px = msg.payload.find("x");
      const Value * py = msg.payload.find("y");
      const Value * pz = msg.payload.find("z");
      if (px == nullptr || py == nullptr || pz == nullptr) {
        throw MalformedGoal("point-head goal needs x, y, z");
      }
      constexpr double kHeadHeight = 1.05;
      const double x = px->number();
      const double y = py->number();
      const double z = pz->number();
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z)) {
        throw MalformedGoal("non-finite point-head goal");
      }
      const double pan = std::atan2(y, x);
      const double tilt = std::atan2(kHeadHeight - z, std::hypot(x, y));
      const std::vector<double> from = head_.positions();
      const double travel = std::max(std::fabs(pan - from[0]),
          std::fabs(tilt - from[1]));
      head_.set_goal(synth_trajectory(head_joints(), from, {pan, tilt},
        travel / config_.head_speed).payload, time_);
      counters_.goals_received += 1;
    } else if (topic == topics::kGripperGoal) {
      const Value * position = msg.payload.find("position");
      if (position == nullptr) {
        throw MalformedGoal("gripper goal needs a position");
      }
      const double target = position->number();
      if (!std::isfinite(target)) {
        throw MalformedGoal("non-finite gripper goal");
      }
      const double from = gripper_.positions()[0];
      gripper_.set_goal(synth_trajectory(gripper_joints(), {from}, {target},
        std::fabs(target - from) / config_.gripper_speed).payload, time_);
      counters_.goals_received += 1;
    } else {
      // Pass-through: visualization and speech topics (and anything else)
      // just accumulate in their sinks.
      sinks_[topic].push_back(std::make_shared<TypedMessage>(msg));
      counters_.sink_messages += 1;
    }
  } catch (const Error &) {
    counters_.dropped += 1;
  }
}

std::size_t SimWorld::drain()
{
  std::size_t count = 0;
  for (auto & sub : inputs_) {
    while (auto delivery = sub.try_pop()) {
      handle(sub.topic(), *delivery->message);
      ++count;
    }
  }
  return count;
}

void SimWorld::advance(double dt)
{
  if (!std::isfinite(dt) || dt <= 0.0) {
    throw NonFiniteInput("dt must be positive and finite");
  }

  // 1. Integrate the command received last step (one-step delay), exactly
  //    once; the base stops unless commands keep coming.
  if (pending_twist_) {
    base_ = apply_twist(base_, *pending_twist_, dt, noise_);
    pending_twist_.reset();
    counters_.twists_applied += 1;
  }

  time_ += dt;

  // 2. Trajectory-driven joints move to their new virtual-time positions.
  const bool was_active = trajectories_active();
  arm_torso_.advance(time_);
  head_.advance(time_);
  gripper_.advance(time_);
  if (was_active && !trajectories_active()) {
    counters_.goals_completed += 1;
  }

  // 3. The waypoint controller sees the post-integration state and emits
  //    the next command onto the bus.
  run_goto_controller();

  // 4. State topics.
  if (config_.publish_state) {
    publish_state();
  }
}

bool SimWorld::trajectories_active() const
{
  return arm_torso_.active() || head_.active() || gripper_.active();
}

double SimWorld::joint_position(const std::string & joint) const
{
  for (const JointGroup * group : {&arm_torso_, &head_, &gripper_}) {
    const auto & names = group->joints();
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == joint) {
        return group->positions()[i];
      }
    }
  }
  throw Error("unknown joint: " + joint);
}

void SimWorld::run_goto_controller()
{
  if (!goto_goal_) {
    return;
  }
  const double dx = goto_goal_->x - base_.x;
  const double dy = goto_goal_->y - base_.y;
  const double dist = std::hypot(dx, dy);

  if (dist <= config_.position_tolerance) {
    // Settled.  An exactly-zero twist ends the recorded command stream and
    // is immune to actuation noise, so the base stays put.
    bus_.publish(topics::kCmdVel, make_planar_twist(0.0, 0.0));
    goto_goal_.reset();
    counters_.goals_completed += 1;
    return;
  }

  const double heading = std::atan2(dy, dx);
  const double heading_error = wrap_angle(heading - base_.theta);
  const double w = std::clamp(config_.k_heading * heading_error,
      -config_.max_angular, config_.max_angular);
  // Drive only when roughly facing the goal; never backward.
  const double align = std::max(std::cos(heading_error), 0.0);
  const double v = std::min(config_.k_linear * dist, config_.max_linear) * align;
  bus_.publish(topics::kCmdVel, make_planar_twist(v, w));
}

void SimWorld::publish_state()
{
  const Timestamp stamp = now_stamp();
  bus_.publish(topics::kBasePose, make_pose_stamped("odom", stamp,
    planar_pose_value(base_.x, base_.y, base_.theta)));

  std::vector<std::string> names;
  std::vector<double> positions;
  for (const JointGroup * group : {&arm_torso_, &head_, &gripper_}) {
    names.insert(names.end(), group->joints().begin(), group->joints().end());
    positions.insert(positions.end(), group->positions().begin(),
      group->positions().end());
  }
  bus_.publish(topics::kJointStates, make_joint_state(stamp, names, positions));
}

std::size_t SimWorld::sink_count(const std::string & topic) const
{
  const auto it = sinks_.find(topic);
  return it == sinks_.end() ? 0 : it->second.size();
}

std::vector<std::shared_ptr<const TypedMessage>> SimWorld::take_sink(
  const std::string & topic)
{
  const auto it = sinks_.find(topic);
  if (it == sinks_.end()) {
    return {};
  }
  std::vector<std::shared_ptr<const TypedMessage>> out = std::move(it->second);
  sinks_.erase(it);
  return out;
}

}  // namespace replaykit

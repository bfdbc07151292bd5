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

#ifndef REPLAYKIT__SIMBOT_HPP_
#define REPLAYKIT__SIMBOT_HPP_

/// Deterministic kinematic simulator of a one-armed mobile manipulator
/// (differential-drive base, torso lift, 7-DOF arm, pan/tilt head, parallel
/// gripper).  It consumes command topics from a Bus, integrates in virtual
/// time only (state changes happen exclusively inside advance()), and
/// publishes its state back onto the bus.  Everything is seeded and
/// single-threaded, so a fixed input sequence yields a bit-identical state
/// trajectory, which is what makes command-stream replay testable.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "replaykit/bus.hpp"
#include "replaykit/errors.hpp"
#include "replaykit/message.hpp"
#include "replaykit/value.hpp"

namespace replaykit
{

class NonFiniteInput : public Error
{
public:
  explicit NonFiniteInput(const std::string & what)
  : Error("non-finite input: " + what) {}
};

/// Trajectory goal rejected: non-monotonic times, arity mismatch between
/// joint_names and positions, unknown joint, or non-finite numbers.
class MalformedGoal : public Error
{
public:
  explicit MalformedGoal(const std::string & why)
  : Error("malformed goal: " + why) {}
};

/// Topic names the simulator knows about.  Command topics are consumed,
/// state topics are published, and the rest pass through to message sinks.
namespace topics
{
inline constexpr char kCmdVel[] = "/cmd_vel";
inline constexpr char kGotoGoal[] = "/nav/goto_goal";
inline constexpr char kArmWithTorsoGoal[] =
  "/arm_with_torso_controller/follow_joint_trajectory/goal";
inline constexpr char kTorsoGoal[] = "/torso_controller/follow_joint_trajectory/goal";
inline constexpr char kHeadTrajectoryGoal[] =
  "/head_controller/follow_joint_trajectory/goal";
inline constexpr char kHeadPointGoal[] = "/head_controller/point_head/goal";
inline constexpr char kGripperGoal[] = "/gripper_controller/gripper_action/goal";
inline constexpr char kBasePose[] = "/sim/base_pose";
inline constexpr char kJointStates[] = "/sim/joint_states";
inline constexpr char kSound[] = "/robotsound";
inline constexpr char kGraspCloud[] = "/perception/grasp_target";
inline constexpr char kObstacleCloud[] = "/perception/ground_obstacle";
inline constexpr char kDetourPath[] = "/nav/detour_path";
inline constexpr char kCaddyMarker[] = "/viz/caddy_marker";
}  // namespace topics

/// Planar base pose.  theta is kept wrapped to (-pi, pi].
struct BaseState
{
  double x {0.0};
  double y {0.0};
  double theta {0.0};

  bool operator==(const BaseState &) const = default;
};

/// Wraps an angle to (-pi, pi].
double wrap_angle(double a);

/// Standard-normal draws via Box-Muller over mt19937_64.  Hand-rolled
/// because std::normal_distribution's output is implementation-defined,
/// and identical seeds must give identical trajectories everywhere.
class SeededGaussian
{
public:
  explicit SeededGaussian(std::uint64_t seed)
  : engine_(seed) {}

  double next();

private:
  std::mt19937_64 engine_;
  double spare_ {0.0};
  bool has_spare_ {false};
};

struct NoiseConfig
{
  bool enabled {false};
  double sigma_v {0.0};  // m/s std-dev added to applied linear velocity
  double sigma_w {0.0};  // rad/s std-dev added to applied angular velocity
  std::uint64_t seed {0};
};

/// Actuation noise source.  perturb() adds one seeded Gaussian kick per
/// component, in a fixed draw order, and leaves an exactly-zero command
/// untouched so an idle base never wanders.
class NoiseModel
{
public:
  NoiseModel()
  : NoiseModel(NoiseConfig{}) {}
  explicit NoiseModel(const NoiseConfig & config);

  void perturb(double & v, double & w);

  const NoiseConfig & config() const {return config_;}

private:
  NoiseConfig config_;
  SeededGaussian gauss_;
};

/// One unicycle integration step in closed form.
///   |w| <  1e-9:  straight line  x += v dt cos(theta), y += v dt sin(theta)
///   otherwise:    arc            x += (v/w)(sin(theta + w dt) - sin(theta))
///                                y += (v/w)(cos(theta) - cos(theta + w dt))
/// then theta += w dt, wrapped.  Noise, when enabled, perturbs (v, w) once
/// before integration.  Throws NonFiniteInput on non-finite state or command;
/// dt must be positive.
BaseState apply_twist(const BaseState & s, const PlanarTwist & cmd, double dt,
  NoiseModel & noise);

/// A set of named joints driven by piecewise-linear trajectory goals.
/// A goal may command any subset of the group's joints; a new goal preempts
/// the previous one.  Between set_goal and the first waypoint time the
/// commanded joints hold the positions they had at receipt; at and past the
/// last waypoint time they clamp to the final positions and the goal is done.
class JointGroup
{
public:
  JointGroup(std::vector<std::string> joints, std::vector<double> start);

  /// `goal_payload` follows the joint-trajectory layout: joint_names plus
  /// points[{positions, time_from_start}].  Throws MalformedGoal.
  void set_goal(const Value & goal_payload, double now_s);
  void advance(double now_s);
  void halt() {goal_.reset();}

  bool active() const {return goal_.has_value();}
  const std::vector<std::string> & joints() const {return joints_;}
  const std::vector<double> & positions() const {return positions_;}
  double position_of(const std::string & joint) const;

private:
  struct Goal
  {
    std::vector<std::size_t> index;              // commanded joint -> group slot
    std::vector<double> hold;                    // positions at receipt
    std::vector<double> times;                   // strictly increasing
    std::vector<std::vector<double>> waypoints;  // per time, per commanded joint
    double t0;                                   // virtual receipt time
  };

  std::vector<std::string> joints_;
  std::vector<double> positions_;
  std::optional<Goal> goal_;
};

struct SimConfig
{
  NoiseConfig noise;

  // Waypoint controller: proportional heading + distance control with
  // saturation.  Position-only; a goal's orientation is ignored.
  double k_linear {1.5};
  double k_heading {2.5};
  double max_linear {0.6};       // m/s
  double max_angular {1.5};      // rad/s
  double position_tolerance {2e-4};  // m; settle radius, also the error floor

  double gripper_speed {0.05};   // m/s aperture change
  double head_speed {1.5};       // rad/s for synthesized point-head motions

  /// Subscribe to command and pass-through topics.  Off when an external
  /// driver feeds handle() directly and the bus queues must stay untouched.
  bool subscribe_inputs {true};
  /// Publish /sim/base_pose and /sim/joint_states each advance().
  bool publish_state {true};
};

/// The simulator world.  Construction advertises every known topic on the
/// bus (so strict mode works for all producers) and, per config, subscribes
/// to the command topics.  Virtual time starts at zero and moves only in
/// advance(); the wall clock is never consulted.
///
/// The command model has a one-step delay: a /cmd_vel received during
/// step k's drain is integrated during step k's advance, and a command the
/// waypoint controller emits during step k comes back through the bus and
/// moves the base in step k+1.  Each received command moves the base for
/// exactly one advance (no hold), so the trajectory is a pure function of
/// the command sequence and the dt sequence.
class SimWorld
{
public:
  struct Counters
  {
    std::size_t twists_applied {0};
    std::size_t goals_received {0};
    std::size_t goals_completed {0};
    std::size_t sink_messages {0};
    std::size_t dropped {0};  // malformed inputs, counted not thrown
  };

  SimWorld(Bus & bus, SimConfig config = {});

  /// Feed one message directly (same routing as the bus path).  Unknown
  /// topics land in the pass-through sinks.
  void handle(const std::string & topic, const TypedMessage & msg);

  /// Pop everything pending on the world's own subscriptions into handle().
  std::size_t drain();

  /// Advance virtual time: integrate the pending base command, move
  /// trajectory groups, run the waypoint controller (which publishes
  /// /cmd_vel), then publish state.  dt must be positive and finite.
  void advance(double dt);

  void step(double dt)
  {
    drain();
    advance(dt);
  }

  double now_s() const {return time_;}
  Timestamp now_stamp() const {return Timestamp::from_seconds(time_);}

  const BaseState & base() const {return base_;}
  void set_base(const BaseState & s) {base_ = s;}

  bool goto_active() const {return goto_goal_.has_value();}
  bool trajectories_active() const;
  bool idle() const {return !goto_active() && !trajectories_active();}

  const JointGroup & arm_with_torso() const {return arm_torso_;}
  const JointGroup & head() const {return head_;}
  const JointGroup & gripper() const {return gripper_;}
  double joint_position(const std::string & joint) const;

  std::size_t sink_count(const std::string & topic) const;
  std::vector<std::shared_ptr<const TypedMessage>> take_sink(const std::string & topic);

  const Counters & counters() const {return counters_;}
  const SimConfig & config() const {return config_;}

private:
  void handle_cmd_vel(const TypedMessage & msg);
  void handle_goto(const TypedMessage & msg);
  void run_goto_controller();
  void publish_state();

  Bus & bus_;
  SimConfig config_;
  NoiseModel noise_;
  double time_ {0.0};

  BaseState base_;
  std::optional<PlanarTwist> pending_twist_;
  std::optional<PlanarPose> goto_goal_;

  JointGroup arm_torso_;
  JointGroup head_;
  JointGroup gripper_;

  std::vector<Subscription> inputs_;
  std::map<std::string, std::vector<std::shared_ptr<const TypedMessage>>> sinks_;
  Counters counters_;
};

}  // namespace replaykit

#endif  // REPLAYKIT__SIMBOT_HPP_

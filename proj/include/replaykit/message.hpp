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

#ifndef REPLAYKIT__MESSAGE_HPP_
#define REPLAYKIT__MESSAGE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "replaykit/errors.hpp"
#include "replaykit/time.hpp"
#include "replaykit/value.hpp"

namespace replaykit
{

/// A message is a type name plus a map-shaped payload.  Types are labels:
/// the registry below describes the layouts of the standard ones, but any
/// type name may travel through the bus and the store.
struct TypedMessage
{
  std::string type_name;
  Value payload;  // Kind::Map

  bool operator==(const TypedMessage &) const = default;
};

/// Strict decode of a type that has no registered layout.
class UnknownType : public Error
{
public:
  explicit UnknownType(const std::string & type_name)
  : Error("unknown message type: " + type_name), type_name(type_name) {}
  std::string type_name;
};

/// Structural mismatch between a payload and a registered layout (missing
/// field, wrong leaf kind, wrong type tag).
class SchemaMismatch : public Error
{
public:
  SchemaMismatch(const std::string & path, const std::string & detail)
  : Error("schema mismatch at '" + path + "': " + detail), path(path), detail(detail) {}
  std::string path;
  std::string detail;
};

enum class DecodeMode
{
  Strict,      // unknown type names are an error
  Permissive,  // unknown type names pass the payload through untouched
};

/// One finding from validate(); `path` is a dotted field path into the
/// payload ("" for the payload itself), `rule` a short stable identifier.
struct Violation
{
  std::string path;
  std::string rule;
  std::string detail;

  bool operator==(const Violation &) const = default;
};

/// Payload plus a leading "_type" tag, as a document ready for canonical
/// serialization.  The payload must be a map and must not already contain
/// a "_type" key.
Value encode(const TypedMessage & msg);

/// Inverse of encode.  Checks the "_type" tag (when present) against
/// `expected_type`, and for registered types checks the payload against
/// the registered layout.  Semantic rules (quaternion norms, timestamp
/// ranges, trajectory monotonicity) are validate()'s job, not decode's.
TypedMessage decode(const Value & doc, const std::string & expected_type,
  DecodeMode mode = DecodeMode::Strict);

/// Full validation: payload shape, finite floats, UTF-8 strings, reserved
/// keys, layout conformance, and the semantic rules for standard types.
/// Returns every violation found (empty means valid).
std::vector<Violation> validate(const TypedMessage & msg);

bool is_registered_type(const std::string & type_name);
std::vector<std::string> registered_type_names();

// Standard type names.
namespace types
{
inline constexpr char kHeader[] = "Header";
inline constexpr char kPoint[] = "Point";
inline constexpr char kQuaternion[] = "Quaternion";
inline constexpr char kPose[] = "Pose";
inline constexpr char kPoseStamped[] = "PoseStamped";
inline constexpr char kTwist[] = "Twist";
inline constexpr char kJointTrajectoryGoal[] = "JointTrajectoryGoal";
inline constexpr char kGripperGoal[] = "GripperGoal";
inline constexpr char kPointCloud[] = "PointCloud";
inline constexpr char kMarker[] = "Marker";
inline constexpr char kPath[] = "Path";
inline constexpr char kSoundRequest[] = "SoundRequest";
inline constexpr char kJointState[] = "JointState";
}  // namespace types

// --- payload builders ----------------------------------------------------

Value stamp_value(const Timestamp & stamp);
Value header_value(const std::string & frame_id, const Timestamp & stamp);
Value point_value(double x, double y, double z);
Value quaternion_value(double x, double y, double z, double w);
/// Unit quaternion for a rotation of `yaw` radians about +z.
Value yaw_quaternion_value(double yaw);
Value pose_value(const Value & position, const Value & orientation);
Value planar_pose_value(double x, double y, double yaw);
Value color_value(double r, double g, double b, double a);

TypedMessage make_twist(double vx, double vy, double vz, double wx, double wy, double wz);
TypedMessage make_planar_twist(double v, double w);
TypedMessage make_pose_stamped(const std::string & frame_id, const Timestamp & stamp,
  const Value & pose);

struct TrajectoryPointArg
{
  std::vector<double> positions;
  double time_from_start;
};
TypedMessage make_joint_trajectory_goal(const std::vector<std::string> & joint_names,
  const std::vector<TrajectoryPointArg> & points);
TypedMessage make_gripper_goal(double position, double max_effort);

struct Xyz
{
  double x;
  double y;
  double z;
};
TypedMessage make_point_cloud(const std::string & frame_id, const Timestamp & stamp,
  const std::vector<Xyz> & points);
TypedMessage make_marker(const std::string & frame_id, const Timestamp & stamp,
  const std::string & shape, const Value & pose, const Xyz & scale, const Value & color);
TypedMessage make_path(const std::string & frame_id, const Timestamp & stamp,
  const std::vector<Value> & pose_stamped_payloads);
TypedMessage make_sound_request(const std::string & text);
TypedMessage make_joint_state(const Timestamp & stamp,
  const std::vector<std::string> & joint_names, const std::vector<double> & positions);

// --- payload readers -----------------------------------------------------

/// Timestamp found at payload.header.stamp, when present and well formed.
std::optional<Timestamp> stamp_of(const Value & payload);

/// Timestamp from a {"sec":int,"nsec":int} map; throws SchemaMismatch.
Timestamp read_stamp(const Value & stamp, const std::string & path = "stamp");

struct PlanarTwist
{
  double v;  // linear.x, m/s
  double w;  // angular.z, rad/s
};
PlanarTwist planar_twist_of(const Value & twist_payload);

struct PlanarPose
{
  double x;
  double y;
  double yaw;
};
/// Planar reading of a Pose payload (yaw about +z from the quaternion).
PlanarPose planar_pose_of(const Value & pose);

double yaw_of_quaternion(const Value & quaternion);

}  // namespace replaykit

#endif  // REPLAYKIT__MESSAGE_HPP_

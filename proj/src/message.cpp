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

#include "replaykit/message.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <utility>

#include "replaykit/document.hpp"

namespace replaykit
{

namespace
{

constexpr double kQuaternionNormTolerance = 1e-6;

/// Layout description for registered types.  Leaves are value kinds;
/// Struct nodes may carry a semantic rule checked by validate().
struct Layout
{
  enum class Kind { F64, Int, Bool, Text, Stamp, List, Struct, Choice };
  enum class Semantic { None, UnitQuaternion, TrajectoryGoal };

  Kind kind;
  std::shared_ptr<const Layout> element;  // List
  std::vector<std::pair<std::string, std::shared_ptr<const Layout>>> fields;  // Struct
  std::vector<std::string> choices;  // Choice
  Semantic semantic {Semantic::None};
};

using LayoutRef = std::shared_ptr<const Layout>;

LayoutRef leaf(Layout::Kind k)
{
  auto l = std::make_shared<Layout>();
  l->kind = k;
  return l;
}

LayoutRef list_of(LayoutRef elem)
{
  auto l = std::make_shared<Layout>();
  l->kind = Layout::Kind::List;
  l->element = std::move(elem);
  return l;
}

LayoutRef struct_of(std::vector<std::pair<std::string, LayoutRef>> fields,
  Layout::Semantic semantic = Layout::Semantic::None)
{
  auto l = std::make_shared<Layout>();
  l->kind = Layout::Kind::Struct;
  l->fields = std::move(fields);
  l->semantic = semantic;
  return l;
}

LayoutRef choice_of(std::vector<std::string> choices)
{
  auto l = std::make_shared<Layout>();
  l->kind = Layout::Kind::Choice;
  l->choices = std::move(choices);
  return l;
}

const std::map<std::string, LayoutRef> & registry()
{
  static const std::map<std::string, LayoutRef> reg = [] {
      const LayoutRef f64 = leaf(Layout::Kind::F64);
      const LayoutRef text = leaf(Layout::Kind::Text);
      const LayoutRef stamp = leaf(Layout::Kind::Stamp);
      const LayoutRef header = struct_of({{"frame_id", text}, {"stamp", stamp}});
      const LayoutRef point = struct_of({{"x", f64}, {"y", f64}, {"z", f64}});
      const LayoutRef quaternion = struct_of(
        {{"x", f64}, {"y", f64}, {"z", f64}, {"w", f64}},
        Layout::Semantic::UnitQuaternion);
      const LayoutRef pose = struct_of({{"position", point}, {"orientation", quaternion}});
      const LayoutRef pose_stamped = struct_of({{"header", header}, {"pose", pose}});
      const LayoutRef color = struct_of({{"r", f64}, {"g", f64}, {"b", f64}, {"a", f64}});
      const LayoutRef traj_point = struct_of(
        {{"positions", list_of(f64)}, {"time_from_start", f64}});

      std::map<std::string, LayoutRef> reg;
      reg[types::kHeader] = header;
      reg[types::kPoint] = point;
      reg[types::kQuaternion] = quaternion;
      reg[types::kPose] = pose;
      reg[types::kPoseStamped] = pose_stamped;
      reg[types::kTwist] = struct_of({{"linear", point}, {"angular", point}});
      reg[types::kJointTrajectoryGoal] = struct_of(
        {{"joint_names", list_of(text)}, {"points", list_of(traj_point)}},
        Layout::Semantic::TrajectoryGoal);
      reg[types::kGripperGoal] = struct_of({{"position", f64}, {"max_effort", f64}});
      reg[types::kPointCloud] = struct_of({{"header", header}, {"points", list_of(point)}});
      reg[types::kMarker] = struct_of(
        {{"header", header},
          {"shape", choice_of({"arrow", "cube", "cylinder", "sphere"})},
          {"pose", pose},
          {"scale", point},
          {"color", color}});
      reg[types::kPath] = struct_of({{"header", header}, {"poses", list_of(pose_stamped)}});
      reg[types::kSoundRequest] = struct_of({{"text", text}});
      reg[types::kJointState] = struct_of(
        {{"header", header}, {"joint_names", list_of(text)}, {"positions", list_of(f64)}});
      return reg;
    }();
  return reg;
}

std::string joined(const std::string & path, const std::string & key)
{
  return path.empty() ? key : path + "." + key;
}

std::string indexed(const std::string & path, std::size_t i)
{
  return path + "[" + std::to_string(i) + "]";
}

/// Structural conformance only; `semantics` additionally applies the
/// semantic rules (validate wants both, decode only structure).
void check_layout(const Value & v, const Layout & layout, const std::string & path,
  bool semantics, std::vector<Violation> & out)
{
  switch (layout.kind) {
    case Layout::Kind::F64:
      if (!v.is_f64()) {
        out.push_back({path, "kind", std::string("expected float64, got ") + kind_name(v.kind())});
      }
      return;
    case Layout::Kind::Int:
      if (!v.is_int()) {
        out.push_back({path, "kind", std::string("expected int, got ") + kind_name(v.kind())});
      }
      return;
    case Layout::Kind::Bool:
      if (!v.is_bool()) {
        out.push_back({path, "kind", std::string("expected bool, got ") + kind_name(v.kind())});
      }
      return;
    case Layout::Kind::Text:
      if (!v.is_string()) {
        out.push_back({path, "kind", std::string("expected string, got ") + kind_name(v.kind())});
      }
      return;
    case Layout::Kind::Stamp: {
      if (!v.is_map()) {
        out.push_back({path, "kind", std::string("expected stamp map, got ") + kind_name(v.kind())});
        return;
      }
      const Value * sec = v.find("sec");
      const Value * nsec = v.find("nsec");
      if (!sec || !sec->is_int()) {
        out.push_back({joined(path, "sec"), sec ? "kind" : "missing_field",
            "stamp needs an int 'sec'"});
      }
      if (!nsec || !nsec->is_int()) {
        out.push_back({joined(path, "nsec"), nsec ? "kind" : "missing_field",
            "stamp needs an int 'nsec'"});
      } else if (semantics && (nsec->as_int() < 0 || nsec->as_int() >= kNsPerSec)) {
        out.push_back({joined(path, "nsec"), "stamp_range",
            "nsec " + std::to_string(nsec->as_int()) + " outside [0, 1e9)"});
      }
      return;
    }
    case Layout::Kind::Choice: {
      if (!v.is_string()) {
        out.push_back({path, "kind", std::string("expected string, got ") + kind_name(v.kind())});
        return;
      }
      for (const auto & c : layout.choices) {
        if (v.as_string() == c) {return;}
      }
      out.push_back({path, "choice", "'" + v.as_string() + "' is not an allowed value"});
      return;
    }
    case Layout::Kind::List: {
      if (!v.is_array()) {
        out.push_back({path, "kind", std::string("expected array, got ") + kind_name(v.kind())});
        return;
      }
      for (std::size_t i = 0; i < v.as_array().size(); ++i) {
        check_layout(v.as_array()[i], *layout.element, indexed(path, i), semantics, out);
      }
      return;
    }
    case Layout::Kind::Struct: {
      if (!v.is_map()) {
        out.push_back({path, "kind", std::string("expected map, got ") + kind_name(v.kind())});
        return;
      }
      // Extra keys are allowed (the store is schemaless; a layout names
      // the minimum structure), missing or mistyped ones are not.
      for (const auto & [name, field] : layout.fields) {
        const Value * member = v.find(name);
        if (!member) {
          out.push_back({joined(path, name), "missing_field", "required field is absent"});
          continue;
        }
        check_layout(*member, *field, joined(path, name), semantics, out);
      }
      if (!semantics) {return;}
      if (layout.semantic == Layout::Semantic::UnitQuaternion) {
        const Value * x = v.find("x");
        const Value * y = v.find("y");
        const Value * z = v.find("z");
        const Value * w = v.find("w");
        if (x && y && z && w && x->is_f64() && y->is_f64() && z->is_f64() && w->is_f64()) {
          const double n = std::sqrt(
            x->as_f64() * x->as_f64() + y->as_f64() * y->as_f64() +
            z->as_f64() * z->as_f64() + w->as_f64() * w->as_f64());
          if (std::abs(n - 1.0) > kQuaternionNormTolerance) {
            out.push_back({path, "quaternion_norm",
                "norm " + std::to_string(n) + " differs from 1 by more than 1e-6"});
          }
        }
      } else if (layout.semantic == Layout::Semantic::TrajectoryGoal) {
        const Value * names = v.find("joint_names");
        const Value * points = v.find("points");
        if (names && names->is_array() && points && points->is_array()) {
          const std::size_t n_joints = names->as_array().size();
          double prev = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < points->as_array().size(); ++i) {
            const Value & p = points->as_array()[i];
            if (!p.is_map()) {continue;}
            const Value * pos = p.find("positions");
            if (pos && pos->is_array() && pos->as_array().size() != n_joints) {
              out.push_back({joined(indexed(joined(path, "points"), i), "positions"),
                  "trajectory_arity",
                  std::to_string(pos->as_array().size()) + " positions for " +
                  std::to_string(n_joints) + " joints"});
            }
            const Value * tfs = p.find("time_from_start");
            if (tfs && tfs->is_f64()) {
              if (!(tfs->as_f64() > prev)) {
                out.push_back({joined(indexed(joined(path, "points"), i), "time_from_start"),
                    "trajectory_times", "times must be strictly increasing"});
              }
              prev = tfs->as_f64();
            }
          }
        }
      }
      return;
    }
  }
}

/// Generic well-formedness independent of any layout.
void check_generic(const Value & v, const std::string & path, bool top_level,
  std::vector<Violation> & out)
{
  switch (v.kind()) {
    case Value::Kind::Float64:
      if (!std::isfinite(v.as_f64())) {
        out.push_back({path, "finite", "float64 is not finite"});
      }
      return;
    case Value::Kind::String:
      if (!is_valid_utf8(v.as_string())) {
        out.push_back({path, "utf8", "string is not valid UTF-8"});
      }
      return;
    case Value::Kind::Array:
      for (std::size_t i = 0; i < v.as_array().size(); ++i) {
        check_generic(v.as_array()[i], indexed(path, i), false, out);
      }
      return;
    case Value::Kind::Map:
      for (const auto & [key, member] : v.as_map()) {
        if (!key.empty() && key[0] == '$') {
          out.push_back({joined(path, key), "reserved_key", "keys may not start with '$'"});
        }
        if (top_level && key == "_type") {
          out.push_back({joined(path, key), "reserved_key",
              "'_type' at the payload top level collides with the encoding tag"});
        }
        if (!is_valid_utf8(key)) {
          out.push_back({joined(path, key), "utf8", "map key is not valid UTF-8"});
        }
        check_generic(member, joined(path, key), false, out);
      }
      return;
    default:
      return;
  }
}

}  // namespace

Value encode(const TypedMessage & msg)
{
  if (!msg.payload.is_map()) {
    throw SchemaMismatch("", std::string("payload must be a map, got ") +
            kind_name(msg.payload.kind()));
  }
  if (msg.type_name.empty()) {
    throw SchemaMismatch("_type", "type name must be non-empty");
  }
  if (msg.payload.find("_type") != nullptr) {
    throw SchemaMismatch("_type", "payload already contains the reserved '_type' key");
  }
  Value::Map doc = msg.payload.as_map();
  doc.emplace("_type", Value(msg.type_name));
  return Value(std::move(doc));
}

TypedMessage decode(const Value & doc, const std::string & expected_type, DecodeMode mode)
{
  if (!doc.is_map()) {
    throw SchemaMismatch("", std::string("document must be a map, got ") +
            kind_name(doc.kind()));
  }
  const Value * tag = doc.find("_type");
  if (tag != nullptr) {
    if (!tag->is_string()) {
      throw SchemaMismatch("_type", "type tag must be a string");
    }
    if (tag->as_string() != expected_type) {
      throw SchemaMismatch("_type",
              "document is a '" + tag->as_string() + "', expected '" + expected_type + "'");
    }
  }
  Value::Map payload = doc.as_map();
  payload.erase("_type");
  Value payload_value(std::move(payload));

  auto it = registry().find(expected_type);
  if (it == registry().end()) {
    if (mode == DecodeMode::Strict) {
      throw UnknownType(expected_type);
    }
    return TypedMessage{expected_type, std::move(payload_value)};
  }
  std::vector<Violation> problems;
  check_layout(payload_value, *it->second, "", false, problems);
  if (!problems.empty()) {
    throw SchemaMismatch(problems.front().path, problems.front().detail);
  }
  return TypedMessage{expected_type, std::move(payload_value)};
}

std::vector<Violation> validate(const TypedMessage & msg)
{
  std::vector<Violation> out;
  if (!msg.payload.is_map()) {
    out.push_back({"", "kind", std::string("payload must be a map, got ") +
        kind_name(msg.payload.kind())});
    return out;
  }
  if (msg.type_name.empty()) {
    out.push_back({"_type", "missing_field", "type name must be non-empty"});
  }
  check_generic(msg.payload, "", true, out);
  auto it = registry().find(msg.type_name);
  if (it != registry().end()) {
    check_layout(msg.payload, *it->second, "", true, out);
  }
  return out;
}

bool is_registered_type(const std::string & type_name)
{
  return registry().count(type_name) > 0;
}

std::vector<std::string> registered_type_names()
{
  std::vector<std::string> names;
  for (const auto & [name, layout] : registry()) {
    names.push_back(name);
  }
  return names;
}

// --- builders -------------------------------------------------------------

Value stamp_value(const Timestamp & stamp)
{
  return Value(Value::Map{
      {"sec", Value(stamp.sec)},
      {"nsec", Value(static_cast<std::int64_t>(stamp.nsec))}});
}

Value header_value(const std::string & frame_id, const Timestamp & stamp)
{
  return Value(Value::Map{{"frame_id", Value(frame_id)}, {"stamp", stamp_value(stamp)}});
}

Value point_value(double x, double y, double z)
{
  return Value(Value::Map{{"x", Value(x)}, {"y", Value(y)}, {"z", Value(z)}});
}

Value quaternion_value(double x, double y, double z, double w)
{
  return Value(Value::Map{{"x", Value(x)}, {"y", Value(y)}, {"z", Value(z)}, {"w", Value(w)}});
}

Value yaw_quaternion_value(double yaw)
{
  return quaternion_value(0.0, 0.0, std::sin(yaw / 2.0), std::cos(yaw / 2.0));
}

Value pose_value(const Value & position, const Value & orientation)
{
  return Value(Value::Map{{"position", position}, {"orientation", orientation}});
}

Value planar_pose_value(double x, double y, double yaw)
{
  return pose_value(point_value(x, y, 0.0), yaw_quaternion_value(yaw));
}

Value color_value(double r, double g, double b, double a)
{
  return Value(Value::Map{{"r", Value(r)}, {"g", Value(g)}, {"b", Value(b)}, {"a", Value(a)}});
}

TypedMessage make_twist(double vx, double vy, double vz, double wx, double wy, double wz)
{
  return TypedMessage{types::kTwist, Value(Value::Map{
        {"linear", point_value(vx, vy, vz)},
        {"angular", point_value(wx, wy, wz)}})};
}

TypedMessage make_planar_twist(double v, double w)
{
  return make_twist(v, 0.0, 0.0, 0.0, 0.0, w);
}

TypedMessage make_pose_stamped(const std::string & frame_id, const Timestamp & stamp,
  const Value & pose)
{
  return TypedMessage{types::kPoseStamped, Value(Value::Map{
        {"header", header_value(frame_id, stamp)},
        {"pose", pose}})};
}

TypedMessage make_joint_trajectory_goal(const std::vector<std::string> & joint_names,
  const std::vector<TrajectoryPointArg> & points)
{
  Value::Array names;
  for (const auto & n : joint_names) {
    names.push_back(Value(n));
  }
  Value::Array pts;
  for (const auto & p : points) {
    Value::Array positions;
    for (double q : p.positions) {
      positions.push_back(Value(q));
    }
    pts.push_back(Value(Value::Map{
        {"positions", Value(std::move(positions))},
        {"time_from_start", Value(p.time_from_start)}}));
  }
  return TypedMessage{types::kJointTrajectoryGoal, Value(Value::Map{
        {"joint_names", Value(std::move(names))},
        {"points", Value(std::move(pts))}})};
}

TypedMessage make_gripper_goal(double position, double max_effort)
{
  return TypedMessage{types::kGripperGoal, Value(Value::Map{
        {"position", Value(position)},
        {"max_effort", Value(max_effort)}})};
}

TypedMessage make_point_cloud(const std::string & frame_id, const Timestamp & stamp,
  const std::vector<Xyz> & points)
{
  Value::Array pts;
  for (const auto & p : points) {
    pts.push_back(point_value(p.x, p.y, p.z));
  }
  return TypedMessage{types::kPointCloud, Value(Value::Map{
        {"header", header_value(frame_id, stamp)},
        {"points", Value(std::move(pts))}})};
}

TypedMessage make_marker(const std::string & frame_id, const Timestamp & stamp,
  const std::string & shape, const Value & pose, const Xyz & scale, const Value & color)
{
  return TypedMessage{types::kMarker, Value(Value::Map{
        {"header", header_value(frame_id, stamp)},
        {"shape", Value(shape)},
        {"pose", pose},
        {"scale", point_value(scale.x, scale.y, scale.z)},
        {"color", color}})};
}

TypedMessage make_path(const std::string & frame_id, const Timestamp & stamp,
  const std::vector<Value> & pose_stamped_payloads)
{
  Value::Array poses;
  for (const auto & p : pose_stamped_payloads) {
    poses.push_back(p);
  }
  return TypedMessage{types::kPath, Value(Value::Map{
        {"header", header_value(frame_id, stamp)},
        {"poses", Value(std::move(poses))}})};
}

TypedMessage make_sound_request(const std::string & text)
{
  return TypedMessage{types::kSoundRequest, Value(Value::Map{{"text", Value(text)}})};
}

TypedMessage make_joint_state(const Timestamp & stamp,
  const std::vector<std::string> & joint_names, const std::vector<double> & positions)
{
  Value::Array names;
  for (const auto & n : joint_names) {
    names.push_back(Value(n));
  }
  Value::Array pos;
  for (const double p : positions) {
    pos.push_back(Value(p));
  }
  return TypedMessage{types::kJointState, Value(Value::Map{
        {"header", header_value("base_link", stamp)},
        {"joint_names", Value(std::move(names))},
        {"positions", Value(std::move(pos))}})};
}

// --- readers --------------------------------------------------------------

std::optional<Timestamp> stamp_of(const Value & payload)
{
  const Value * header = payload.find("header");
  if (header == nullptr) {return std::nullopt;}
  const Value * stamp = header->find("stamp");
  if (stamp == nullptr) {return std::nullopt;}
  const Value * sec = stamp->find("sec");
  const Value * nsec = stamp->find("nsec");
  if (!sec || !sec->is_int() || !nsec || !nsec->is_int()) {return std::nullopt;}
  return Timestamp{sec->as_int(), static_cast<std::int32_t>(nsec->as_int())};
}

Timestamp read_stamp(const Value & stamp, const std::string & path)
{
  const Value * sec = stamp.find("sec");
  const Value * nsec = stamp.find("nsec");
  if (!sec || !sec->is_int() || !nsec || !nsec->is_int()) {
    throw SchemaMismatch(path, "expected a {sec:int, nsec:int} map");
  }
  return Timestamp{sec->as_int(), static_cast<std::int32_t>(nsec->as_int())};
}

PlanarTwist planar_twist_of(const Value & twist_payload)
{
  const Value * linear = twist_payload.find("linear");
  const Value * angular = twist_payload.find("angular");
  if (!linear || !angular) {
    throw SchemaMismatch("", "twist payload needs 'linear' and 'angular'");
  }
  const Value * vx = linear->find("x");
  const Value * wz = angular->find("z");
  if (!vx || !vx->is_f64() || !wz || !wz->is_f64()) {
    throw SchemaMismatch("linear.x", "twist components must be float64");
  }
  return PlanarTwist{vx->as_f64(), wz->as_f64()};
}

double yaw_of_quaternion(const Value & quaternion)
{
  const Value * x = quaternion.find("x");
  const Value * y = quaternion.find("y");
  const Value * z = quaternion.find("z");
  const Value * w = quaternion.find("w");
  if (!x || !y || !z || !w || !x->is_f64() || !y->is_f64() || !z->is_f64() || !w->is_f64()) {
    throw SchemaMismatch("orientation", "expected a float64 quaternion");
  }
  const double qx = x->as_f64();
  const double qy = y->as_f64();
  const double qz = z->as_f64();
  const double qw = w->as_f64();
  return std::atan2(2.0 * (qw * qz + qx * qy), 1.0 - 2.0 * (qy * qy + qz * qz));
}

PlanarPose planar_pose_of(const Value & pose)
{
  const Value * position = pose.find("position");
  const Value * orientation = pose.find("orientation");
  if (!position || !orientation) {
    throw SchemaMismatch("pose", "expected 'position' and 'orientation'");
  }
  const Value * x = position->find("x");
  const Value * y = position->find("y");
  if (!x || !x->is_f64() || !y || !y->is_f64()) {
    throw SchemaMismatch("pose.position", "expected float64 x and y");
  }
  return PlanarPose{x->as_f64(), y->as_f64(), yaw_of_quaternion(*orientation)};
}

}  // namespace replaykit

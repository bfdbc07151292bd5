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

#ifndef REPLAYKIT__VALUE_HPP_
#define REPLAYKIT__VALUE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace replaykit
{

using Blob = std::vector<std::uint8_t>;

/// Dynamically typed message value.  A value is one of: float64, int64,
/// bool, string, array of values, string-keyed map of values, or a byte
/// blob.  Maps keep their keys sorted (std::map), which is what makes the
/// canonical serialization deterministic.
class Value
{
public:
  enum class Kind
  {
    Float64,
    Int,
    Bool,
    String,
    Array,
    Map,
    Blob,
  };

  using Array = std::vector<Value>;
  using Map = std::map<std::string, Value>;

  /// Default is an empty map, the usual shape of a message payload.
  Value()
  : data_(Map{}) {}

  Value(double v)  // NOLINT(runtime/explicit): literals should convert
  : data_(v) {}
  Value(std::int64_t v)
  : data_(v) {}
  Value(int v)
  : data_(static_cast<std::int64_t>(v)) {}
  Value(bool v)
  : data_(v) {}
  Value(std::string v)
  : data_(std::move(v)) {}
  Value(const char * v)
  : data_(std::string(v)) {}
  Value(Array v)
  : data_(std::move(v)) {}
  Value(Map v)
  : data_(std::move(v)) {}
  Value(replaykit::Blob v)
  : data_(std::move(v)) {}

  Kind kind() const {return static_cast<Kind>(data_.index());}

  bool is_f64() const {return kind() == Kind::Float64;}
  bool is_int() const {return kind() == Kind::Int;}
  bool is_bool() const {return kind() == Kind::Bool;}
  bool is_string() const {return kind() == Kind::String;}
  bool is_array() const {return kind() == Kind::Array;}
  bool is_map() const {return kind() == Kind::Map;}
  bool is_blob() const {return kind() == Kind::Blob;}

  // Checked accessors; a kind mismatch throws std::bad_variant_access,
  // which callers that need a user-facing error translate themselves.
  double as_f64() const {return std::get<double>(data_);}
  std::int64_t as_int() const {return std::get<std::int64_t>(data_);}
  bool as_bool() const {return std::get<bool>(data_);}
  const std::string & as_string() const {return std::get<std::string>(data_);}
  const Array & as_array() const {return std::get<Array>(data_);}
  Array & as_array() {return std::get<Array>(data_);}
  const Map & as_map() const {return std::get<Map>(data_);}
  Map & as_map() {return std::get<Map>(data_);}
  const replaykit::Blob & as_blob() const {return std::get<replaykit::Blob>(data_);}

  /// Numeric convenience: float64 value or int widened to double.
  /// Only valid on Float64 or Int kinds.
  double number() const
  {
    if (is_int()) {return static_cast<double>(as_int());}
    return as_f64();
  }

  /// Map member lookup; nullptr when absent or when this is not a map.
  const Value * find(const std::string & key) const
  {
    if (!is_map()) {return nullptr;}
    auto it = as_map().find(key);
    return it == as_map().end() ? nullptr : &it->second;
  }

  bool operator==(const Value &) const = default;

private:
  // Alternative order defines Kind; keep the two in sync.
  std::variant<double, std::int64_t, bool, std::string, Array, Map, replaykit::Blob> data_;
};

const char * kind_name(Value::Kind kind);

}  // namespace replaykit

#endif  // REPLAYKIT__VALUE_HPP_

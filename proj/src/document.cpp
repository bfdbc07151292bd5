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

#include "replaykit/document.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>

#include <json.hpp>

namespace replaykit
{

const char * kind_name(Value::Kind kind)
{
  switch (kind) {
    case Value::Kind::Float64: return "float64";
    case Value::Kind::Int: return "int";
    case Value::Kind::Bool: return "bool";
    case Value::Kind::String: return "string";
    case Value::Kind::Array: return "array";
    case Value::Kind::Map: return "map";
    case Value::Kind::Blob: return "blob";
  }
  return "?";
}

namespace
{

constexpr char kBlobKey[] = "$b64";
constexpr char kBase64Chars[] =
  "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

void append_escaped(std::string & out, const std::string & s)
{
  out.push_back('"');
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(static_cast<char>(c));
        }
    }
  }
  out.push_back('"');
}

void append_f64(std::string & out, double v)
{
  if (!std::isfinite(v)) {
    throw DocumentError("canonical_json: non-finite float64");
  }
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  std::string_view text(buf, res.ptr - buf);
  out += text;
  // Shortest form of a whole number has no marker; add one so the
  // float/int distinction survives a round trip.
  if (text.find_first_of(".eE") == std::string_view::npos) {
    out += ".0";
  }
}

void append_int(std::string & out, std::int64_t v)
{
  char buf[24];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr - buf);
}

void append_value(std::string & out, const Value & v)
{
  switch (v.kind()) {
    case Value::Kind::Float64:
      append_f64(out, v.as_f64());
      break;
    case Value::Kind::Int:
      append_int(out, v.as_int());
      break;
    case Value::Kind::Bool:
      out += v.as_bool() ? "true" : "false";
      break;
    case Value::Kind::String:
      if (!is_valid_utf8(v.as_string())) {
        throw DocumentError("canonical_json: string is not valid UTF-8");
      }
      append_escaped(out, v.as_string());
      break;
    case Value::Kind::Array: {
      out.push_back('[');
      bool first = true;
      for (const auto & item : v.as_array()) {
        if (!first) {out.push_back(',');}
        first = false;
        append_value(out, item);
      }
      out.push_back(']');
      break;
    }
    case Value::Kind::Map: {
      const auto & map = v.as_map();
      out.push_back('{');
      bool first = true;
      auto emit = [&](const std::string & key, const Value & val) {
          if (!key.empty() && key[0] == '$') {
            throw DocumentError("canonical_json: map key '" + key + "' uses reserved '$' prefix");
          }
          if (!is_valid_utf8(key)) {
            throw DocumentError("canonical_json: map key is not valid UTF-8");
          }
          if (!first) {out.push_back(',');}
          first = false;
          append_escaped(out, key);
          out.push_back(':');
          append_value(out, val);
        };
      auto type_it = map.find("_type");
      if (type_it != map.end()) {
        emit(type_it->first, type_it->second);
      }
      for (const auto & [key, val] : map) {
        if (type_it != map.end() && key == "_type") {continue;}
        emit(key, val);
      }
      out.push_back('}');
      break;
    }
    case Value::Kind::Blob: {
      out += "{\"";
      out += kBlobKey;
      out += "\":\"";
      out += base64_encode(v.as_blob());
      out += "\"}";
      break;
    }
  }
}

Value from_json(const nlohmann::json & j)
{
  using nlohmann::json;
  switch (j.type()) {
    case json::value_t::object: {
      if (j.size() == 1 && j.begin().key() == kBlobKey) {
        const auto & inner = j.begin().value();
        if (!inner.is_string()) {
          throw DocumentError("parse_document: \"$b64\" value must be a string");
        }
        return Value(base64_decode(inner.get_ref<const std::string &>()));
      }
      Value::Map map;
      for (const auto & [key, val] : j.items()) {
        if (!key.empty() && key[0] == '$') {
          throw DocumentError("parse_document: reserved key '" + key + "' in object");
        }
        map.emplace(key, from_json(val));
      }
      return Value(std::move(map));
    }
    case json::value_t::array: {
      Value::Array items;
      items.reserve(j.size());
      for (const auto & val : j) {
        items.push_back(from_json(val));
      }
      return Value(std::move(items));
    }
    case json::value_t::string:
      return Value(j.get<std::string>());
    case json::value_t::boolean:
      return Value(j.get<bool>());
    case json::value_t::number_integer:
      return Value(j.get<std::int64_t>());
    case json::value_t::number_unsigned: {
      auto u = j.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
        throw DocumentError("parse_document: integer out of int64 range");
      }
      return Value(static_cast<std::int64_t>(u));
    }
    case json::value_t::number_float:
      return Value(j.get<double>());
    default:
      throw DocumentError("parse_document: unsupported JSON value (null or binary)");
  }
}

}  // namespace

std::string canonical_json(const Value & value)
{
  std::string out;
  append_value(out, value);
  return out;
}

Value parse_document(std::string_view text)
{
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error & e) {
    throw DocumentError(std::string("parse_document: ") + e.what());
  }
  return from_json(j);
}

std::string base64_encode(const Blob & bytes)
{
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= bytes.size()) {
    std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kBase64Chars[(n >> 18) & 63]);
    out.push_back(kBase64Chars[(n >> 12) & 63]);
    out.push_back(kBase64Chars[(n >> 6) & 63]);
    out.push_back(kBase64Chars[n & 63]);
    i += 3;
  }
  const std::size_t rem = bytes.size() - i;
  if (rem == 1) {
    std::uint32_t n = bytes[i] << 16;
    out.push_back(kBase64Chars[(n >> 18) & 63]);
    out.push_back(kBase64Chars[(n >> 12) & 63]);
    out += "==";
  } else if (rem == 2) {
    std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kBase64Chars[(n >> 18) & 63]);
    out.push_back(kBase64Chars[(n >> 12) & 63]);
    out.push_back(kBase64Chars[(n >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

Blob base64_decode(std::string_view text)
{
  if (text.size() % 4 != 0) {
    throw DocumentError("base64_decode: length not a multiple of 4");
  }
  static const auto table = [] {
      std::array<std::int8_t, 256> t;
      t.fill(-1);
      for (int i = 0; i < 64; ++i) {
        t[static_cast<unsigned char>(kBase64Chars[i])] = static_cast<std::int8_t>(i);
      }
      return t;
    }();
  Blob out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t n = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        // Padding may only appear in the last one or two positions.
        if (i + 4 != text.size() || k < 2) {
          throw DocumentError("base64_decode: misplaced '='");
        }
        ++pad;
        n <<= 6;
        continue;
      }
      if (pad > 0) {
        throw DocumentError("base64_decode: data after '='");
      }
      const std::int8_t d = table[static_cast<unsigned char>(c)];
      if (d < 0) {
        throw DocumentError("base64_decode: invalid character");
      }
      n = (n << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>((n >> 16) & 0xff));
    if (pad < 2) {out.push_back(static_cast<std::uint8_t>((n >> 8) & 0xff));}
    if (pad < 1) {out.push_back(static_cast<std::uint8_t>(n & 0xff));}
  }
  return out;
}

bool is_valid_utf8(std::string_view text)
{
  std::size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = text[i];
    std::size_t extra;
    std::uint32_t cp;
    if (c < 0x80) {
      i += 1;
      continue;
    } else if ((c & 0xe0) == 0xc0) {
      extra = 1;
      cp = c & 0x1f;
    } else if ((c & 0xf0) == 0xe0) {
      extra = 2;
      cp = c & 0x0f;
    } else if ((c & 0xf8) == 0xf0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= text.size()) {
      return false;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
      const unsigned char cc = text[i + k];
      if ((cc & 0xc0) != 0x80) {return false;}
      cp = (cp << 6) | (cc & 0x3f);
    }
    // Reject overlong forms, surrogates, and out-of-range code points.
    if (extra == 1 && cp < 0x80) {return false;}
    if (extra == 2 && cp < 0x800) {return false;}
    if (extra == 3 && cp < 0x10000) {return false;}
    if (cp >= 0xd800 && cp <= 0xdfff) {return false;}
    if (cp > 0x10ffff) {return false;}
    i += extra + 1;
  }
  return true;
}

}  // namespace replaykit

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "replaykit/document.hpp"
#include "replaykit/value.hpp"
#include "support/generators.hpp"

using replaykit::Blob;
using replaykit::DocumentError;
using replaykit::Value;
using replaykit::base64_decode;
using replaykit::base64_encode;
using replaykit::canonical_json;
using replaykit::parse_document;

TEST_CASE("value kinds and accessors")
{
  CHECK(Value(1.5).kind() == Value::Kind::Float64);
  CHECK(Value(std::int64_t{3}).kind() == Value::Kind::Int);
  CHECK(Value(3).kind() == Value::Kind::Int);
  CHECK(Value(true).kind() == Value::Kind::Bool);
  CHECK(Value("hi").kind() == Value::Kind::String);
  CHECK(Value(Value::Array{}).kind() == Value::Kind::Array);
  CHECK(Value(Value::Map{}).kind() == Value::Kind::Map);
  CHECK(Value(Blob{1, 2}).kind() == Value::Kind::Blob);
  CHECK(Value().kind() == Value::Kind::Map);

  // The float/int distinction is a real type boundary, not a numeric one.
  CHECK(Value(1.0) != Value(std::int64_t{1}));
  CHECK_THROWS_AS((void)Value(1.5).as_int(), std::bad_variant_access);
}

TEST_CASE("canonical form of scalars")
{
  CHECK(canonical_json(Value(true)) == "true");
  CHECK(canonical_json(Value(false)) == "false");
  CHECK(canonical_json(Value(std::int64_t{0})) == "0");
  CHECK(canonical_json(Value(std::int64_t{-7})) == "-7");
  CHECK(canonical_json(Value(std::numeric_limits<std::int64_t>::min())) ==
    "-9223372036854775808");

  // Whole floats keep a marker so they re-parse as floats.
  CHECK(canonical_json(Value(2.0)) == "2.0");
  CHECK(canonical_json(Value(-0.0)) == "-0.0");
  CHECK(canonical_json(Value(0.1)) == "0.1");
  CHECK(canonical_json(Value(1e300)) == "1e+300");
}

TEST_CASE("canonical form of strings escapes every control character")
{
  CHECK(canonical_json(Value("plain")) == "\"plain\"");
  CHECK(canonical_json(Value("a\"b")) == "\"a\\\"b\"");
  CHECK(canonical_json(Value("a\\b")) == "\"a\\\\b\"");
  CHECK(canonical_json(Value("a\nb")) == "\"a\\nb\"");
  CHECK(canonical_json(Value(std::string("a\x01z"))) == "\"a\\u0001z\"");
  // UTF-8 passes through unescaped.
  CHECK(canonical_json(Value("caf\xc3\xa9")) == "\"caf\xc3\xa9\"");

  const std::string line = canonical_json(Value("multi\nline\rtext"));
  CHECK(line.find('\n') == std::string::npos);
  CHECK(line.find('\r') == std::string::npos);
}

TEST_CASE("canonical form of containers")
{
  Value arr(Value::Array{Value(std::int64_t{1}), Value("x"), Value(2.5)});
  CHECK(canonical_json(arr) == "[1,\"x\",2.5]");

  Value map(Value::Map{
      {"b", Value(std::int64_t{2})},
      {"a", Value(std::int64_t{1})},
      {"_type", Value("T")}});
  // Lexicographic keys, "_type" hoisted first.
  CHECK(canonical_json(map) == "{\"_type\":\"T\",\"a\":1,\"b\":2}");

  CHECK(canonical_json(Value(Blob{0xde, 0xad, 0xbe, 0xef})) == "{\"$b64\":\"3q2+7w==\"}");
  CHECK(canonical_json(Value(Blob{})) == "{\"$b64\":\"\"}");
}

TEST_CASE("serializer rejects what the format cannot carry")
{
  CHECK_THROWS_AS(canonical_json(Value(std::nan(""))), DocumentError);
  CHECK_THROWS_AS(canonical_json(Value(std::numeric_limits<double>::infinity())),
    DocumentError);
  CHECK_THROWS_AS(canonical_json(Value(Value::Map{{"$owned", Value(1)}})), DocumentError);
  CHECK_THROWS_AS(canonical_json(Value(std::string("\xff\xfe"))), DocumentError);
}

TEST_CASE("parser edge cases")
{
  CHECK(parse_document("  {\"a\" : 1}\n") == Value(Value::Map{{"a", Value(1)}}));
  CHECK(parse_document("2.0") == Value(2.0));
  CHECK(parse_document("2") == Value(std::int64_t{2}));
  CHECK(parse_document("{\"$b64\":\"AQI=\"}") == Value(Blob{1, 2}));

  CHECK_THROWS_AS(parse_document("null"), DocumentError);
  CHECK_THROWS_AS(parse_document("{\"a\":"), DocumentError);
  CHECK_THROWS_AS(parse_document("{\"$b64\":5}"), DocumentError);
  CHECK_THROWS_AS(parse_document("{\"$weird\":1}"), DocumentError);
  CHECK_THROWS_AS(parse_document("{\"$b64\":\"AQI=\",\"x\":1}"), DocumentError);
  CHECK_THROWS_AS(parse_document("18446744073709551615"), DocumentError);
}

TEST_CASE("base64 codec")
{
  CHECK(base64_encode({}) == "");
  CHECK(base64_encode({'f'}) == "Zg==");
  CHECK(base64_encode({'f', 'o'}) == "Zm8=");
  CHECK(base64_encode({'f', 'o', 'o'}) == "Zm9v");
  CHECK(base64_decode("Zm9v") == Blob{'f', 'o', 'o'});
  CHECK_THROWS_AS(base64_decode("Zg"), DocumentError);
  CHECK_THROWS_AS(base64_decode("Z?=="), DocumentError);
  CHECK_THROWS_AS(base64_decode("=Zg="), DocumentError);

  testsupport::Rng rng(0x5eed);
  for (int i = 0; i < 200; ++i) {
    Blob blob(rng.index(100));
    for (auto & b : blob) {
      b = static_cast<std::uint8_t>(rng.range(0, 255));
    }
    CHECK(base64_decode(base64_encode(blob)) == blob);
  }
}

TEST_CASE("utf8 validation")
{
  CHECK(replaykit::is_valid_utf8(""));
  CHECK(replaykit::is_valid_utf8("ascii"));
  CHECK(replaykit::is_valid_utf8("caf\xc3\xa9"));
  CHECK(replaykit::is_valid_utf8("\xf0\x9f\xa4\x96"));
  CHECK(!replaykit::is_valid_utf8("\xff"));
  CHECK(!replaykit::is_valid_utf8("\xc3"));           // truncated
  CHECK(!replaykit::is_valid_utf8("\xc0\xaf"));       // overlong
  CHECK(!replaykit::is_valid_utf8("\xed\xa0\x80"));   // surrogate
}

TEST_CASE("round trip is byte-identical on random trees")
{
  testsupport::Rng rng(20260822);
  for (int i = 0; i < 2000; ++i) {
    const Value v = testsupport::random_value(rng);
    const std::string first = canonical_json(v);
    const Value back = parse_document(first);
    REQUIRE(back == v);
    REQUIRE(canonical_json(back) == first);
  }
}

TEST_CASE("serialization is deterministic across construction orders")
{
  Value::Map forward;
  forward.emplace("alpha", Value(1));
  forward.emplace("beta", Value(2));
  Value::Map reverse;
  reverse.emplace("beta", Value(2));
  reverse.emplace("alpha", Value(1));
  CHECK(canonical_json(Value(forward)) == canonical_json(Value(reverse)));
}

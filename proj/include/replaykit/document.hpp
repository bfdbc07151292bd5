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

#ifndef REPLAYKIT__DOCUMENT_HPP_
#define REPLAYKIT__DOCUMENT_HPP_

#include <string>
#include <string_view>

#include "replaykit/errors.hpp"
#include "replaykit/value.hpp"

namespace replaykit
{

/// Raised when a value cannot be serialized (non-finite float, reserved
/// key, invalid UTF-8) or a document cannot be parsed.
class DocumentError : public Error
{
public:
  using Error::Error;
};

/// Canonical single-line UTF-8 serialization of a value.
///
/// Rules that make the output byte-deterministic:
///   - map keys in lexicographic order, with "_type" hoisted first when
///     present at that level;
///   - no whitespace, no raw newlines (control characters are escaped);
///   - floats via shortest round-trip formatting, always carrying a "."
///     or exponent marker so they re-parse as floats;
///   - integers in plain decimal;
///   - blobs as {"$b64":"<base64>"}.  Map keys starting with "$" are
///     reserved for the encoding and rejected in user data.
///
/// Total on valid trees; throws DocumentError otherwise.
std::string canonical_json(const Value & value);

/// Inverse of canonical_json.  Accepts any JSON text (whitespace is
/// tolerated on input); throws DocumentError on malformed JSON, nulls,
/// integers outside int64, or misuse of reserved "$" keys.
Value parse_document(std::string_view text);

std::string base64_encode(const Blob & bytes);
Blob base64_decode(std::string_view text);

bool is_valid_utf8(std::string_view text);

}  // namespace replaykit

#endif  // REPLAYKIT__DOCUMENT_HPP_

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

#ifndef REPLAYKIT__ERRORS_HPP_
#define REPLAYKIT__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace replaykit
{

/// Base class for every error raised by this library.  Each module derives
/// one type per error condition so callers can catch precisely.
class Error : public std::runtime_error
{
public:
  explicit Error(const std::string & what)
  : std::runtime_error(what) {}
};

}  // namespace replaykit

#endif  // REPLAYKIT__ERRORS_HPP_

// Copyright 2026 The satconv Authors. All Rights Reserved.
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

#pragma once

#include <stdexcept>
#include <string>

namespace satconv {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller passed an argument outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A file could not be read, parsed, or decoded.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A model, tensor, plan, or profile violates a structural invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Internal consistency failure, e.g. saturation-aware output differing from
// the baseline. Never expected in a correct build.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace satconv

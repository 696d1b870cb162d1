// Copyright 2026 The modelsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace modelsum {

/// Raised for invalid data, incompatible models or failed fits.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed user input: spec strings, control files, flags.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// A measure whose value is mathematically undefined on the given data
/// (e.g. auc with a single class present). Reports surface it as NA.
class UndefinedMeasure : public Error {
 public:
  using Error::Error;
};

}  // namespace modelsum

// Copyright 2026 The AFS-Lab Authors.
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

namespace afs {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A call received data that violates its precondition (shape, range, NaN).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A configuration value is out of its admissible domain.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Malformed on-disk data. The message names the byte offset when known.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A metric was requested where it has no definition (e.g. forgetting with T < 2).
class UndefinedMetric : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace afs

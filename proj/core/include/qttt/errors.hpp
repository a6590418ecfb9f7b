// Copyright 2026 The QTTT Authors
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

namespace qttt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad index, length, range).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Amplitude encoding was asked to encode the zero vector.
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A gradient method was asked for a parameter segment it cannot handle.
class UnsupportedSegment : public Error {
 public:
  using Error::Error;
};

/// A persisted file does not match the expected layout.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A persisted file failed its checksum.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// An optimization produced a non-finite loss or gradient.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// An experiment configuration is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qttt

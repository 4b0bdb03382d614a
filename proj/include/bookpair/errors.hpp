// Copyright 2026 The bookpair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bookpair {

// Base of every error raised by the library. The CLI maps the concrete
// subclasses onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Missing field, wrong JSON type, unparsable line.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Region outside page bounds or a box with non-positive extent.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Filesystem failures (missing directory, unreadable or unwritable file).
class IoError : public Error {
 public:
  using Error::Error;
};

// Corpus-level validation failures raised in strict mode.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DuplicateBookError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingMetadataError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class BookMismatchError : public Error {
 public:
  using Error::Error;
};

class DuplicatePairIdError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class ZeroNormVectorError : public Error {
 public:
  using Error::Error;
};

class SampleTooLargeError : public Error {
 public:
  using Error::Error;
};

// Raised when query and gallery embedding sets do not cover the same ids.
class IdMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace bookpair

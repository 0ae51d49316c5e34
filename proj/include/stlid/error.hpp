// Copyright 2026 The stlid Authors
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

namespace stlid {

/// Broad error categories; the C API maps each to a status code.
enum class ErrorKind {
  kParse,         // malformed input file
  kConsistency,   // files disagree with each other
  kData,          // values violate a data invariant
  kConfig,        // invalid configuration
  kPrecondition,  // operation called outside its domain
  kDegenerate,    // estimator has no information to work with
  kIo,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& msg)
      : Error(ErrorKind::kParse,
              file + ":" + std::to_string(line) + ": " + msg),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& msg)
      : Error(ErrorKind::kConsistency, msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(ErrorKind::kData, msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg)
      : Error(ErrorKind::kConfig, msg) {}
};

class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& msg)
      : Error(ErrorKind::kPrecondition, msg) {}
};

/// Raised by the LID estimators; `reason` tells the two failure modes apart.
class DegenerateError : public Error {
 public:
  enum class Reason { kAllEqual, kInsufficient };
  DegenerateError(Reason reason, const std::string& msg)
      : Error(ErrorKind::kDegenerate, msg), reason_(reason) {}
  Reason reason() const noexcept { return reason_; }

 private:
  Reason reason_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& msg) : Error(ErrorKind::kIo, msg) {}
};

}  // namespace stlid

// Copyright (c) 2026 The liteg2p Authors
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

#ifndef LITEG2P_ERROR_H_
#define LITEG2P_ERROR_H_

#include <stdexcept>
#include <string>

namespace liteg2p {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input text that could not be parsed. `line` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class CheckpointErrorKind { kIo, kBadMagic, kUnsupportedVersion, kTruncated, kMalformed };

class CheckpointError : public Error {
 public:
  CheckpointError(CheckpointErrorKind kind, const std::string& what)
      : Error(what), kind_(kind) {}
  CheckpointErrorKind kind() const { return kind_; }

 private:
  CheckpointErrorKind kind_;
};

// Loss or gradient went non-finite during training.
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace liteg2p

#endif  // LITEG2P_ERROR_H_

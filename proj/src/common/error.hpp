// Copyright 2026 The dependsim Authors.
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

namespace dependsim {

enum class ErrorCode {
  SchedulingInPast,
  UnknownNode,
  NoLiveMember,
  UnknownReplica,
  InsufficientData,
  NoSignal,
  UnknownSubject,
  UnknownObject,
  IndexOutOfRange,
  ConfigError,
  MalformedTrace,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Scenario validation failure. `path` is the dotted field path, `line` the
/// 1-based source line (0 when unknown, e.g. for programmatic scenarios).
class ConfigError : public Error {
 public:
  ConfigError(std::string path, int line, const std::string& message)
      : Error(ErrorCode::ConfigError, format(path, line, message)),
        path_(std::move(path)),
        line_(line) {}

  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& path, int line,
                            const std::string& message) {
    std::string out = path.empty() ? std::string("<root>") : path;
    if (line > 0) out += " (line " + std::to_string(line) + ")";
    return out + ": " + message;
  }

  std::string path_;
  int line_;
};

}  // namespace dependsim

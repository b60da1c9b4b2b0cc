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

#include "common/error.hpp"
#include "common/types.hpp"

namespace dependsim {

const char* to_string(Liveness l) {
  switch (l) {
    case Liveness::Alive: return "alive";
    case Liveness::Suspected: return "suspected";
    case Liveness::Removed: return "removed";
  }
  return "?";
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchedulingInPast: return "SchedulingInPast";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NoLiveMember: return "NoLiveMember";
    case ErrorCode::UnknownReplica: return "UnknownReplica";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NoSignal: return "NoSignal";
    case ErrorCode::UnknownSubject: return "UnknownSubject";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::MalformedTrace: return "MalformedTrace";
    case ErrorCode::Io: return "Io";
  }
  return "?";
}

}  // namespace dependsim

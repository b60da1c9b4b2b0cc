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

#include <cstdint>
#include <optional>
#include <string>

#include "common/types.hpp"

namespace dependsim::repair {

struct NoticeId {
  NodeId origin;
  std::uint64_t sequence = 0;

  auto operator<=>(const NoticeId&) const = default;
};

/// Replica added to a container by a completed ActivateAlternative.
struct ReplicaChange {
  std::string container_id;
  NodeId host;
  std::string service_id;

  bool operator==(const ReplicaChange&) const = default;
};

struct ChangeNotice {
  NoticeId id;
  std::string summary;
  SimTime at = 0;
  std::optional<ReplicaChange> replica_change;

  bool operator==(const ChangeNotice&) const = default;
};

struct NoticeMessage {
  ChangeNotice notice;
  bool forward = false;  // receiver acts as its cluster's entry point
};

struct NoticeAck {
  NoticeId id;
};

}  // namespace dependsim::repair

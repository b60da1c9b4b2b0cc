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
#include <functional>
#include <string>

namespace dependsim {

/// Logical time in ticks. One tick is one abstract millisecond.
using SimTime = std::int64_t;

/// Dense node identifier. The total order follows scenario declaration order
/// and is what representative election uses.
struct NodeId {
  std::uint32_t value = 0;

  auto operator<=>(const NodeId&) const = default;
};

struct ClusterId {
  std::uint32_t value = 0;

  auto operator<=>(const ClusterId&) const = default;
};

enum class Liveness { Alive, Suspected, Removed };

const char* to_string(Liveness l);

}  // namespace dependsim

template <>
struct std::hash<dependsim::NodeId> {
  std::size_t operator()(const dependsim::NodeId& id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

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
#include <vector>

#include "common/types.hpp"

namespace dependsim::membership {

struct DigestEntry {
  NodeId node;
  std::uint32_t incarnation = 0;
  std::uint64_t counter = 0;

  bool operator==(const DigestEntry&) const = default;
};

/// Full heartbeat table pushed to a gossip peer.
struct GossipDigest {
  std::vector<DigestEntry> entries;
};

/// Liveness summary of one cluster as seen by its representative.
/// Removed members are reported under `suspected`.
struct ClusterSummary {
  ClusterId cluster;
  NodeId representative;
  std::uint64_t epoch = 0;
  SimTime emitted_at = 0;
  std::vector<NodeId> alive;
  std::vector<NodeId> suspected;

  bool operator==(const ClusterSummary&) const = default;
};

/// What travels between representatives: the sender's own summary plus the
/// summaries it knows for other clusters (subtree going up, global view
/// going down).
struct SummaryMessage {
  ClusterSummary own;
  std::vector<ClusterSummary> relayed;
};

}  // namespace dependsim::membership

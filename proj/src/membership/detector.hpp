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

#include <map>
#include <utility>
#include <vector>

#include "common/rng.hpp"
#include "membership/heartbeat.hpp"
#include "membership/topology.hpp"

namespace dependsim::membership {

/// Per-node failure detector: heartbeat gossip inside the node's cluster,
/// adaptive suspicion, and summary channelling along the representative tree.
class Detector {
 public:
  Detector(NodeId self, const ClusterTopology& topology, DetectorParams params,
           std::uint32_t incarnation, SimTime boot_time, Rng rng);

  NodeId self() const { return self_; }
  ClusterId cluster() const { return cluster_; }
  const DetectorParams& params() const { return params_; }
  const HeartbeatTable& table() const { return table_; }
  const SuspicionState& suspicion() const { return suspicion_; }

  /// Bumps the own counter and picks up to `fanout` distinct cluster peers
  /// (never self, never Removed) to receive the full digest.
  std::vector<std::pair<NodeId, GossipDigest>> local_tick(SimTime now);

  /// Returns the peers whose entry advanced.
  std::vector<NodeId> on_digest(const GossipDigest& digest, SimTime now);

  std::vector<SuspicionTransition> evaluate(SimTime now);

  /// Representative of the own cluster per the local view.
  NodeId own_representative() const;
  bool is_representative() const { return own_representative() == self_; }

  /// Best-known representative of any cluster: own cluster from the local
  /// view, other clusters from the freshest summary received.
  NodeId representative_of(ClusterId c) const;

  /// Liveness of any node: own cluster from the local view, other clusters
  /// from summaries (Alive when nothing is known).
  Liveness liveness(NodeId n) const;

  ClusterSummary own_summary(SimTime now) const;

  /// Empty unless this node is its cluster's representative. Otherwise one
  /// message to the parent cluster's representative (if any) and one to each
  /// child cluster's representative.
  std::vector<std::pair<NodeId, SummaryMessage>> summarize_and_channel(
      SimTime now);

  void on_summary(const SummaryMessage& msg);

  /// Freshest summary known per cluster. At the root representative this is
  /// the global liveness view.
  const std::map<ClusterId, ClusterSummary>& global_view() const {
    return known_;
  }

  std::uint64_t epoch() const { return epoch_; }

 private:
  void absorb(const ClusterSummary& s);
  std::vector<NodeId> pick_peers();

  NodeId self_;
  const ClusterTopology* topology_;
  ClusterId cluster_;
  DetectorParams params_;
  Rng rng_;
  HeartbeatTable table_;
  SuspicionState suspicion_;
  std::vector<NodeId> cycle_;  // ShuffledCycle remaining order
  std::uint64_t epoch_ = 0;
  std::map<ClusterId, ClusterSummary> known_;
};

}  // namespace dependsim::membership

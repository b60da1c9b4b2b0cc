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

#include <optional>
#include <string>
#include <vector>

#include "common/types.hpp"
#include "membership/heartbeat.hpp"

namespace dependsim::membership {

struct Cluster {
  std::string name;
  std::vector<NodeId> members;  // sorted
  std::optional<ClusterId> parent;
};

/// Static cluster assignment plus the representative tree over clusters.
class ClusterTopology {
 public:
  ClusterTopology() = default;

  /// Throws ConfigError when a node sits in two clusters, a cluster is empty,
  /// or the parent relation is not a single tree.
  ClusterTopology(std::vector<Cluster> clusters, std::size_t node_count);

  std::size_t size() const { return clusters_.size(); }
  const Cluster& cluster(ClusterId c) const { return clusters_.at(c.value); }
  ClusterId cluster_of(NodeId n) const { return node_cluster_.at(n.value); }
  const std::vector<NodeId>& members(ClusterId c) const {
    return cluster(c).members;
  }
  std::optional<ClusterId> parent(ClusterId c) const { return cluster(c).parent; }
  const std::vector<ClusterId>& children(ClusterId c) const {
    return children_.at(c.value);
  }
  ClusterId root() const { return root_; }
  std::size_t depth(ClusterId c) const { return depth_.at(c.value); }
  std::size_t tree_depth() const;

 private:
  std::vector<Cluster> clusters_;
  std::vector<ClusterId> node_cluster_;
  std::vector<std::vector<ClusterId>> children_;
  std::vector<std::size_t> depth_;
  ClusterId root_;
};

/// Smallest member the local view does not consider Suspected or Removed.
/// Throws Error(NoLiveMember).
NodeId elect_representative(ClusterId cluster, const ClusterTopology& topology,
                            const SuspicionState& local_view);

}  // namespace dependsim::membership

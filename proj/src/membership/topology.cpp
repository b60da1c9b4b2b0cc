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

#include "membership/topology.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace dependsim::membership {

ClusterTopology::ClusterTopology(std::vector<Cluster> clusters,
                                 std::size_t node_count)
    : clusters_(std::move(clusters)) {
  constexpr ClusterId kUnassigned{~0u};
  node_cluster_.assign(node_count, kUnassigned);
  children_.assign(clusters_.size(), {});
  depth_.assign(clusters_.size(), 0);
  std::optional<ClusterId> root;
  for (std::uint32_t i = 0; i < clusters_.size(); ++i) {
    auto& c = clusters_[i];
    if (c.members.empty())
      throw ConfigError("clusters." + c.name, 0, "cluster has no members");
    std::sort(c.members.begin(), c.members.end());
    for (auto n : c.members) {
      if (n.value >= node_count)
        throw ConfigError("clusters." + c.name, 0, "unknown member");
      if (node_cluster_[n.value] != kUnassigned)
        throw ConfigError("clusters." + c.name, 0,
                          "node index " + std::to_string(n.value) +
                              " is in more than one cluster");
      node_cluster_[n.value] = ClusterId{i};
    }
    if (c.parent) {
      if (c.parent->value >= clusters_.size())
        throw ConfigError("clusters." + c.name + ".parent", 0,
                          "unknown parent cluster");
      children_[c.parent->value].push_back(ClusterId{i});
    } else {
      if (root)
        throw ConfigError("clusters." + c.name + ".parent", 0,
                          "more than one root cluster");
      root = ClusterId{i};
    }
  }
  for (std::size_t n = 0; n < node_count; ++n)
    if (node_cluster_[n] == kUnassigned)
      throw ConfigError("clusters", 0,
                        "node index " + std::to_string(n) +
                            " is not in any cluster");
  if (!root && !clusters_.empty())
    throw ConfigError("clusters", 0, "parent relation has no root");
  if (!root) return;
  root_ = *root;
  // Walk down from the root; anything unreached sits on a cycle.
  std::vector<bool> seen(clusters_.size(), false);
  std::vector<ClusterId> stack{root_};
  seen[root_.value] = true;
  while (!stack.empty()) {
    auto c = stack.back();
    stack.pop_back();
    for (auto ch : children_[c.value]) {
      seen[ch.value] = true;
      depth_[ch.value] = depth_[c.value] + 1;
      stack.push_back(ch);
    }
  }
  for (std::size_t i = 0; i < clusters_.size(); ++i)
    if (!seen[i])
      throw ConfigError("clusters." + clusters_[i].name + ".parent", 0,
                        "parent relation is cyclic");
}

std::size_t ClusterTopology::tree_depth() const {
  std::size_t d = 0;
  for (auto x : depth_) d = std::max(d, x);
  return d;
}

NodeId elect_representative(ClusterId cluster, const ClusterTopology& topology,
                            const SuspicionState& local_view) {
  for (auto n : topology.members(cluster))
    if (liveness_of(local_view, n) == Liveness::Alive) return n;
  throw Error(ErrorCode::NoLiveMember,
              "no live member in cluster " + topology.cluster(cluster).name);
}

}  // namespace dependsim::membership

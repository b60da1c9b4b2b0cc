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

#include "membership/detector.hpp"

#include <algorithm>

namespace dependsim::membership {

Detector::Detector(NodeId self, const ClusterTopology& topology,
                   DetectorParams params, std::uint32_t incarnation,
                   SimTime boot_time, Rng rng)
    : self_(self),
      topology_(&topology),
      cluster_(topology.cluster_of(self)),
      params_(params),
      rng_(std::move(rng)) {
  table_.owner = self;
  // Static membership: every cluster peer starts monitored from boot.
  for (auto n : topology.members(cluster_)) {
    HeartbeatEntry e;
    e.node = n;
    e.last_bump = boot_time;
    if (n == self) e.incarnation = incarnation;
    table_.entries.emplace(n, std::move(e));
  }
}

std::vector<NodeId> Detector::pick_peers() {
  std::vector<NodeId> candidates;
  for (auto n : topology_->members(cluster_))
    if (n != self_ && liveness_of(suspicion_, n) != Liveness::Removed)
      candidates.push_back(n);
  const std::size_t want =
      std::min<std::size_t>(params_.fanout, candidates.size());
  std::vector<NodeId> picked;
  if (want == 0) return picked;
  if (params_.selection == PeerSelection::Uniform) {
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < want; ++i) {
      auto j = i + rng_.below(candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
      picked.push_back(candidates[i]);
    }
    return picked;
  }
  std::size_t guard = 0;
  while (picked.size() < want && guard++ < 4 * candidates.size() + 4) {
    if (cycle_.empty()) {
      cycle_ = candidates;
      rng_.shuffle(cycle_.begin(), cycle_.end());
    }
    auto n = cycle_.back();
    cycle_.pop_back();
    const bool eligible =
        std::find(candidates.begin(), candidates.end(), n) != candidates.end();
    if (eligible && std::find(picked.begin(), picked.end(), n) == picked.end())
      picked.push_back(n);
  }
  return picked;
}

std::vector<std::pair<NodeId, GossipDigest>> Detector::local_tick(SimTime now) {
  auto& own = table_.entries[self_];
  own.node = self_;
  own.counter += 1;
  own.last_bump = now;
  std::vector<std::pair<NodeId, GossipDigest>> out;
  auto peers = pick_peers();
  if (peers.empty()) return out;
  auto digest = table_.digest();
  for (auto p : peers) out.emplace_back(p, digest);
  return out;
}

std::vector<NodeId> Detector::on_digest(const GossipDigest& digest,
                                        SimTime now) {
  return merge_into(table_, digest, now, params_.window);
}

std::vector<SuspicionTransition> Detector::evaluate(SimTime now) {
  return membership::evaluate(table_, suspicion_, now, params_);
}

NodeId Detector::own_representative() const {
  return elect_representative(cluster_, *topology_, suspicion_);
}

NodeId Detector::representative_of(ClusterId c) const {
  if (c == cluster_) return own_representative();
  auto it = known_.find(c);
  if (it != known_.end()) return it->second.representative;
  return topology_->members(c).front();
}

Liveness Detector::liveness(NodeId n) const {
  auto c = topology_->cluster_of(n);
  if (c == cluster_) return n == self_ ? Liveness::Alive : liveness_of(suspicion_, n);
  auto it = known_.find(c);
  if (it == known_.end()) return Liveness::Alive;
  const auto& s = it->second.suspected;
  return std::binary_search(s.begin(), s.end(), n) ? Liveness::Suspected
                                                   : Liveness::Alive;
}

ClusterSummary Detector::own_summary(SimTime now) const {
  ClusterSummary s;
  s.cluster = cluster_;
  s.representative = self_;
  s.epoch = epoch_;
  s.emitted_at = now;
  for (auto n : topology_->members(cluster_)) {
    if (n == self_ || liveness_of(suspicion_, n) == Liveness::Alive)
      s.alive.push_back(n);
    else
      s.suspected.push_back(n);
  }
  return s;
}

void Detector::absorb(const ClusterSummary& s) {
  if (s.cluster == cluster_) return;  // own cluster comes from gossip
  auto it = known_.find(s.cluster);
  if (it == known_.end()) {
    known_.emplace(s.cluster, s);
    return;
  }
  const auto& cur = it->second;
  if (std::pair(s.emitted_at, s.epoch) > std::pair(cur.emitted_at, cur.epoch))
    it->second = s;
}

std::vector<std::pair<NodeId, SummaryMessage>> Detector::summarize_and_channel(
    SimTime now) {
  std::vector<std::pair<NodeId, SummaryMessage>> out;
  if (!is_representative()) return out;
  ++epoch_;
  auto own = own_summary(now);
  known_[cluster_] = own;
  std::vector<ClusterId> dests;
  if (auto p = topology_->parent(cluster_)) dests.push_back(*p);
  for (auto c : topology_->children(cluster_)) dests.push_back(c);
  for (auto c : dests) {
    SummaryMessage msg;
    msg.own = own;
    for (const auto& [cid, s] : known_)
      if (cid != cluster_ && cid != c) msg.relayed.push_back(s);
    out.emplace_back(representative_of(c), std::move(msg));
  }
  return out;
}

void Detector::on_summary(const SummaryMessage& msg) {
  absorb(msg.own);
  for (const auto& s : msg.relayed) absorb(s);
}

}  // namespace dependsim::membership

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
#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "common/types.hpp"
#include "membership/types.hpp"

namespace dependsim::membership {

enum class PeerSelection {
  Uniform,        // fresh uniform sample of F peers every round
  ShuffledCycle,  // walk a seeded random permutation, reshuffle when spent
};

struct DetectorParams {
  SimTime gossip_interval = 10;
  std::uint32_t fanout = 2;
  double k = 12.0;
  std::size_t window = 32;
  SimTime t_min = 30;
  SimTime t_max = 1000;
  SimTime t_bootstrap = 100;
  SimTime t_cleanup = 200;
  SimTime summary_interval = 20;
  PeerSelection selection = PeerSelection::ShuffledCycle;

  /// Defaults scaled to a gossip interval.
  static DetectorParams for_interval(SimTime gossip_interval);
};

struct HeartbeatEntry {
  NodeId node;
  std::uint32_t incarnation = 0;
  std::uint64_t counter = 0;
  SimTime last_bump = 0;
  std::deque<SimTime> intervals;  // most recent W inter-bump gaps, each >= 1
};

struct HeartbeatTable {
  NodeId owner;
  std::map<NodeId, HeartbeatEntry> entries;

  GossipDigest digest() const;
};

/// Componentwise (incarnation, counter) max. Returns the nodes whose entry
/// advanced. The owner's own entry is never overwritten by gossip.
std::vector<NodeId> merge_into(HeartbeatTable& table,
                               const GossipDigest& digest, SimTime now,
                               std::size_t window);

HeartbeatTable merge(HeartbeatTable table, const GossipDigest& digest,
                     SimTime now, std::size_t window = 32);

/// ceil(mean + k * stddev) of the observed gaps, clamped to [t_min, t_max];
/// t_bootstrap while no gap has been observed. Population stddev.
SimTime adapt_timeout(const HeartbeatEntry& entry, const DetectorParams& params);

struct SuspicionRecord {
  Liveness state = Liveness::Alive;
  SimTime since = 0;
  // (incarnation, counter) observed when the record last changed state.
  std::uint32_t incarnation = 0;
  std::uint64_t counter = 0;
};

using SuspicionState = std::map<NodeId, SuspicionRecord>;

Liveness liveness_of(const SuspicionState& view, NodeId node);

enum class TransitionKind { Suspect, Refute, Remove, Rejoin };

const char* to_string(TransitionKind kind);

struct SuspicionTransition {
  NodeId node;
  TransitionKind kind;
  Liveness from;
  Liveness to;
  SimTime at = 0;
  SimTime timeout = 0;  // T_fail in force when suspected
  SimTime silence = 0;  // now - last_bump
  std::uint32_t incarnation = 0;
  std::uint64_t counter = 0;
};

/// One evaluation pass over every peer entry of `table`.
std::vector<SuspicionTransition> evaluate(const HeartbeatTable& table,
                                          SuspicionState& state, SimTime now,
                                          const DetectorParams& params);

}  // namespace dependsim::membership

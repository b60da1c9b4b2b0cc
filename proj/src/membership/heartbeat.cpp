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

#include "membership/heartbeat.hpp"

#include <algorithm>
#include <cmath>

namespace dependsim::membership {

DetectorParams DetectorParams::for_interval(SimTime gossip_interval) {
  DetectorParams p;
  p.gossip_interval = gossip_interval;
  p.t_bootstrap = 10 * gossip_interval;
  p.t_min = 3 * gossip_interval;
  p.t_max = 100 * gossip_interval;
  p.t_cleanup = 20 * gossip_interval;
  p.summary_interval = 2 * gossip_interval;
  return p;
}

GossipDigest HeartbeatTable::digest() const {
  GossipDigest d;
  d.entries.reserve(entries.size());
  for (const auto& [id, e] : entries)
    d.entries.push_back(DigestEntry{id, e.incarnation, e.counter});
  return d;
}

std::vector<NodeId> merge_into(HeartbeatTable& table,
                               const GossipDigest& digest, SimTime now,
                               std::size_t window) {
  std::vector<NodeId> advanced;
  for (const auto& in : digest.entries) {
    if (in.node == table.owner) continue;
    auto it = table.entries.find(in.node);
    if (it == table.entries.end()) {
      HeartbeatEntry e;
      e.node = in.node;
      e.incarnation = in.incarnation;
      e.counter = in.counter;
      e.last_bump = now;
      table.entries.emplace(in.node, std::move(e));
      advanced.push_back(in.node);
      continue;
    }
    auto& e = it->second;
    if (in.incarnation > e.incarnation) {
      // Rejoin: counters restart, so the old gap history no longer applies.
      e.incarnation = in.incarnation;
      e.counter = in.counter;
      e.last_bump = now;
      e.intervals.clear();
      advanced.push_back(in.node);
    } else if (in.incarnation == e.incarnation && in.counter > e.counter) {
      const SimTime gap = now - e.last_bump;
      if (gap >= 1) {
        e.intervals.push_back(gap);
        while (e.intervals.size() > window) e.intervals.pop_front();
      }
      e.counter = in.counter;
      e.last_bump = now;
      advanced.push_back(in.node);
    }
  }
  return advanced;
}

HeartbeatTable merge(HeartbeatTable table, const GossipDigest& digest,
                     SimTime now, std::size_t window) {
  merge_into(table, digest, now, window);
  return table;
}

SimTime adapt_timeout(const HeartbeatEntry& entry,
                      const DetectorParams& params) {
  if (entry.intervals.empty()) return params.t_bootstrap;
  const double n = static_cast<double>(entry.intervals.size());
  double mean = 0.0;
  for (auto g : entry.intervals) mean += static_cast<double>(g);
  mean /= n;
  double var = 0.0;
  for (auto g : entry.intervals) {
    const double d = static_cast<double>(g) - mean;
    var += d * d;
  }
  var /= n;
  const double raw = mean + params.k * std::sqrt(var);
  // Tolerance keeps exact integers (e.g. 10.000000000000002) from rounding up.
  auto t = static_cast<SimTime>(std::ceil(raw - 1e-9));
  return std::clamp(t, params.t_min, params.t_max);
}

Liveness liveness_of(const SuspicionState& view, NodeId node) {
  auto it = view.find(node);
  return it == view.end() ? Liveness::Alive : it->second.state;
}

const char* to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::Suspect: return "suspect";
    case TransitionKind::Refute: return "refute";
    case TransitionKind::Remove: return "remove";
    case TransitionKind::Rejoin: return "rejoin";
  }
  return "?";
}

std::vector<SuspicionTransition> evaluate(const HeartbeatTable& table,
                                          SuspicionState& state, SimTime now,
                                          const DetectorParams& params) {
  std::vector<SuspicionTransition> out;
  for (const auto& [id, e] : table.entries) {
    if (id == table.owner) continue;
    auto& rec = state[id];
    const SimTime silence = now - e.last_bump;
    auto emit = [&](TransitionKind kind, Liveness to, SimTime timeout) {
      SuspicionTransition t;
      t.node = id;
      t.kind = kind;
      t.from = rec.state;
      t.to = to;
      t.at = now;
      t.timeout = timeout;
      t.silence = silence;
      t.incarnation = e.incarnation;
      t.counter = e.counter;
      out.push_back(t);
      rec.state = to;
      rec.since = now;
      rec.incarnation = e.incarnation;
      rec.counter = e.counter;
    };
    switch (rec.state) {
      case Liveness::Removed:
        if (e.incarnation > rec.incarnation)
          emit(TransitionKind::Rejoin, Liveness::Alive, 0);
        break;
      case Liveness::Suspected:
        if (std::pair(e.incarnation, e.counter) >
            std::pair(rec.incarnation, rec.counter)) {
          emit(TransitionKind::Refute, Liveness::Alive, 0);
        } else if (now - rec.since > params.t_cleanup) {
          emit(TransitionKind::Remove, Liveness::Removed, 0);
        }
        break;
      case Liveness::Alive:
        break;
    }
    if (rec.state == Liveness::Alive) {
      const SimTime timeout = adapt_timeout(e, params);
      if (silence > timeout) emit(TransitionKind::Suspect, Liveness::Suspected, timeout);
    }
  }
  return out;
}

}  // namespace dependsim::membership

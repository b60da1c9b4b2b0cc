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

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "common/trace.hpp"
#include "repair/notice.hpp"

namespace dependsim::repair {

struct PropagationParams {
  SimTime retry_interval = 2;
  std::uint32_t retry_max = 20;
};

/// The sender's view of the representative tree at forwarding time.
struct RoutingView {
  NodeId self;
  bool is_representative = false;
  NodeId own_representative;
  std::vector<NodeId> cluster_members;  // excludes self and Removed peers
  std::vector<NodeId> tree_neighbours;  // parent + child cluster representatives
  std::function<bool(NodeId, NodeId)> same_cluster;
};

struct RelaySend {
  NodeId to;
  NoticeMessage message;
};
struct RelayAck {
  NodeId to;
  NoticeAck ack;
};
struct RelayTimer {
  SimTime at = 0;
  NoticeId id;
  NodeId target;
  std::uint32_t attempt = 0;
};

struct RelayStep {
  std::vector<RelaySend> sends;
  std::vector<RelayAck> acks;
  std::vector<RelayTimer> timers;
  std::optional<ChangeNotice> applied;
  TraceNotes notes;
};

/// Per-node change propagation: acknowledged retransmission along the
/// representative tree, exactly-once application by notice id.
class NoticeRelay {
 public:
  NoticeRelay(NodeId self, PropagationParams params)
      : self_(self), params_(params) {}

  /// Creates a notice with the next origin sequence number.
  ChangeNotice originate(std::string summary, SimTime now);

  /// Applies locally and forwards a notice this node created.
  RelayStep start(const ChangeNotice& notice, const RoutingView& view,
                  SimTime now);

  /// Always acknowledges; applies and forwards only the first copy.
  RelayStep on_notice(NodeId from, const NoticeMessage& msg,
                      const RoutingView& view, SimTime now);

  void on_ack(NodeId from, const NoticeAck& ack);

  /// Retransmits if still unacknowledged; gives up after retry_max.
  /// `fallback` is consulted when a representative hop is exhausted.
  RelayStep on_retry(const NoticeId& id, NodeId target, std::uint32_t attempt,
                     SimTime now, const std::optional<NodeId>& fallback);

  bool applied(const NoticeId& id) const { return applied_.count(id) > 0; }
  std::size_t applied_count() const { return applied_.size(); }
  std::size_t pending() const { return pending_.size(); }

 private:
  struct Pending {
    ChangeNotice notice;
    std::uint32_t attempts = 0;
  };

  void forward(const ChangeNotice& notice, std::optional<NodeId> from,
               bool entry, const RoutingView& view, SimTime now, RelayStep& step);
  void transmit(const ChangeNotice& notice, NodeId to, SimTime now,
                RelayStep& step);

  NodeId self_;
  PropagationParams params_;
  std::uint64_t next_sequence_ = 1;
  std::set<NoticeId> applied_;
  std::map<std::pair<NoticeId, NodeId>, Pending> pending_;
  std::set<std::pair<NoticeId, NodeId>> rep_hops_;
};

Json to_json(const NoticeId& id, const std::function<std::string(NodeId)>& name);

}  // namespace dependsim::repair

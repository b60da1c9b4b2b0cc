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

#include "repair/propagation.hpp"

#include <algorithm>

namespace dependsim::repair {

ChangeNotice NoticeRelay::originate(std::string summary, SimTime now) {
  ChangeNotice n;
  n.id = NoticeId{self_, next_sequence_++};
  n.summary = std::move(summary);
  n.at = now;
  return n;
}

void NoticeRelay::transmit(const ChangeNotice& notice, NodeId to, SimTime now,
                           RelayStep& step) {
  auto& p = pending_[{notice.id, to}];
  p.notice = notice;
  p.attempts = 1;
  step.sends.push_back(
      RelaySend{to, NoticeMessage{notice, rep_hops_.count({notice.id, to}) > 0}});
  step.timers.push_back(
      RelayTimer{now + params_.retry_interval, notice.id, to, 1});
  Json d = Json::object();
  d["origin_index"] = notice.id.origin.value;
  d["origin_seq"] = notice.id.sequence;
  d["to_index"] = to.value;
  d["attempt"] = 1;
  step.notes.push_back({"notice_sent", std::move(d)});
}

void NoticeRelay::forward(const ChangeNotice& notice, std::optional<NodeId> from,
                          bool entry, const RoutingView& view, SimTime now,
                          RelayStep& step) {
  std::vector<NodeId> targets;
  auto add = [&](NodeId n) {
    if (n == self_ || (from && n == *from)) return;
    if (std::find(targets.begin(), targets.end(), n) == targets.end())
      targets.push_back(n);
  };
  const bool from_outside = from && !view.same_cluster(*from, self_);
  if (view.is_representative || from_outside || entry) {
    // Entry point of this cluster: tree neighbours, then the members.
    for (auto n : view.tree_neighbours) {
      if (from && view.same_cluster(n, *from)) continue;
      add(n);
      rep_hops_.insert({notice.id, n});
    }
    for (auto n : view.cluster_members) add(n);
  } else if (!from) {
    add(view.own_representative);  // origin: hand to the representative
    rep_hops_.insert({notice.id, view.own_representative});
  }
  for (auto n : targets) transmit(notice, n, now, step);
}

RelayStep NoticeRelay::start(const ChangeNotice& notice, const RoutingView& view,
                             SimTime now) {
  RelayStep step;
  applied_.insert(notice.id);
  step.applied = notice;
  forward(notice, std::nullopt, false, view, now, step);
  return step;
}

RelayStep NoticeRelay::on_notice(NodeId from, const NoticeMessage& msg,
                                 const RoutingView& view, SimTime now) {
  RelayStep step;
  step.acks.push_back(RelayAck{from, NoticeAck{msg.notice.id}});
  if (applied_.count(msg.notice.id)) {
    Json d = Json::object();
    d["origin_index"] = msg.notice.id.origin.value;
    d["origin_seq"] = msg.notice.id.sequence;
    d["from_index"] = from.value;
    step.notes.push_back({"notice_dup", std::move(d)});
    return step;
  }
  applied_.insert(msg.notice.id);
  step.applied = msg.notice;
  forward(msg.notice, from, msg.forward, view, now, step);
  return step;
}

void NoticeRelay::on_ack(NodeId from, const NoticeAck& ack) {
  pending_.erase({ack.id, from});
}

RelayStep NoticeRelay::on_retry(const NoticeId& id, NodeId target,
                                std::uint32_t attempt, SimTime now,
                                const std::optional<NodeId>& fallback) {
  RelayStep step;
  auto it = pending_.find({id, target});
  if (it == pending_.end() || it->second.attempts != attempt) return step;
  auto& p = it->second;
  if (p.attempts >= params_.retry_max) {
    const ChangeNotice notice = p.notice;
    pending_.erase(it);
    Json d = Json::object();
    d["origin_index"] = id.origin.value;
    d["origin_seq"] = id.sequence;
    d["to_index"] = target.value;
    d["attempts"] = attempt;
    step.notes.push_back({"propagation_incomplete", std::move(d)});
    // A dead representative would cut off a whole cluster; try the next one.
    if (rep_hops_.count({id, target}) && fallback && *fallback != target &&
        *fallback != self_ && !pending_.count({id, *fallback})) {
      rep_hops_.insert({id, *fallback});
      transmit(notice, *fallback, now, step);
    }
    return step;
  }
  ++p.attempts;
  step.sends.push_back(RelaySend{
      target, NoticeMessage{p.notice, rep_hops_.count({id, target}) > 0}});
  step.timers.push_back(
      RelayTimer{now + params_.retry_interval, id, target, p.attempts});
  Json d = Json::object();
  d["origin_index"] = id.origin.value;
  d["origin_seq"] = id.sequence;
  d["to_index"] = target.value;
  d["attempt"] = p.attempts;
  step.notes.push_back({"notice_sent", std::move(d)});
  return step;
}

Json to_json(const NoticeId& id,
             const std::function<std::string(NodeId)>& name) {
  return name(id.origin) + "#" + std::to_string(id.sequence);
}

}  // namespace dependsim::repair

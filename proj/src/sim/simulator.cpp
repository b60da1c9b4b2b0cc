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

#include "sim/simulator.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace dependsim::sim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool contains(const std::vector<NodeId>& v, NodeId id) {
  return std::find(v.begin(), v.end(), id) != v.end();
}

}  // namespace

const char* message_type(const Message& msg) {
  return std::visit(
      Overloaded{
          [](const membership::GossipDigest&) { return "gossip"; },
          [](const membership::SummaryMessage&) { return "summary"; },
          [](const container::InvokeRequest&) { return "invoke_request"; },
          [](const container::InvokeResponse&) { return "invoke_response"; },
          [](const repair::NoticeMessage&) { return "notice"; },
          [](const repair::NoticeAck&) { return "notice_ack"; },
      },
      msg);
}

bool Partition::separates(NodeId x, NodeId y) const {
  return (contains(side_a, x) && contains(side_b, y)) ||
         (contains(side_b, x) && contains(side_a, y));
}

Simulator::Simulator(std::vector<std::string> node_names, NetworkModel network,
                     std::uint64_t seed, TraceLevel level)
    : names_(std::move(node_names)),
      network_(std::move(network)),
      seed_(seed),
      level_(level) {
  if (network_.base_latency < 1)
    throw Error(ErrorCode::ConfigError, "base_latency must be >= 1");
  if (!(network_.loss_probability >= 0.0 && network_.loss_probability <= 1.0))
    throw Error(ErrorCode::ConfigError, "loss_probability must be in [0,1]");
  nodes_.reserve(names_.size());
  for (const auto& n : names_) {
    NodeState s;
    s.net = Rng(stream_seed(seed_, n, "net"));
    nodes_.push_back(std::move(s));
  }
  for (auto& p : network_.partitions) inject_fault(PartitionFault{p});
  network_.partitions.clear();
}

std::optional<NodeId> Simulator::find(const std::string& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) return std::nullopt;
  return NodeId{static_cast<std::uint32_t>(it - names_.begin())};
}

void Simulator::check_node(NodeId id) const {
  if (id.value >= names_.size())
    throw Error(ErrorCode::UnknownNode,
                "unknown node index " + std::to_string(id.value));
}

Rng Simulator::make_stream(NodeId node, std::string_view purpose) const {
  return Rng(stream_seed(seed_, name(node), purpose));
}

EventId Simulator::schedule(SimTime fire_at, NodeId target, Payload payload) {
  if (fire_at < now_)
    throw Error(ErrorCode::SchedulingInPast,
                "event at t=" + std::to_string(fire_at) + " scheduled at t=" +
                    std::to_string(now_));
  check_node(target);
  EventId id = next_seq_++;
  queue_.push_back(Event{fire_at, id, target, std::move(payload)});
  std::push_heap(queue_.begin(), queue_.end(), Later{});
  return id;
}

EventId Simulator::schedule_timer(NodeId node, SimTime fire_at, Timer timer) {
  return schedule(fire_at, node,
                  TimerFire{incarnation(node), std::move(timer)});
}

void Simulator::record(std::string kind, NodeId node, Json detail) {
  record(std::move(kind), name(node), std::move(detail));
}

void Simulator::record(std::string kind, std::string node, Json detail) {
  trace_.push_back(TraceEntry{now_, current_seq_, std::move(kind),
                              std::move(node), std::move(detail)});
}

void Simulator::send(NodeId from, NodeId to, Message msg) {
  check_node(from);
  check_node(to);
  if (!is_up(from)) return;  // a crashed node has no effects
  const bool full = level_ == TraceLevel::Full;
  const std::uint64_t msg_id = next_msg_id_++;
  const char* type = message_type(msg);
  if (full) {
    Json d = Json::object();
    d["msg"] = msg_id;
    d["to"] = name(to);
    d["type"] = type;
    record("send", from, std::move(d));
  }
  auto& rng = nodes_[from.value].net;
  const double draw = rng.unit();
  if (draw < network_.loss_probability) {
    if (full) {
      Json d = Json::object();
      d["msg"] = msg_id;
      d["to"] = name(to);
      d["reason"] = "loss";
      record("drop", from, std::move(d));
    }
    return;
  }
  SimTime latency = network_.base_latency;
  if (network_.jitter > 0)
    latency += static_cast<SimTime>(
        rng.below(static_cast<std::uint64_t>(network_.jitter) + 1));
  schedule(now_ + latency, to, Delivery{from, msg_id, std::move(msg)});
}

void Simulator::inject_fault(const FaultInjection& fault) {
  std::visit(Overloaded{
                 [&](const Crash& c) {
                   check_node(c.node);
                   schedule(c.at, c.node, FaultEvent{fault});
                 },
                 [&](const Recover& r) {
                   check_node(r.node);
                   schedule(r.at, r.node, FaultEvent{fault});
                 },
                 [&](const PartitionFault& p) {
                   for (auto n : p.partition.side_a) check_node(n);
                   for (auto n : p.partition.side_b) check_node(n);
                   schedule(p.partition.start, NodeId{0}, FaultEvent{fault});
                 },
                 [&](const SetLoss& s) {
                   if (!(s.probability >= 0.0 && s.probability <= 1.0))
                     throw Error(ErrorCode::ConfigError,
                                 "loss probability must be in [0,1]");
                   schedule(s.at, NodeId{0}, FaultEvent{fault});
                 },
             },
             fault);
}

bool Simulator::partitioned(NodeId x, NodeId y) const {
  for (std::size_t i = 0; i < partitions_.size(); ++i)
    if (partition_active_[i] && partitions_[i].separates(x, y)) return true;
  return false;
}

Trace Simulator::run_until(SimTime t) {
  const std::size_t first = trace_.size();
  while (!queue_.empty() && queue_.front().fire_at <= t) {
    std::pop_heap(queue_.begin(), queue_.end(), Later{});
    Event ev = std::move(queue_.back());
    queue_.pop_back();
    now_ = ev.fire_at;
    current_seq_ = ev.seq;
    dispatch(ev);
  }
  if (t > now_) now_ = t;
  return Trace(trace_.begin() + static_cast<std::ptrdiff_t>(first),
               trace_.end());
}

void Simulator::dispatch(Event& ev) {
  const NodeId target = ev.target;
  std::visit(
      Overloaded{
          [&](Delivery& d) {
            const bool full = level_ == TraceLevel::Full;
            if (partitioned(d.from, target)) {
              if (full) {
                Json j = Json::object();
                j["msg"] = d.msg_id;
                j["from"] = name(d.from);
                record("partition_drop", target, std::move(j));
              }
              return;
            }
            if (!is_up(target)) {
              if (full) {
                Json j = Json::object();
                j["msg"] = d.msg_id;
                j["from"] = name(d.from);
                j["reason"] = "target_down";
                record("drop", target, std::move(j));
              }
              return;
            }
            if (full) {
              Json j = Json::object();
              j["msg"] = d.msg_id;
              j["from"] = name(d.from);
              j["type"] = message_type(d.msg);
              record("deliver", target, std::move(j));
            }
            if (handler_) handler_->on_message(target, d.from, d.msg);
          },
          [&](TimerFire& f) {
            // Timers armed before a crash belong to a dead incarnation.
            if (!is_up(target) || f.incarnation != incarnation(target)) return;
            if (handler_) handler_->on_timer(target, f.timer);
          },
          [&](FaultEvent& f) { apply_fault(target, f.fault); },
          [&](DirectiveEvent& d) {
            if (handler_) handler_->on_directive(target, d.directive);
          },
          [&](PartitionHeal& h) {
            partition_active_[h.index] = false;
            Json j = Json::object();
            j["partition"] = h.index;
            record("heal", "", std::move(j));
          },
      },
      ev.payload);
}

void Simulator::apply_fault(NodeId target, const FaultInjection& fault) {
  std::visit(
      Overloaded{
          [&](const Crash& c) {
            if (!is_up(c.node)) return;
            nodes_[c.node.value].status = NodeStatus::Crashed;
            record("crash", c.node, Json::object());
            if (handler_) handler_->on_crash(c.node);
          },
          [&](const Recover& r) {
            if (is_up(r.node)) return;
            auto& s = nodes_[r.node.value];
            s.status = NodeStatus::Up;
            ++s.incarnation;
            Json j = Json::object();
            j["incarnation"] = s.incarnation;
            record("recover", r.node, std::move(j));
            if (handler_) handler_->on_recover(r.node);
          },
          [&](const PartitionFault& p) {
            const std::size_t index = partitions_.size();
            partitions_.push_back(p.partition);
            partition_active_.push_back(true);
            Json j = Json::object();
            j["partition"] = index;
            Json a = Json::array(), b = Json::array();
            for (auto n : p.partition.side_a) a.push_back(name(n));
            for (auto n : p.partition.side_b) b.push_back(name(n));
            j["a"] = std::move(a);
            j["b"] = std::move(b);
            j["until"] = p.partition.end;
            record("partition", "", std::move(j));
            schedule(std::max(p.partition.end, now_), NodeId{0},
                     PartitionHeal{index});
          },
          [&](const SetLoss& s) {
            network_.loss_probability = s.probability;
            Json j = Json::object();
            j["loss_probability"] = s.probability;
            record("set_loss", "", std::move(j));
          },
      },
      fault);
  (void)target;
}

}  // namespace dependsim::sim

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
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "common/rng.hpp"
#include "common/trace.hpp"
#include "common/types.hpp"
#include "sim/messages.hpp"

namespace dependsim::sim {

using EventId = std::uint64_t;

struct Partition {
  std::vector<NodeId> side_a;
  std::vector<NodeId> side_b;
  SimTime start = 0;
  SimTime end = 0;  // exclusive

  bool separates(NodeId x, NodeId y) const;
};

struct NetworkModel {
  SimTime base_latency = 1;
  SimTime jitter = 0;
  double loss_probability = 0.0;
  std::vector<Partition> partitions;
};

struct Crash {
  NodeId node;
  SimTime at = 0;
};
struct Recover {
  NodeId node;
  SimTime at = 0;
};
struct PartitionFault {
  Partition partition;
};
struct SetLoss {
  double probability = 0.0;
  SimTime at = 0;
};

using FaultInjection = std::variant<Crash, Recover, PartitionFault, SetLoss>;

/// Node-local timer. Fields are interpreted by the handler that armed it.
struct Timer {
  std::uint32_t kind = 0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::string key;
};

/// Scenario-scripted action for one node; `index` refers into a list owned by
/// the handler.
struct Directive {
  std::uint32_t kind = 0;
  std::uint64_t index = 0;
};

struct Delivery {
  NodeId from;
  std::uint64_t msg_id = 0;
  Message msg;
};
struct TimerFire {
  std::uint32_t incarnation = 0;
  Timer timer;
};
struct FaultEvent {
  FaultInjection fault;
};
struct DirectiveEvent {
  Directive directive;
};
struct PartitionHeal {
  std::size_t index = 0;
};

using Payload =
    std::variant<Delivery, TimerFire, FaultEvent, DirectiveEvent, PartitionHeal>;

struct Event {
  SimTime fire_at = 0;
  std::uint64_t seq = 0;
  NodeId target;
  Payload payload;
};

/// Callbacks into the node runtimes. Only invoked for nodes that are Up,
/// except on_directive, which also sees crashed targets.
class EventHandler {
 public:
  virtual ~EventHandler() = default;
  virtual void on_message(NodeId to, NodeId from, const Message& msg) = 0;
  virtual void on_timer(NodeId node, const Timer& timer) = 0;
  virtual void on_directive(NodeId node, const Directive& directive) = 0;
  virtual void on_crash(NodeId node) = 0;
  virtual void on_recover(NodeId node) = 0;
};

enum class TraceLevel {
  Full,      // includes send / deliver / drop entries
  Protocol,  // omits message-level entries
};

enum class NodeStatus { Up, Crashed };

/// Deterministic discrete-event simulator: one logical clock, events ordered
/// by (fire_at, seq), seeded per-(node, purpose) random streams.
class Simulator {
 public:
  Simulator(std::vector<std::string> node_names, NetworkModel network,
            std::uint64_t seed, TraceLevel level = TraceLevel::Full);

  void set_handler(EventHandler* handler) { handler_ = handler; }

  SimTime now() const { return now_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t node_count() const { return names_.size(); }
  const std::string& name(NodeId id) const { return names_.at(id.value); }
  std::optional<NodeId> find(const std::string& name) const;
  NodeStatus status(NodeId id) const { return nodes_.at(id.value).status; }
  bool is_up(NodeId id) const { return status(id) == NodeStatus::Up; }
  /// Boot count, starting at 1; bumped by every recovery.
  std::uint32_t incarnation(NodeId id) const {
    return nodes_.at(id.value).incarnation;
  }
  const NetworkModel& network() const { return network_; }

  /// Throws Error(SchedulingInPast) if fire_at < now, Error(UnknownNode) for
  /// a target outside the scenario.
  EventId schedule(SimTime fire_at, NodeId target, Payload payload);

  EventId schedule_timer(NodeId node, SimTime fire_at, Timer timer);

  /// Loss and latency are drawn from the sender's "net" stream. A drop is
  /// traced, never reported as an error.
  void send(NodeId from, NodeId to, Message msg);

  /// Throws Error(UnknownNode).
  void inject_fault(const FaultInjection& fault);

  /// Processes every event with fire_at <= t and returns the trace entries
  /// produced by this call.
  Trace run_until(SimTime t);

  std::size_t pending_events() const { return queue_.size(); }

  /// Appends an entry stamped with the current time and event seq.
  void record(std::string kind, NodeId node, Json detail);
  void record(std::string kind, std::string node, Json detail);
  const Trace& trace() const { return trace_; }
  TraceLevel trace_level() const { return level_; }

  Rng make_stream(NodeId node, std::string_view purpose) const;

 private:
  struct NodeState {
    NodeStatus status = NodeStatus::Up;
    std::uint32_t incarnation = 1;
    Rng net;
  };

  struct Later {
    bool operator()(const Event& x, const Event& y) const {
      if (x.fire_at != y.fire_at) return x.fire_at > y.fire_at;
      return x.seq > y.seq;
    }
  };

  void check_node(NodeId id) const;
  void dispatch(Event& ev);
  void apply_fault(NodeId target, const FaultInjection& fault);
  bool partitioned(NodeId x, NodeId y) const;

  std::vector<std::string> names_;
  std::vector<NodeState> nodes_;
  NetworkModel network_;
  std::uint64_t seed_;
  TraceLevel level_;
  EventHandler* handler_ = nullptr;

  SimTime now_ = 0;
  std::uint64_t next_seq_ = 1;
  std::uint64_t current_seq_ = 0;
  std::uint64_t next_msg_id_ = 1;
  std::vector<Event> queue_;  // binary heap ordered by Later
  std::vector<Partition> partitions_;
  std::vector<bool> partition_active_;
  Trace trace_;
};

}  // namespace dependsim::sim

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
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "analysis/record.hpp"
#include "common/trace.hpp"
#include "common/types.hpp"
#include "container/types.hpp"

namespace dependsim::container {

enum class Strategy { Failover, ActiveReplication };

const char* to_string(Strategy s);

struct ServiceSpec {
  std::string service_id;
  std::string equivalence_class;
  std::map<std::string, std::string> table;  // request -> response
};

enum class ReplicaBehavior { Healthy, Corrupt, Slow };

struct ReplicaSpec {
  NodeId host;
  ServiceSpec service;
  ReplicaBehavior behavior = ReplicaBehavior::Healthy;
  std::string wrong_value = "corrupt";  // Corrupt answers this
  SimTime slow_delay = 0;               // Slow answers after this much extra
};

struct ContainerConfig {
  std::string id;
  NodeId home;
  Strategy strategy = Strategy::Failover;
  SimTime timeout = 10;
  std::vector<ReplicaSpec> replicas;
  std::vector<ReplicaSpec> alternatives;
};

/// Host-side evaluation of a request. Slow replicas answer after
/// `slow_delay` (returned as the second member).
std::pair<InvokeResponse, SimTime> serve(const ReplicaSpec& replica,
                                         const InvokeRequest& request);

struct Success {
  std::string response;
  std::vector<NodeId> responders;
};
struct NoQuorum {
  std::vector<std::string> responses_seen;
};
struct AllFailed {
  std::vector<std::pair<NodeId, std::string>> errors;
};

using InvocationOutcome = std::variant<Success, NoQuorum, AllFailed>;

const char* outcome_name(const InvocationOutcome& o);

struct OutboundInvoke {
  NodeId host;
  InvokeRequest request;
};

/// Effects of one container step; the runtime performs the sends, arms the
/// timer, traces the notes and routes the records.
struct ContainerStep {
  std::vector<OutboundInvoke> sends;
  std::optional<std::pair<SimTime, std::uint64_t>> timer;  // (at, request id)
  std::uint32_t timer_attempt = 0;
  TraceNotes notes;
  std::vector<analysis::MonitoringRecord> records;
  std::optional<std::pair<std::uint64_t, InvocationOutcome>> completed;
  SimTime started = 0;  // invocation start, set with `completed`
};

using LivenessFn = std::function<Liveness(NodeId)>;

/// Caller-side replica container (one per container, on its home node).
class ReplicaContainer {
 public:
  explicit ReplicaContainer(ContainerConfig config);

  const ContainerConfig& config() const { return config_; }
  const std::string& id() const { return config_.id; }
  std::size_t replica_count() const { return slots_.size(); }
  const ReplicaSpec& replica(std::size_t slot) const { return slots_.at(slot).spec; }
  bool degraded(std::size_t slot) const { return slots_.at(slot).degraded; }

  /// Slots tried (Failover) or contacted (ActiveReplication) for the next
  /// invocation, in order.
  std::vector<std::size_t> eligible(const LivenessFn& liveness) const;

  double availability(const LivenessFn& liveness) const;

  ContainerStep invoke(const std::string& request, SimTime now,
                       const LivenessFn& liveness);
  ContainerStep on_response(const InvokeResponse& response, NodeId from,
                            SimTime now, const LivenessFn& liveness);
  ContainerStep on_timeout(std::uint64_t request_id, std::uint32_t attempt,
                           SimTime now, const LivenessFn& liveness);

  /// Excludes every slot hosted on `host` until membership reports the host
  /// Alive again. Throws Error(UnknownReplica).
  ContainerStep mark_degraded(NodeId host, SimTime now,
                              const LivenessFn& liveness);

  /// Reinstates degraded slots on `host` when it is reported Alive; emits an
  /// availability record if anything changed.
  ContainerStep on_liveness(NodeId host, Liveness state, SimTime now,
                            const LivenessFn& liveness);

  /// Adds an alternative. Under ActiveReplication it replaces the first
  /// unavailable slot so the replica count stays odd; otherwise appends.
  void add_replica(const ReplicaSpec& spec, const LivenessFn& liveness);

  std::size_t outstanding() const { return pending_.size(); }

 private:
  struct Slot {
    ReplicaSpec spec;
    bool degraded = false;
  };
  struct Pending {
    std::string request;
    SimTime started = 0;
    std::vector<std::size_t> plan;  // slots in order
    std::size_t cursor = 0;         // failover position
    std::uint32_t attempt = 0;
    std::map<std::size_t, std::optional<std::string>> answers;
  };

  bool usable(std::size_t slot, const LivenessFn& liveness) const;
  ContainerStep finish(std::uint64_t id, InvocationOutcome outcome, SimTime now);
  ContainerStep failover_next(std::uint64_t id, SimTime now,
                              const LivenessFn& liveness);
  ContainerStep decide_active(std::uint64_t id, SimTime now, bool final);
  analysis::MonitoringRecord availability_record(SimTime now,
                                                 const LivenessFn& liveness) const;

  ContainerConfig config_;
  std::vector<Slot> slots_;
  std::uint64_t next_request_ = 1;
  std::map<std::uint64_t, Pending> pending_;
};

}  // namespace dependsim::container

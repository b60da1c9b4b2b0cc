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
#include <string>
#include <variant>
#include <vector>

#include "analysis/pattern.hpp"
#include "container/container.hpp"
#include "repair/notice.hpp"

namespace dependsim::repair {

struct ActivateAlternative {
  std::string container_id;
  container::ReplicaSpec replacement;
};
struct RescheduleJobs {
  std::vector<std::string> job_ids;
};
struct RestoreCheckpoint {
  std::string job_id;
  std::string checkpoint_ref;
};
struct AlertOperator {
  std::uint64_t diagnosis_id = 0;
  std::string reason;
};

using RepairAction = std::variant<ActivateAlternative, RescheduleJobs,
                                  RestoreCheckpoint, AlertOperator>;

const char* action_name(const RepairAction& a);
Json to_json(const RepairAction& a);

struct RepairPlan {
  std::uint64_t plan_id = 0;
  analysis::Diagnosis diagnosis;
  std::vector<RepairAction> actions;
  SimTime created_at = 0;

  bool is_alert() const {
    return actions.size() == 1 && std::holds_alternative<AlertOperator>(actions[0]);
  }
};

enum class RepairStrategy { ActivateAlternative, RecoverJobs, Alert };

std::optional<RepairStrategy> parse_strategy(const std::string& s);

/// fault class -> strategy. Classes not listed fall back to Alert.
struct RepairPolicyTable {
  std::map<std::string, RepairStrategy> by_class = {
      {"ServiceCrash", RepairStrategy::ActivateAlternative},
      {"JobFault", RepairStrategy::RecoverJobs},
  };

  RepairStrategy strategy_for(const std::string& fault_class) const;
};

struct JobRecord {
  std::string id;
  NodeId host;
  std::optional<std::string> checkpoint_ref;
  std::uint32_t reschedules = 0;
  std::uint32_t restores = 0;
};

struct ContainerRecord {
  std::string equivalence_class;
  std::deque<container::ReplicaSpec> alternatives;  // not yet activated
};

/// What the orchestrator may act on.
struct RepairContext {
  std::map<std::string, ContainerRecord> containers;
  std::map<std::string, JobRecord> jobs;
  std::map<std::string, NodeId> node_by_name;
};

/// Deterministic lookup; AlertOperator is the total fallback.
RepairPlan plan(const analysis::Diagnosis& diagnosis,
                const RepairPolicyTable& policy, const RepairContext& context,
                std::uint64_t plan_id, SimTime now);

/// One scripted port reply.
struct PortOutcome {
  bool ok = true;
  SimTime delay = 0;
};

/// Stub for an external service; replies follow its script, then succeed
/// immediately once the script is exhausted.
class ScriptedPort {
 public:
  ScriptedPort() = default;
  ScriptedPort(std::string name, std::vector<PortOutcome> script)
      : name_(std::move(name)), script_(script.begin(), script.end()) {}

  PortOutcome call();
  const std::string& name() const { return name_; }
  std::size_t calls() const { return calls_; }

 private:
  std::string name_;
  std::deque<PortOutcome> script_;
  std::size_t calls_ = 0;
};

struct ServicePorts {
  ScriptedPort scheduler{"scheduler", {}};
  ScriptedPort checkpoint_store{"checkpoint_store", {}};
  ScriptedPort index{"index", {}};
  ScriptedPort transfer{"transfer", {}};
};

struct StepRecord {
  std::size_t index = 0;
  std::string action;
  bool ok = true;
  SimTime started = 0;
  SimTime finished = 0;
  std::string port;  // failing port, if any
};

/// A state change made by a completed action; becomes a ChangeNotice.
struct AppliedChange {
  std::string summary;
  std::optional<ReplicaChange> replica_change;
};

struct ExecutionReport {
  std::uint64_t plan_id = 0;
  std::vector<StepRecord> steps;
  bool completed = false;  // every planned action succeeded
  bool alerted = false;    // an AlertOperator was executed or appended
  SimTime finished_at = 0;
  std::vector<AppliedChange> changes;
};

/// Step-by-step plan execution. begin_step consults the ports and reports
/// how long the action takes; finish_step applies its effect at completion.
class PlanExecution {
 public:
  explicit PlanExecution(RepairPlan plan);

  const RepairPlan& plan() const { return plan_; }
  bool done() const { return done_; }
  const ExecutionReport& report() const { return report_; }

  /// Returns the completion time of the current action.
  SimTime begin_step(ServicePorts& ports, SimTime now);

  /// Applies the current action. Returns the change it made, if any. On a
  /// failed action execution stops and an operator alert is appended.
  std::optional<AppliedChange> finish_step(RepairContext& context, SimTime now);

 private:
  RepairPlan plan_;
  std::size_t next_ = 0;
  bool done_ = false;
  bool in_step_ = false;
  bool step_ok_ = true;
  std::string failed_port_;
  SimTime step_started_ = 0;
  ExecutionReport report_;
};

/// Runs a whole plan, advancing a virtual clock by port delays.
ExecutionReport execute(const RepairPlan& plan, ServicePorts& ports,
                        RepairContext& context, SimTime now);

}  // namespace dependsim::repair

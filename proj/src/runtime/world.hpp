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

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "analysis/engine.hpp"
#include "container/container.hpp"
#include "membership/detector.hpp"
#include "repair/plan.hpp"
#include "repair/propagation.hpp"
#include "scenario/scenario.hpp"
#include "security/monitor.hpp"
#include "sim/simulator.hpp"

namespace dependsim::runtime {

/// Events passed between modules inside one node.
enum class EventKind {
  Suspicion,          // detector -> records, containers, learning
  MonitoringRecord,   // anyone -> analysis engine
  Diagnosis,          // analysis engine -> repair orchestrator
  InvocationOutcome,  // container -> learning
  ConfirmedFault,     // detector / container -> analysis engine (learn)
  ChangeNotice,       // repair orchestrator -> change propagation
  NoticeApplied,      // change propagation -> containers / repair context
};

const char* to_string(EventKind kind);

/// Which module consumes each internal event kind.
struct Wiring {
  std::map<EventKind, std::string> consumers;

  static Wiring standard();
};

struct RunOptions {
  sim::TraceLevel level = sim::TraceLevel::Full;
};

/// All node runtimes of one scenario on one simulator.
class World : public sim::EventHandler {
 public:
  /// Validates and assembles. Throws ConfigError.
  explicit World(scenario::Scenario scenario, RunOptions options = {},
                 Wiring wiring = Wiring::standard());
  ~World() override;

  World(const World&) = delete;
  World& operator=(const World&) = delete;

  Trace run_until(SimTime t);

  /// Runs to the scenario's run length and appends the `run_end` entry.
  void run();
  /// Appends `run_end` at the current time; idempotent.
  void finish();

  const Trace& trace() const { return sim_.trace(); }
  SimTime now() const { return sim_.now(); }
  const scenario::Scenario& scenario() const { return scenario_; }
  const sim::Simulator& simulator() const { return sim_; }

  /// Null while the node is down.
  const membership::Detector* detector(NodeId n) const;
  const analysis::AnalysisEngine* engine(NodeId n) const;
  const security::ReferenceMonitor* monitor(NodeId n) const;
  const container::ReplicaContainer* container(NodeId home,
                                               const std::string& id) const;

  /// Patterns learned anywhere in the run, in learning order, deduplicated.
  const std::vector<analysis::Pattern>& learned_patterns() const {
    return learned_;
  }

  void on_message(NodeId to, NodeId from, const sim::Message& msg) override;
  void on_timer(NodeId node, const sim::Timer& timer) override;
  void on_directive(NodeId node, const sim::Directive& directive) override;
  void on_crash(NodeId node) override;
  void on_recover(NodeId node) override;

 private:
  struct Node;

  void record_header();
  void schedule_script();
  void boot(NodeId n);
  Json named(const Json& j) const;
  void emit(NodeId n, TraceNotes notes);
  bool routed(NodeId n, EventKind kind);

  void handle_transitions(Node& node,
                          const std::vector<membership::SuspicionTransition>& ts);
  void ingest(Node& node, const std::vector<analysis::MonitoringRecord>& records);
  void on_diagnosis(Node& node, const analysis::Diagnosis& d);
  void start_step(Node& node, std::uint64_t plan_id);
  void finish_step(Node& node, std::uint64_t plan_id);
  void on_outcome(Node& node, const std::string& container_id,
                  const container::InvocationOutcome& outcome, SimTime started);
  void on_confirmed_fault(Node& node, const analysis::ConfirmedFault& fault);
  void on_change(Node& node, const repair::AppliedChange& change);
  void on_notice_applied(Node& node, const repair::ChangeNotice& notice);
  void apply_container_step(Node& node, const std::string& container_id,
                            container::ContainerStep step);
  void apply_relay_step(Node& node, repair::RelayStep step);
  repair::RoutingView routing_view(const Node& node) const;
  std::optional<NodeId> fallback_for(const Node& node, NodeId target) const;
  void report_global_view(Node& node);
  container::LivenessFn liveness_fn(const Node& node) const;
  const container::ReplicaSpec* deployed(const std::string& container_id,
                                         NodeId host) const;

  scenario::Scenario scenario_;
  Wiring wiring_;
  membership::ClusterTopology topology_;
  sim::Simulator sim_;
  repair::ServicePorts ports_;
  security::SecurityPolicy policy_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<analysis::Pattern> learned_;
  std::set<std::string> learned_ids_;
  bool finished_ = false;
};

}  // namespace dependsim::runtime

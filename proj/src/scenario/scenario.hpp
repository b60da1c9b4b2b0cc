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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "analysis/engine.hpp"
#include "container/container.hpp"
#include "membership/heartbeat.hpp"
#include "membership/topology.hpp"
#include "repair/plan.hpp"
#include "repair/propagation.hpp"
#include "security/policy.hpp"
#include "sim/simulator.hpp"

namespace dependsim::scenario {

/// Periodic invocations of one container from its home node. Requests are
/// cycled in order.
struct WorkloadItem {
  std::size_t container = 0;
  SimTime start = 0;
  SimTime every = 1;
  std::uint32_t count = 1;
  std::vector<std::string> requests;
};

struct AccessItem {
  SimTime at = 0;
  NodeId node;
  std::string subject;
  std::string object;
  security::Operation operation = security::Operation::Read;
  std::uint32_t repeat = 1;
  SimTime every = 1;
};

struct PolicyItem {
  SimTime at = 0;
  security::PolicyChange change;
};

/// Externally monitored samples delivered to `observer`'s analysis engine.
struct FeedItem {
  NodeId observer;
  std::string source;
  std::string metric;
  std::vector<std::pair<SimTime, double>> samples;
};

struct PortScripts {
  std::vector<repair::PortOutcome> scheduler;
  std::vector<repair::PortOutcome> checkpoint_store;
  std::vector<repair::PortOutcome> index;
  std::vector<repair::PortOutcome> transfer;
};

/// A fully resolved, validated scenario. Node references are indices into
/// `nodes`.
struct Scenario {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  SimTime run_length = 1000;

  std::vector<std::string> nodes;
  std::vector<membership::Cluster> clusters;
  sim::NetworkModel network;
  membership::DetectorParams detector;

  std::vector<container::ContainerConfig> containers;
  std::vector<WorkloadItem> workload;

  analysis::EngineConfig engine;
  bool learning = true;

  repair::RepairPolicyTable repair_policy;
  repair::PropagationParams propagation;
  std::vector<repair::JobRecord> jobs;
  PortScripts ports;

  security::Directory directory;
  security::SecurityPolicy policy;
  SimTime deny_window = 100;
  std::vector<AccessItem> accesses;
  std::vector<PolicyItem> policy_changes;

  std::vector<sim::FaultInjection> faults;
  std::vector<FeedItem> feeds;
};

/// Cross-reference and range checks shared by the file loader and
/// programmatically built scenarios. Throws ConfigError.
void validate(const Scenario& s);

/// Builds n nodes named prefix1..prefixN split into `clusters` contiguous
/// clusters c1..cK arranged as a binary tree rooted at c1 (parent of c_i is
/// c_(i/2)).
void generate_topology(Scenario& s, std::size_t nodes, std::size_t clusters,
                       const std::string& prefix = "n");

}  // namespace dependsim::scenario

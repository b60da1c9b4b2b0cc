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

#include "scenario/scenario.hpp"

#include <set>

#include "common/error.hpp"

namespace dependsim::scenario {
namespace {

std::string at(const std::string& list, std::size_t i) {
  return list + "[" + std::to_string(i) + "]";
}

void require(bool ok, const std::string& path, const std::string& message) {
  if (!ok) throw ConfigError(path, 0, message);
}

}  // namespace

void validate(const Scenario& s) {
  const std::size_t n = s.nodes.size();
  require(n > 0, "nodes", "at least one node is required");
  require(s.run_length >= 0, "run_length", "must be >= 0");
  {
    std::set<std::string> names(s.nodes.begin(), s.nodes.end());
    require(names.size() == n, "nodes", "node names must be unique");
  }
  auto node_ok = [&](NodeId id) { return id.value < n; };

  require(s.network.base_latency >= 1, "network.base_latency", "must be >= 1");
  require(s.network.jitter >= 0, "network.jitter", "must be >= 0");
  require(s.network.loss_probability >= 0.0 && s.network.loss_probability <= 1.0,
          "network.loss", "must be in [0, 1]");

  const auto& d = s.detector;
  require(d.gossip_interval >= 1, "detector.gossip_interval", "must be >= 1");
  require(d.summary_interval >= 1, "detector.summary_interval", "must be >= 1");
  require(d.fanout >= 1, "detector.fanout", "must be >= 1");
  require(d.window >= 1, "detector.window", "must be >= 1");
  require(d.k >= 0.0, "detector.k", "must be >= 0");
  require(d.t_min >= 1 && d.t_min <= d.t_max, "detector.t_min",
          "must satisfy 1 <= t_min <= t_max");
  require(d.t_bootstrap >= 1, "detector.t_bootstrap", "must be >= 1");
  require(d.t_cleanup >= 0, "detector.t_cleanup", "must be >= 0");

  // Throws ConfigError on a malformed tree.
  membership::ClusterTopology topo(s.clusters, n);

  std::set<std::string> container_ids;
  for (std::size_t i = 0; i < s.containers.size(); ++i) {
    const auto& c = s.containers[i];
    const auto path = at("containers", i);
    require(!c.id.empty(), path + ".id", "must not be empty");
    require(container_ids.insert(c.id).second, path + ".id",
            "duplicate container id '" + c.id + "'");
    require(node_ok(c.home), path + ".home", "undeclared node");
    require(c.timeout >= 1, path + ".timeout", "must be >= 1");
    require(!c.replicas.empty(), path + ".replicas", "must not be empty");
    if (c.strategy == container::Strategy::ActiveReplication)
      require(c.replicas.size() % 2 == 1, path + ".replicas",
              "active replication needs an odd replica count");
    std::set<std::uint32_t> hosts;
    for (std::size_t r = 0; r < c.replicas.size(); ++r) {
      require(node_ok(c.replicas[r].host), at(path + ".replicas", r) + ".host",
              "undeclared node");
      require(hosts.insert(c.replicas[r].host.value).second,
              at(path + ".replicas", r) + ".host", "host already used");
    }
    for (std::size_t r = 0; r < c.alternatives.size(); ++r) {
      require(node_ok(c.alternatives[r].host),
              at(path + ".alternatives", r) + ".host", "undeclared node");
      require(hosts.insert(c.alternatives[r].host.value).second,
              at(path + ".alternatives", r) + ".host", "host already used");
    }
  }
  for (std::size_t i = 0; i < s.workload.size(); ++i) {
    const auto& w = s.workload[i];
    const auto path = at("workload", i);
    require(w.container < s.containers.size(), path + ".container",
            "undeclared container");
    require(w.every >= 1, path + ".every", "must be >= 1");
    require(w.start >= 0, path + ".start", "must be >= 0");
    require(!w.requests.empty(), path + ".requests", "must not be empty");
  }
  for (std::size_t i = 0; i < s.engine.patterns.size(); ++i) {
    const auto& p = s.engine.patterns[i];
    const auto path = at("analysis.patterns", i);
    require(p.confidence > 0.0 && p.confidence <= 1.0, path + ".confidence",
            "must be in (0, 1]");
    if (auto* t = std::get_if<analysis::ThresholdPredicate>(&p.predicate))
      require(t->min_consecutive >= 1, path + ".threshold.min_consecutive",
              "must be >= 1");
    if (auto* q = std::get_if<analysis::SequencePredicate>(&p.predicate)) {
      require(q->span >= 1, path + ".sequence.span", "must be >= 1");
      require(!q->steps.empty(), path + ".sequence.steps", "must not be empty");
    }
  }
  for (std::size_t i = 0; i < s.engine.predictions.size(); ++i)
    require(s.engine.predictions[i].k >= 1, at("analysis.predictions", i) + ".k",
            "must be >= 1");
  require(s.propagation.retry_interval >= 1, "repair.retry_interval",
          "must be >= 1");
  for (std::size_t i = 0; i < s.jobs.size(); ++i)
    require(node_ok(s.jobs[i].host), at("repair.jobs", i) + ".host",
            "undeclared node");

  for (const auto& [id, obj] : s.directory.objects)
    require(s.directory.subjects.count(obj.owner), "security.objects." + id + ".owner",
            "undeclared subject '" + obj.owner + "'");
  for (std::size_t i = 0; i < s.accesses.size(); ++i) {
    const auto& a = s.accesses[i];
    const auto path = at("timeline.access", i);
    require(node_ok(a.node), path + ".node", "undeclared node");
    require(s.directory.subjects.count(a.subject), path + ".subject",
            "undeclared subject '" + a.subject + "'");
    require(s.directory.objects.count(a.object), path + ".object",
            "undeclared object '" + a.object + "'");
    require(a.repeat >= 1 && a.every >= 1, path + ".repeat", "must be >= 1");
  }
  require(s.deny_window >= 1, "security.deny_window", "must be >= 1");

  for (std::size_t i = 0; i < s.faults.size(); ++i) {
    const auto path = at("timeline", i);
    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, sim::Crash> ||
                        std::is_same_v<T, sim::Recover>) {
            require(node_ok(f.node), path, "undeclared node");
            require(f.at >= 0, path + ".at", "must be >= 0");
          } else if constexpr (std::is_same_v<T, sim::PartitionFault>) {
            for (auto x : f.partition.side_a) require(node_ok(x), path, "undeclared node");
            for (auto x : f.partition.side_b) require(node_ok(x), path, "undeclared node");
            require(f.partition.end >= f.partition.start, path + ".until",
                    "must not precede at");
          } else {
            require(f.probability >= 0.0 && f.probability <= 1.0,
                    path + ".set_loss", "must be in [0, 1]");
          }
        },
        s.faults[i]);
  }
  for (std::size_t i = 0; i < s.feeds.size(); ++i) {
    const auto& f = s.feeds[i];
    require(node_ok(f.observer), at("feeds", i) + ".observer", "undeclared node");
    for (std::size_t k = 1; k < f.samples.size(); ++k)
      require(f.samples[k].first >= f.samples[k - 1].first,
              at("feeds", i) + ".samples", "sample times must not decrease");
  }
}

void generate_topology(Scenario& s, std::size_t nodes, std::size_t clusters,
                       const std::string& prefix) {
  if (clusters == 0 || nodes < clusters)
    throw ConfigError("generate", 0, "need at least one node per cluster");
  s.nodes.clear();
  s.clusters.clear();
  for (std::size_t i = 0; i < nodes; ++i)
    s.nodes.push_back(prefix + std::to_string(i + 1));
  for (std::size_t c = 0; c < clusters; ++c) {
    membership::Cluster cl;
    cl.name = "c" + std::to_string(c + 1);
    // Contiguous blocks; earlier clusters take the remainder.
    const std::size_t lo = c * nodes / clusters, hi = (c + 1) * nodes / clusters;
    for (std::size_t i = lo; i < hi; ++i)
      cl.members.push_back(NodeId{static_cast<std::uint32_t>(i)});
    // Binary-heap shaped tree rooted at c1.
    if (c > 0) cl.parent = ClusterId{static_cast<std::uint32_t>((c - 1) / 2)};
    s.clusters.push_back(std::move(cl));
  }
}

}  // namespace dependsim::scenario

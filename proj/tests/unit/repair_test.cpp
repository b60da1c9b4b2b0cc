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

#include <doctest.h>

#include <map>
#include <queue>
#include <tuple>

#include "common/rng.hpp"
#include "repair/plan.hpp"
#include "repair/propagation.hpp"

using namespace dependsim;
using namespace dependsim::repair;

namespace {

analysis::Diagnosis diag(std::string fault, std::string subject, std::uint64_t id = 1) {
  analysis::Diagnosis d;
  d.id = id;
  d.fault_class = std::move(fault);
  d.subject = std::move(subject);
  d.confidence = 1.0;
  return d;
}

container::ReplicaSpec alt(std::uint32_t host, std::string cls = "calc") {
  container::ReplicaSpec r;
  r.host = NodeId{host};
  r.service.service_id = "alt" + std::to_string(host);
  r.service.equivalence_class = std::move(cls);
  return r;
}

RepairContext context() {
  RepairContext c;
  c.containers["A"] = ContainerRecord{"calc", {alt(5)}};
  c.jobs["j7"] = JobRecord{"j7", NodeId{2}, std::string("ckpt-1")};
  c.jobs["j8"] = JobRecord{"j8", NodeId{2}, std::nullopt};
  c.node_by_name["n2"] = NodeId{2};
  return c;
}

}  // namespace

TEST_CASE("planning") {
  RepairPolicyTable policy;
  auto ctx = context();

  auto p = plan(diag("ServiceCrash", "A"), policy, ctx, 1, 10);
  REQUIRE(p.actions.size() == 1);
  auto& a = std::get<ActivateAlternative>(p.actions[0]);
  CHECK(a.container_id == "A");
  CHECK(a.replacement.host == NodeId{5});

  p = plan(diag("JobFault", "j7"), policy, ctx, 2, 10);
  REQUIRE(p.actions.size() == 2);
  CHECK(std::get<RestoreCheckpoint>(p.actions[0]).job_id == "j7");
  CHECK(std::get<RescheduleJobs>(p.actions[1]).job_ids == std::vector<std::string>{"j7"});

  p = plan(diag("JobFault", "n2"), policy, ctx, 3, 10);
  REQUIRE(p.actions.size() == 2);  // j7 restore, then both rescheduled
  CHECK(std::get<RescheduleJobs>(p.actions[1]).job_ids.size() == 2);

  CHECK(plan(diag("Mystery", "A"), policy, ctx, 4, 10).is_alert());
  CHECK(plan(diag("ServiceCrash", "nope"), policy, ctx, 5, 10).is_alert());

  ctx.containers["A"].alternatives = {alt(6, "other")};
  CHECK(plan(diag("ServiceCrash", "A"), policy, ctx, 6, 10).is_alert());
}

TEST_CASE("execution") {
  RepairPolicyTable policy;

  SUBCASE("alternative activation produces a replica change") {
    auto ctx = context();
    ServicePorts ports;
    auto r = execute(plan(diag("ServiceCrash", "A"), policy, ctx, 1, 0), ports, ctx, 0);
    CHECK(r.completed);
    REQUIRE(r.changes.size() == 1);
    REQUIRE(r.changes[0].replica_change);
    CHECK(r.changes[0].replica_change->host == NodeId{5});
    CHECK(ctx.containers["A"].alternatives.empty());
  }
  SUBCASE("stop on failure") {
    auto ctx = context();
    ServicePorts ports;
    ports.checkpoint_store = ScriptedPort("checkpoint_store", {{false, 3}});
    auto r = execute(plan(diag("JobFault", "j7"), policy, ctx, 1, 100), ports, ctx, 100);
    CHECK_FALSE(r.completed);
    CHECK(r.alerted);
    REQUIRE(r.steps.size() == 2);
    CHECK(r.steps[0].action == "restore_checkpoint");
    CHECK_FALSE(r.steps[0].ok);
    CHECK(r.steps[1].action == "alert_operator");
    CHECK(ports.scheduler.calls() == 0);
    CHECK(ctx.jobs["j7"].reschedules == 0);
    CHECK(r.changes.empty());
  }
  SUBCASE("port delays advance the clock") {
    auto ctx = context();
    ServicePorts ports;
    ports.checkpoint_store = ScriptedPort("checkpoint_store", {{true, 7}});
    ports.scheduler = ScriptedPort("scheduler", {{true, 5}});
    auto r = execute(plan(diag("JobFault", "j7"), policy, ctx, 1, 100), ports, ctx, 100);
    CHECK(r.completed);
    CHECK(r.finished_at == 112);
    CHECK(r.changes.size() == 2);
  }
  SUBCASE("alerts change nothing") {
    auto ctx = context();
    ServicePorts ports;
    auto r = execute(plan(diag("Mystery", "A"), policy, ctx, 1, 0), ports, ctx, 0);
    CHECK(r.alerted);
    CHECK(r.changes.empty());
  }
}

namespace {

// Two clusters: {0,1,2} (root, representative 0) and {3,4,5} (child,
// representative 3).
struct Net {
  static constexpr std::uint32_t kNodes = 6;
  std::vector<NoticeRelay> relays;
  std::map<std::uint32_t, int> applications;
  double loss = 0.0;
  Rng rng{1};

  // (time, order, kind, from, to, payload)
  struct Msg {
    SimTime at;
    std::uint64_t order;
    int kind;  // 0 notice, 1 ack, 2 timer
    NodeId from, to;
    NoticeMessage notice;
    NoticeAck ack;
    RelayTimer timer;
    bool operator>(const Msg& o) const { return std::tie(at, order) > std::tie(o.at, o.order); }
  };
  std::priority_queue<Msg, std::vector<Msg>, std::greater<>> q;
  std::uint64_t order = 0;

  explicit Net(PropagationParams p) {
    for (std::uint32_t i = 0; i < kNodes; ++i) relays.emplace_back(NodeId{i}, p);
  }

  static bool same(NodeId a, NodeId b) { return a.value / 3 == b.value / 3; }

  RoutingView view(NodeId n) const {
    RoutingView v;
    v.self = n;
    const std::uint32_t rep = n.value / 3 * 3;
    v.own_representative = NodeId{rep};
    v.is_representative = n.value == rep;
    for (std::uint32_t m = rep; m < rep + 3; ++m)
      if (m != n.value) v.cluster_members.push_back(NodeId{m});
    if (v.is_representative) v.tree_neighbours.push_back(NodeId{rep == 0 ? 3u : 0u});
    v.same_cluster = same;
    return v;
  }

  void absorb(NodeId self, const RelayStep& s, SimTime now) {
    if (s.applied) ++applications[self.value];
    for (auto& send : s.sends)
      if (rng.unit() >= loss) q.push({now + 1, order++, 0, self, send.to, send.message, {}, {}});
    for (auto& a : s.acks)
      if (rng.unit() >= loss) q.push({now + 1, order++, 1, self, a.to, {}, a.ack, {}});
    for (auto& t : s.timers) q.push({t.at, order++, 2, self, self, {}, {}, t});
  }

  void run() {
    while (!q.empty()) {
      auto m = q.top();
      q.pop();
      auto& r = relays[m.to.value];
      if (m.kind == 0) absorb(m.to, r.on_notice(m.from, m.notice, view(m.to), m.at), m.at);
      else if (m.kind == 1) r.on_ack(m.from, m.ack);
      else absorb(m.to, r.on_retry(m.timer.id, m.timer.target, m.timer.attempt, m.at, std::nullopt), m.at);
    }
  }
};

}  // namespace

TEST_CASE("lossless broadcast applies once everywhere") {
  for (std::uint32_t origin : {0u, 1u, 4u}) {
    Net net({2, 20});
    auto& o = net.relays[origin];
    auto n = o.originate("change", 0);
    net.absorb(NodeId{origin}, o.start(n, net.view(NodeId{origin}), 0), 0);
    net.run();
    int total = 0;
    for (std::uint32_t i = 0; i < Net::kNodes; ++i) {
      CHECK(net.applications[i] == 1);
      total += net.applications[i];
      CHECK(net.relays[i].pending() == 0);
    }
    CHECK(total == static_cast<int>(Net::kNodes));
  }
}

TEST_CASE("lossy broadcast still applies exactly once over 100 seeds") {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    Net net({2, 20});
    net.loss = 0.3;
    net.rng = Rng(seed);
    auto& o = net.relays[4];
    auto n = o.originate("change", 0);
    net.absorb(NodeId{4}, o.start(n, net.view(NodeId{4}), 0), 0);
    net.run();
    for (std::uint32_t i = 0; i < Net::kNodes; ++i) CHECK(net.applications[i] == 1);
  }
}

TEST_CASE("a duplicate delivery is acknowledged but not reapplied") {
  NoticeRelay r(NodeId{1}, {});
  NoticeRelay origin(NodeId{0}, {});
  auto n = origin.originate("x", 5);
  CHECK(n.id.sequence == 1);
  CHECK(origin.originate("y", 6).id.sequence == 2);

  Net net({2, 20});
  auto first = r.on_notice(NodeId{0}, NoticeMessage{n, false}, net.view(NodeId{1}), 10);
  CHECK(first.applied);
  CHECK(first.acks.size() == 1);
  auto second = r.on_notice(NodeId{0}, NoticeMessage{n, false}, net.view(NodeId{1}), 11);
  CHECK_FALSE(second.applied);
  CHECK(second.acks.size() == 1);
  CHECK(second.sends.empty());
  REQUIRE(second.notes.size() == 1);
  CHECK(second.notes[0].kind == "notice_dup");
  CHECK(r.applied_count() == 1);
}

TEST_CASE("retransmission gives up after retry_max") {
  NoticeRelay r(NodeId{1}, {2, 3});
  Net net({2, 3});
  auto n = r.originate("x", 0);
  auto s = r.start(n, net.view(NodeId{1}), 0);
  REQUIRE(s.sends.size() == 1);
  CHECK(s.sends[0].to == NodeId{0});
  auto t = s.timers[0];
  RelayStep step;
  for (std::uint32_t attempt = 1;; ++attempt) {
    step = r.on_retry(t.id, t.target, attempt, t.at, std::nullopt);
    if (step.timers.empty()) break;
    t = step.timers[0];
  }
  REQUIRE(step.notes.size() == 1);
  CHECK(step.notes[0].kind == "propagation_incomplete");
  CHECK(r.pending() == 0);
}

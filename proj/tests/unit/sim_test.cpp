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

#include <vector>

#include "common/error.hpp"
#include "sim/simulator.hpp"

using namespace dependsim;
using namespace dependsim::sim;

namespace {

// Records what the simulator hands to the node runtimes.
struct Recorder : EventHandler {
  struct Seen {
    SimTime t;
    std::string what;
    NodeId node;
  };
  Simulator* sim = nullptr;
  std::vector<Seen> seen;

  void on_message(NodeId to, NodeId, const Message&) override {
    seen.push_back({sim->now(), "msg", to});
  }
  void on_timer(NodeId node, const Timer& t) override {
    seen.push_back({sim->now(), "timer:" + t.key, node});
  }
  void on_directive(NodeId node, const Directive&) override {
    seen.push_back({sim->now(), "directive", node});
  }
  void on_crash(NodeId node) override { seen.push_back({sim->now(), "crash", node}); }
  void on_recover(NodeId node) override {
    seen.push_back({sim->now(), "recover", node});
  }
};

Simulator make(NetworkModel net = {}, std::uint64_t seed = 1) {
  return Simulator({"a", "b", "c"}, std::move(net), seed);
}

std::size_t count_kind(const Trace& t, const std::string& kind) {
  std::size_t n = 0;
  for (const auto& e : t) n += e.kind == kind;
  return n;
}

}  // namespace

TEST_CASE("events fire in time order, ties by scheduling order") {
  auto sim = make();
  Recorder r;
  r.sim = &sim;
  sim.set_handler(&r);
  sim.schedule_timer(NodeId{0}, 16, Timer{0, 0, 0, 0, "late"});
  sim.schedule_timer(NodeId{0}, 15, Timer{0, 0, 0, 0, "first"});
  sim.schedule_timer(NodeId{0}, 15, Timer{0, 0, 0, 0, "second"});
  sim.run_until(20);
  REQUIRE(r.seen.size() == 3);
  CHECK(r.seen[0].what == "timer:first");
  CHECK(r.seen[1].what == "timer:second");
  CHECK(r.seen[2].what == "timer:late");
  CHECK(r.seen[2].t == 16);
  CHECK(sim.now() == 20);
}

TEST_CASE("scheduling in the past is rejected") {
  auto sim = make();
  sim.run_until(10);
  CHECK_THROWS_AS(sim.schedule_timer(NodeId{0}, 9, Timer{}), Error);
  try {
    sim.schedule_timer(NodeId{0}, 9, Timer{});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchedulingInPast);
  }
}

TEST_CASE("deterministic latency without jitter or loss") {
  NetworkModel net;
  net.base_latency = 3;
  auto sim = make(net);
  Recorder r;
  r.sim = &sim;
  sim.set_handler(&r);
  sim.run_until(10);
  sim.send(NodeId{0}, NodeId{1}, membership::GossipDigest{});
  sim.run_until(100);
  REQUIRE(r.seen.size() == 1);
  CHECK(r.seen[0].t == 13);
}

TEST_CASE("certain loss never delivers and traces a drop") {
  NetworkModel net;
  net.loss_probability = 1.0;
  auto sim = make(net);
  Recorder r;
  r.sim = &sim;
  sim.set_handler(&r);
  for (int i = 0; i < 20; ++i) sim.send(NodeId{0}, NodeId{1}, membership::GossipDigest{});
  sim.run_until(100);
  CHECK(r.seen.empty());
  CHECK(count_kind(sim.trace(), "drop") == 20);
}

TEST_CASE("partitions drop at delivery time and heal") {
  NetworkModel net;
  net.base_latency = 2;
  auto sim = make(net);
  Recorder r;
  r.sim = &sim;
  sim.set_handler(&r);
  sim.inject_fault(PartitionFault{Partition{{NodeId{0}}, {NodeId{1}}, 10, 20}});
  sim.run_until(9);
  sim.send(NodeId{0}, NodeId{1}, membership::GossipDigest{});  // arrives at 11
  sim.send(NodeId{0}, NodeId{2}, membership::GossipDigest{});  // other side free
  sim.run_until(25);
  sim.send(NodeId{1}, NodeId{0}, membership::GossipDigest{});  // after heal
  sim.run_until(40);
  CHECK(count_kind(sim.trace(), "partition_drop") == 1);
  REQUIRE(r.seen.size() == 2);
  CHECK(r.seen[0].node == NodeId{2});
  CHECK(r.seen[1].node == NodeId{0});
  CHECK(count_kind(sim.trace(), "partition") == 1);
  CHECK(count_kind(sim.trace(), "heal") == 1);
}

TEST_CASE("a crashed node gets no deliveries or timers until it recovers") {
  NetworkModel net;
  net.base_latency = 5;
  auto sim = make(net);
  Recorder r;
  r.sim = &sim;
  sim.set_handler(&r);
  sim.inject_fault(Crash{NodeId{2}, 100});
  sim.inject_fault(Recover{NodeId{2}, 500});
  sim.schedule_timer(NodeId{2}, 200, Timer{0, 0, 0, 0, "lost"});
  sim.run_until(98);
  sim.send(NodeId{0}, NodeId{2}, membership::GossipDigest{});  // lands at 103
  sim.run_until(300);
  sim.send(NodeId{2}, NodeId{0}, membership::GossipDigest{});  // crashed sender
  sim.run_until(600);
  std::vector<std::string> what;
  for (const auto& s : r.seen) what.push_back(s.what);
  CHECK(what == std::vector<std::string>{"crash", "recover"});
  CHECK(sim.incarnation(NodeId{2}) == 2);
  CHECK(sim.is_up(NodeId{2}));
}

TEST_CASE("faults on unknown nodes are rejected") {
  auto sim = make();
  CHECK_THROWS_AS(sim.inject_fault(Crash{NodeId{99}, 10}), Error);
}

TEST_CASE("same seed gives the same trace; splitting a run changes nothing") {
  NetworkModel net;
  net.base_latency = 1;
  net.jitter = 4;
  net.loss_probability = 0.3;
  auto drive = [&](std::vector<SimTime> stops) {
    Simulator sim({"a", "b", "c"}, net, 42);
    Recorder r;
    r.sim = &sim;
    sim.set_handler(&r);
    for (SimTime t = 0; t < 200; t += 7)
      sim.schedule_timer(NodeId{static_cast<std::uint32_t>(t % 3)}, t, Timer{});
    SimTime last = 0;
    for (auto stop : stops) {
      for (; last < stop; last += 3) {
        sim.run_until(last);
        sim.send(NodeId{static_cast<std::uint32_t>(last % 3)},
                 NodeId{static_cast<std::uint32_t>((last + 1) % 3)},
                 membership::GossipDigest{});
      }
    }
    sim.run_until(300);
    return to_jsonl(sim.trace());
  };
  const auto once = drive({300});
  CHECK(once == drive({300}));
  CHECK(once == drive({100, 200, 300}));
}

TEST_CASE("per-(node, purpose) streams do not depend on other nodes") {
  Simulator small({"a", "b"}, {}, 9);
  Simulator large({"a", "b", "z"}, {}, 9);
  auto x = small.make_stream(NodeId{1}, "gossip");
  auto y = large.make_stream(NodeId{1}, "gossip");
  for (int i = 0; i < 10; ++i) CHECK(x.below(1000) == y.below(1000));
}

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

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "common/error.hpp"
#include "common/rng.hpp"
#include "container/container.hpp"
#include "container/vote.hpp"

using namespace dependsim;
using namespace dependsim::container;

namespace {

ReplicaSpec replica_on(std::uint32_t host, std::string answer = "42") {
  ReplicaSpec r;
  r.host = NodeId{host};
  r.service.service_id = "svc" + std::to_string(host);
  r.service.equivalence_class = "calc";
  r.service.table["q"] = std::move(answer);
  return r;
}

ContainerConfig config(Strategy s, std::vector<ReplicaSpec> replicas) {
  ContainerConfig c;
  c.id = "ctr";
  c.home = NodeId{0};
  c.strategy = s;
  c.timeout = 10;
  c.replicas = std::move(replicas);
  return c;
}

struct Liveness_ {
  std::map<std::uint32_t, Liveness> state;
  LivenessFn fn() const {
    return [this](NodeId n) {
      auto it = state.find(n.value);
      return it == state.end() ? Liveness::Alive : it->second;
    };
  }
};

bool has_note(const ContainerStep& s, const std::string& kind) {
  return std::any_of(s.notes.begin(), s.notes.end(),
                     [&](const auto& n) { return n.kind == kind; });
}

// Delivers every send in `step` to a healthy host, answering immediately, and
// returns the resulting steps.
std::vector<ContainerStep> answer_all(ReplicaContainer& c, const ContainerStep& step,
                                      const std::vector<ReplicaSpec>& specs,
                                      const LivenessFn& live, SimTime now,
                                      const std::vector<std::uint32_t>& silent = {}) {
  std::vector<ContainerStep> out;
  for (const auto& s : step.sends) {
    if (std::find(silent.begin(), silent.end(), s.host.value) != silent.end()) continue;
    const auto& spec = *std::find_if(specs.begin(), specs.end(),
                                     [&](const ReplicaSpec& r) { return r.host == s.host; });
    auto [resp, delay] = serve(spec, s.request);
    out.push_back(c.on_response(resp, s.host, now + delay, live));
  }
  return out;
}

// Naive strict-majority oracle.
std::optional<std::string> majority(const std::vector<std::string>& xs, std::size_t n) {
  for (const auto& candidate : xs) {
    std::size_t count = 0;
    for (const auto& x : xs) count += x == candidate;
    if (count * 2 > n) return candidate;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("vote examples") {
  std::vector<std::string> a{"a", "a", "b"};
  auto r = vote(std::span<const std::string>(a), 3);
  REQUIRE(r.winner);
  CHECK(*r.winner == "a");
  CHECK(r.agreeing == 2);

  std::vector<std::string> split{"a", "b", "c"};
  CHECK_FALSE(vote(std::span<const std::string>(split), 3).winner);

  // An absentee counts against the quorum.
  std::vector<std::string> one{"a"};
  CHECK_FALSE(vote(std::span<const std::string>(one), 3).winner);
}

TEST_CASE("vote matches a naive majority oracle") {
  const std::vector<std::string> alphabet{"a", "b", "c"};
  SUBCASE("exhaustive for n = 3 and n = 5") {
    for (std::size_t n : {3u, 5u}) {
      std::size_t combos = 1;
      for (std::size_t i = 0; i < n; ++i) combos *= 4;  // value or absent
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<std::string> xs;
        auto c = code;
        for (std::size_t i = 0; i < n; ++i, c /= 4)
          if (c % 4 < 3) xs.push_back(alphabet[c % 4]);
        auto r = vote(std::span<const std::string>(xs), n);
        auto expect = majority(xs, n);
        CHECK(r.winner == expect);
      }
    }
  }
  SUBCASE("random for n = 7") {
    Rng rng(11);
    for (int trial = 0; trial < 2000; ++trial) {
      std::vector<std::string> xs;
      for (int i = 0; i < 7; ++i)
        if (rng.below(5) != 0) xs.push_back(alphabet[rng.below(3)]);
      CHECK(vote(std::span<const std::string>(xs), 7).winner == majority(xs, 7));
    }
  }
}

TEST_CASE("failover skips a suspected replica") {
  std::vector<ReplicaSpec> specs{replica_on(1), replica_on(2)};
  ReplicaContainer c(config(Strategy::Failover, specs));
  Liveness_ live;
  live.state[1] = Liveness::Suspected;
  auto step = c.invoke("q", 100, live.fn());
  CHECK(has_note(step, "replica_skip"));
  REQUIRE(step.sends.size() == 1);
  CHECK(step.sends[0].host == NodeId{2});
  auto done = answer_all(c, step, specs, live.fn(), 103);
  REQUIRE(done.size() == 1);
  REQUIRE(done[0].completed);
  auto& s = std::get<Success>(done[0].completed->second);
  CHECK(s.response == "42");
  CHECK(s.responders == std::vector<NodeId>{NodeId{2}});
}

TEST_CASE("failover moves on after a timeout") {
  std::vector<ReplicaSpec> specs{replica_on(1), replica_on(2)};
  ReplicaContainer c(config(Strategy::Failover, specs));
  Liveness_ live;
  auto step = c.invoke("q", 0, live.fn());
  REQUIRE(step.timer);
  auto next = c.on_timeout(step.timer->second, step.timer_attempt, 10, live.fn());
  REQUIRE(next.sends.size() == 1);
  CHECK(next.sends[0].host == NodeId{2});
  // A stale timer is ignored.
  CHECK(c.on_timeout(step.timer->second, step.timer_attempt, 11, live.fn()).notes.empty());
}

TEST_CASE("active replication") {
  std::vector<ReplicaSpec> specs{replica_on(1), replica_on(2), replica_on(3)};
  Liveness_ live;

  SUBCASE("unanimous") {
    ReplicaContainer c(config(Strategy::ActiveReplication, specs));
    auto step = c.invoke("q", 0, live.fn());
    CHECK(step.sends.size() == 3);
    auto out = answer_all(c, step, specs, live.fn(), 2);
    // Decided early on the second matching answer; the third is late.
    ContainerStep decided;
    for (auto& o : out)
      if (o.completed) decided = o;
    REQUIRE(decided.completed);
    CHECK(std::get<Success>(decided.completed->second).responders.size() >= 2);
  }
  SUBCASE("unanimous with all answers collected before the timer") {
    ReplicaContainer c(config(Strategy::ActiveReplication, specs));
    auto step = c.invoke("q", 0, live.fn());
    std::vector<ContainerStep> out;
    for (const auto& s : step.sends) {
      auto [resp, _] = serve(specs[s.request.slot], s.request);
      out.push_back(c.on_response(resp, s.host, 1, live.fn()));
    }
    std::size_t completions = 0;
    for (auto& o : out) completions += o.completed.has_value();
    CHECK(completions == 1);
  }
  SUBCASE("one crashed replica still reaches majority of 3") {
    ReplicaContainer c(config(Strategy::ActiveReplication, specs));
    auto step = c.invoke("q", 0, live.fn());
    auto out = answer_all(c, step, specs, live.fn(), 2, {2});
    REQUIRE(out.size() == 2);
    REQUIRE(out[1].completed);
    CHECK(std::get<Success>(out[1].completed->second).responders.size() == 2);
  }
  SUBCASE("a corrupt minority is outvoted and degraded") {
    specs[1].behavior = ReplicaBehavior::Corrupt;
    ReplicaContainer c(config(Strategy::ActiveReplication, specs));
    auto step = c.invoke("q", 0, live.fn());
    std::vector<ContainerStep> out;
    for (std::uint32_t host : {2u, 1u, 3u}) {
      auto it = std::find_if(step.sends.begin(), step.sends.end(),
                             [&](auto& s) { return s.host.value == host; });
      auto [resp, _] = serve(specs[host - 1], it->request);
      out.push_back(c.on_response(resp, it->host, 1, live.fn()));
    }
    REQUIRE(out[2].completed);
    CHECK(std::get<Success>(out[2].completed->second).response == "42");
    CHECK(has_note(out[2], "replica_degraded"));
    CHECK(c.degraded(1));
  }
  SUBCASE("three-way split is NoQuorum") {
    specs[0].service.table["q"] = "x";
    specs[1].service.table["q"] = "y";
    specs[2].service.table["q"] = "z";
    ReplicaContainer c(config(Strategy::ActiveReplication, specs));
    auto step = c.invoke("q", 0, live.fn());
    auto out = answer_all(c, step, specs, live.fn(), 1);
    REQUIRE(out.back().completed);
    CHECK(std::holds_alternative<NoQuorum>(out.back().completed->second));
  }
  SUBCASE("nobody answers before the timer") {
    ReplicaContainer c(config(Strategy::ActiveReplication, specs));
    auto step = c.invoke("q", 0, live.fn());
    auto done = c.on_timeout(step.timer->second, step.timer_attempt, 10, live.fn());
    REQUIRE(done.completed);
    CHECK(std::holds_alternative<AllFailed>(done.completed->second));
  }
}

TEST_CASE("degrade, reinstate, exhaust") {
  std::vector<ReplicaSpec> specs{replica_on(1), replica_on(2), replica_on(3)};
  ReplicaContainer c(config(Strategy::Failover, specs));
  Liveness_ live;

  c.mark_degraded(NodeId{2}, 10, live.fn());
  CHECK(c.eligible(live.fn()) == std::vector<std::size_t>{0, 2});
  CHECK(c.availability(live.fn()) == doctest::Approx(2.0 / 3.0));

  auto back = c.on_liveness(NodeId{2}, Liveness::Alive, 20, live.fn());
  CHECK(has_note(back, "replica_reinstated"));
  CHECK(c.eligible(live.fn()).size() == 3);

  CHECK_THROWS_AS(c.mark_degraded(NodeId{7}, 30, live.fn()), Error);

  for (std::uint32_t h : {1u, 2u, 3u}) c.mark_degraded(NodeId{h}, 40, live.fn());
  auto step = c.invoke("q", 50, live.fn());
  REQUIRE(step.completed);
  CHECK(std::holds_alternative<AllFailed>(step.completed->second));
  CHECK(std::any_of(step.records.begin(), step.records.end(),
                    [](auto& r) { return r.metric == "svc_unavailable"; }));
}

TEST_CASE("alternatives keep the active replica count odd") {
  std::vector<ReplicaSpec> specs{replica_on(1), replica_on(2), replica_on(3)};
  ReplicaContainer c(config(Strategy::ActiveReplication, specs));
  Liveness_ live;
  live.state[2] = Liveness::Removed;
  c.add_replica(replica_on(9), live.fn());
  CHECK(c.replica_count() == 3);
  CHECK(c.replica(1).host == NodeId{9});

  ReplicaContainer f(config(Strategy::Failover, specs));
  f.add_replica(replica_on(9), live.fn());
  CHECK(f.replica_count() == 4);
}

// With every replica healthy and answering before the timer, both
// strategies return the same value.
TEST_CASE("failover and active replication agree on healthy replicas") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = 1 + 2 * rng.below(3);
    std::vector<ReplicaSpec> specs;
    const std::string answer = std::to_string(rng.below(1000));
    for (std::uint32_t i = 1; i <= n; ++i) specs.push_back(replica_on(i, answer));
    Liveness_ live;
    std::string got[2];
    int k = 0;
    for (auto strat : {Strategy::Failover, Strategy::ActiveReplication}) {
      ReplicaContainer c(config(strat, specs));
      auto step = c.invoke("q", 0, live.fn());
      for (auto& o : answer_all(c, step, specs, live.fn(), 1))
        if (o.completed) got[k] = std::get<Success>(o.completed->second).response;
      ++k;
    }
    CHECK(got[0] == answer);
    CHECK(got[1] == answer);
  }
}

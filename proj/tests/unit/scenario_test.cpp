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

#include <fstream>
#include <sstream>

#include "common/error.hpp"
#include "runtime/world.hpp"
#include "scenario/loader.hpp"
#include "scenario/metrics.hpp"
#include "scenario/verify.hpp"

using namespace dependsim;
using namespace dependsim::scenario;

namespace {

const char* kSmall = R"(name: small
run_length: 400
nodes: [a, b, c]
clusters:
  - {id: c1, members: [a, b, c]}
containers:
  - id: svc
    home: a
    strategy: failover
    service: {id: s, class: k, table: {q: r}}
    replicas:
      - host: b
workload:
  - {container: svc, start: 50, every: 20, count: 5, requests: [q]}
)";

std::string file(const std::string& name) {
  std::ifstream in(std::string(DEPENDSIM_SCENARIO_DIR) + "/" + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Trace run_scenario(const std::string& text, sim::TraceLevel level = sim::TraceLevel::Full) {
  runtime::World w(load_scenario_string(text), runtime::RunOptions{level});
  w.run();
  return w.trace();
}

bool has_violation(const std::vector<Violation>& vs, const std::string& name) {
  for (const auto& v : vs)
    if (v.invariant == name) return true;
  return false;
}

}  // namespace

TEST_CASE("loader resolves a small scenario") {
  auto s = load_scenario_string(kSmall);
  CHECK(s.name == "small");
  CHECK(s.nodes.size() == 3);
  REQUIRE(s.containers.size() == 1);
  CHECK(s.containers[0].home == NodeId{0});
  CHECK(s.containers[0].replicas[0].host == NodeId{1});
  CHECK(s.containers[0].replicas[0].service.table.at("q") == "r");
}

TEST_CASE("loader errors name the field and line") {
  std::string dangling = kSmall;
  dangling.replace(dangling.find("host: b"), 7, "host: zz");
  try {
    load_scenario_string(dangling);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "containers[0].replicas[0].host");
    CHECK(e.line() == 12);
    CHECK(std::string(e.what()).find("zz") != std::string::npos);
  }

  try {
    load_scenario_string(std::string(kSmall) + "bogus: 1\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.path() == "bogus");
    CHECK(e.line() == 15);
  }

  CHECK_THROWS_AS(load_scenario_string("nodes: [a, a]\nclusters: [{id: c, members: [a]}]\n"),
                  ConfigError);
  CHECK_THROWS_AS(load_scenario_string("nodes: [a\n"), ConfigError);
  CHECK_THROWS_AS(load_scenario_string(
                      "nodes: [a]\nclusters: [{id: c, members: [a]}]\n"
                      "timeline: [{at: 10, crash: q}]\n"),
                  ConfigError);
}

TEST_CASE("JSON scenarios load like YAML") {
  const char* json = R"({"name": "j", "run_length": 100, "nodes": ["a", "b"],
    "clusters": [{"id": "c1", "members": ["a", "b"]}]})";
  auto s = load_scenario_string(json);
  CHECK(s.name == "j");
  CHECK(s.run_length == 100);
  CHECK(s.nodes.size() == 2);
}

TEST_CASE("generated topologies form a binary tree") {
  auto s = load_scenario_string("generate: {nodes: 64, clusters: 4}\n");
  CHECK(s.nodes.size() == 64);
  REQUIRE(s.clusters.size() == 4);
  CHECK_FALSE(s.clusters[0].parent);
  CHECK(s.clusters[1].parent == ClusterId{0});
  CHECK(s.clusters[2].parent == ClusterId{0});
  CHECK(s.clusters[3].parent == ClusterId{1});
  CHECK(s.clusters[3].members.size() == 16);
}

TEST_CASE("patterns round-trip through their schema form") {
  auto s = load_scenario_file(std::string(DEPENDSIM_SCENARIO_DIR) + "/crash-and-heal.yaml");
  REQUIRE_FALSE(s.engine.patterns.empty());
  Json list = Json::array();
  for (const auto& p : s.engine.patterns) list.push_back(pattern_to_json(p));
  auto back = load_patterns_string(list.dump());
  REQUIRE(back.size() == s.engine.patterns.size());
  for (std::size_t i = 0; i < back.size(); ++i)
    CHECK(pattern_to_json(back[i]) == pattern_to_json(s.engine.patterns[i]));
}

TEST_CASE("metrics recomputed from the written trace match the live run") {
  auto trace = run_scenario(file("crash-and-heal.yaml"));
  auto reparsed = parse_jsonl(to_jsonl(trace));
  CHECK(compute_metrics(reparsed) == compute_metrics(trace));
  auto m = compute_metrics(trace);
  CHECK(m["false_suspicions"]["total"] == 0);
  CHECK(m["scenario"] == "crash-and-heal");
}

TEST_CASE("verifier accepts clean runs of every bundled scenario") {
  for (const char* name : {"crash-and-heal.yaml", "lossy-gossip.yaml",
                           "vote-under-corruption.yaml", "partition-and-propagate.yaml",
                           "vo-security-probe.yaml", "predict-and-learn.yaml"}) {
    CAPTURE(name);
    auto vs = verify(run_scenario(file(name)));
    for (const auto& v : vs) MESSAGE(to_json(v).dump());
    CHECK(vs.empty());
  }
}

TEST_CASE("verifier catches seeded corruption") {
  const auto clean = run_scenario(file("crash-and-heal.yaml"));

  SUBCASE("delivery at a crashed node") {
    auto t = clean;
    TraceEntry crash;
    for (const auto& e : t)
      if (e.kind == "crash") crash = e;
    TraceEntry bad{crash.t + 5, crash.seq + 1000000, "deliver", crash.node,
                   Json{{"msg", 999999}, {"from", "n1"}, {"type", "gossip"}}};
    auto at = std::find_if(t.begin(), t.end(), [&](const TraceEntry& e) { return e.t > bad.t; });
    bad.seq = std::prev(at)->seq;
    t.insert(at, bad);
    CHECK(has_violation(verify(t), "crash-isolation"));
  }
  SUBCASE("a notice applied twice") {
    auto t = clean;
    auto it = std::find_if(t.begin(), t.end(),
                           [](const TraceEntry& e) { return e.kind == "notice_applied"; });
    REQUIRE(it != t.end());
    t.insert(std::next(it), *it);
    CHECK(has_violation(verify(t), "exactly-once"));
  }
  SUBCASE("time running backwards") {
    auto t = clean;
    t[t.size() / 2].t = 0;
    CHECK(has_violation(verify(t), "monotonic-time"));
  }
  SUBCASE("missing header") {
    auto t = clean;
    t.erase(t.begin());
    CHECK_THROWS_AS(verify(t), Error);
  }
}

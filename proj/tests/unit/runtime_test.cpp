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

#include "runtime/world.hpp"
#include "scenario/loader.hpp"

using namespace dependsim;

namespace {

std::size_t count_kind(const Trace& t, const std::string& kind) {
  return static_cast<std::size_t>(std::count_if(
      t.begin(), t.end(), [&](const TraceEntry& e) { return e.kind == kind; }));
}

const char* kTwoNodes = R"(run_length: 2000
nodes: [a, b]
clusters: [{id: c1, members: [a, b]}]
detector: {t_min: 60}
timeline: [{at: 500, crash: b}]
)";

}  // namespace

TEST_CASE("a single node runs with the detector only") {
  runtime::World w(scenario::load_scenario_string(
      "run_length: 200\nnodes: [solo]\nclusters: [{id: c1, members: [solo]}]\n"));
  w.run();
  const auto& t = w.trace();
  REQUIRE(t.size() >= 2);
  CHECK(t.front().kind == "run_start");
  CHECK(t.front().detail["run_length"] == 200);
  CHECK(t.back().kind == "run_end");
  CHECK(w.detector(NodeId{0}) != nullptr);
  CHECK(w.detector(NodeId{0})->table().entries.at(NodeId{0}).counter > 0);
  CHECK(count_kind(t, "suspect") == 0);
}

TEST_CASE("a crashed peer is suspected and then removed") {
  runtime::World w(scenario::load_scenario_string(kTwoNodes));
  w.run();
  const auto& t = w.trace();
  CHECK(count_kind(t, "suspect") == 1);
  CHECK(count_kind(t, "remove") == 1);
  CHECK(w.detector(NodeId{1}) == nullptr);
  CHECK(w.detector(NodeId{0})->suspicion().at(NodeId{1}).state == Liveness::Removed);
}

TEST_CASE("events without a consumer are traced and the run continues") {
  auto wiring = runtime::Wiring::standard();
  wiring.consumers.erase(runtime::EventKind::Suspicion);
  runtime::World w(scenario::load_scenario_string(kTwoNodes), {}, wiring);
  w.run();
  const auto& t = w.trace();
  CHECK(count_kind(t, "unrouted_event") >= 1);
  CHECK(t.back().kind == "run_end");
}

TEST_CASE("the standard wiring covers every internal event kind") {
  const auto w = runtime::Wiring::standard();
  for (int k = 0; k <= static_cast<int>(runtime::EventKind::NoticeApplied); ++k)
    CHECK(w.consumers.count(static_cast<runtime::EventKind>(k)) == 1);
}

TEST_CASE("run_until splits a run without changing it") {
  auto s = scenario::load_scenario_string(kTwoNodes);
  runtime::World whole(s);
  whole.run();
  runtime::World parts(s);
  parts.run_until(300);
  parts.run_until(1234);
  parts.run();
  CHECK(to_jsonl(whole.trace()) == to_jsonl(parts.trace()));
}

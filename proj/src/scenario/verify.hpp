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

#include <string>
#include <vector>

#include "common/trace.hpp"

namespace dependsim::scenario {

/// Names of the trace-level invariants checked by `verify`.
inline constexpr const char* kInvariants[] = {
    "monotonic-time",      "causality",        "crash-isolation",
    "counter-monotonicity", "hierarchy-soundness", "no-routing-to-dead",
    "exactly-once",        "complete-mediation", "stop-on-failure",
    "alert-totality",      "suspicion-transitions", "vote-majority",
};

struct Violation {
  std::string invariant;
  SimTime t = 0;
  std::string node;
  std::string message;
};

/// Offline check of every trace-level invariant. The trace must start with
/// the `run_start` header; throws Error(MalformedTrace) otherwise.
std::vector<Violation> verify(const Trace& trace);

Json to_json(const Violation& v);

}  // namespace dependsim::scenario

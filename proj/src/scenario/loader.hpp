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

#include "scenario/scenario.hpp"

namespace dependsim::scenario {

/// Parses and validates a scenario (YAML, or JSON as a YAML subset).
/// Throws ConfigError carrying the field path and source line.
Scenario load_scenario_string(const std::string& text);
Scenario load_scenario_file(const std::string& path);

/// Parses a list of patterns in the scenario's `analysis.patterns` form.
std::vector<analysis::Pattern> load_patterns_string(const std::string& text);

/// Inverse of `load_patterns_string` for one pattern.
Json pattern_to_json(const analysis::Pattern& p);

}  // namespace dependsim::scenario

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

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "common/types.hpp"
#include "security/policy.hpp"

namespace dependsim::oracle {

/// Value held by more than n/2 of the responses, counted pairwise.
std::optional<std::string> majority(const std::vector<std::string>& responses,
                                    std::size_t n);

/// Access rules evaluated literally from their description, one flat
/// condition chain with no shared code with the production evaluator.
security::Effect access(const security::AccessRequest& request,
                        const security::Directory& directory,
                        const security::SecurityPolicy& policy);

/// Arithmetic mean of the last k values, summed in long double.
double mean_of_last(const std::vector<double>& values, std::size_t k);

/// Latest time the root may learn of a leaf suspicion: local detection,
/// one summary interval per tree edge in each direction of the up-then-down
/// relay path, and one network hop.
SimTime hierarchical_bound(SimTime local_detection, std::size_t tree_depth,
                           SimTime summary_interval, SimTime base_latency);

}  // namespace dependsim::oracle

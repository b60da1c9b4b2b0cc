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
#include <map>
#include <optional>
#include <span>

namespace dependsim::container {

template <class T>
struct VoteResult {
  std::optional<T> winner;  // nullopt means NoQuorum
  std::size_t agreeing = 0;
};

/// Strict-majority vote over exact value equality. `n` is the configured
/// replica count, so absent replicas count against the quorum.
template <class T>
VoteResult<T> vote(std::span<const T> responses, std::size_t n) {
  std::map<T, std::size_t> tally;
  for (const auto& r : responses) ++tally[r];
  VoteResult<T> out;
  for (const auto& [value, count] : tally) {
    if (2 * count > n) {
      out.winner = value;
      out.agreeing = count;
      return out;
    }
    out.agreeing = std::max(out.agreeing, count);
  }
  return out;
}

}  // namespace dependsim::container

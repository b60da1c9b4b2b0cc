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

#include "common/trace.hpp"

namespace dependsim::scenario {

/// Aggregate run metrics recomputed from a trace alone. Keys appear in a
/// fixed order so identical traces give byte-identical reports.
///
/// A suspicion is false when its host was up and did not crash within
/// `t_max` afterwards. A crash is expected to be noticed by every peer in
/// its cluster that stays up for the whole outage.
Json compute_metrics(const Trace& trace);

}  // namespace dependsim::scenario

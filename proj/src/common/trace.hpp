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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "common/types.hpp"

namespace dependsim {

using Json = nlohmann::ordered_json;

/// One line of the JSON Lines trace. Keys are emitted as t, seq, kind, node,
/// detail; `seq` is the issue number of the event being processed when the
/// entry was written (0 for run setup).
struct TraceEntry {
  SimTime t = 0;
  std::uint64_t seq = 0;
  std::string kind;
  std::string node;
  Json detail = Json::object();

  bool operator==(const TraceEntry&) const = default;
};

using Trace = std::vector<TraceEntry>;

std::string to_json_line(const TraceEntry& e);
void write_jsonl(std::ostream& out, const Trace& trace);
std::string to_jsonl(const Trace& trace);

/// Throws Error(MalformedTrace) on syntax or schema problems.
Trace parse_jsonl(std::istream& in);
Trace parse_jsonl(const std::string& text);

/// Trace-level annotation produced by a module; the runtime stamps it with
/// time, seq and node before appending.
struct TraceNote {
  std::string kind;
  Json detail = Json::object();
};

using TraceNotes = std::vector<TraceNote>;

}  // namespace dependsim

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

#include "common/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "common/error.hpp"

namespace dependsim {

std::string to_json_line(const TraceEntry& e) {
  Json j = Json::object();
  j["t"] = e.t;
  j["seq"] = e.seq;
  j["kind"] = e.kind;
  j["node"] = e.node;
  j["detail"] = e.detail;
  return j.dump();
}

void write_jsonl(std::ostream& out, const Trace& trace) {
  for (const auto& e : trace) out << to_json_line(e) << '\n';
}

std::string to_jsonl(const Trace& trace) {
  std::ostringstream out;
  write_jsonl(out, trace);
  return out.str();
}

Trace parse_jsonl(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const nlohmann::json::exception& ex) {
      throw Error(ErrorCode::MalformedTrace,
                  "line " + std::to_string(lineno) + ": " + ex.what());
    }
    auto bad = [&](const char* what) {
      return Error(ErrorCode::MalformedTrace,
                   "line " + std::to_string(lineno) + ": " + what);
    };
    if (!j.is_object()) throw bad("entry is not an object");
    if (!j.contains("t") || !j["t"].is_number_integer()) throw bad("missing t");
    if (!j.contains("seq") || !j["seq"].is_number_integer())
      throw bad("missing seq");
    if (!j.contains("kind") || !j["kind"].is_string()) throw bad("missing kind");
    if (!j.contains("node") || !j["node"].is_string()) throw bad("missing node");
    if (!j.contains("detail") || !j["detail"].is_object())
      throw bad("missing detail");
    TraceEntry e;
    e.t = j["t"].get<SimTime>();
    e.seq = j["seq"].get<std::uint64_t>();
    e.kind = j["kind"].get<std::string>();
    e.node = j["node"].get<std::string>();
    e.detail = std::move(j["detail"]);
    trace.push_back(std::move(e));
  }
  return trace;
}

Trace parse_jsonl(const std::string& text) {
  std::istringstream in(text);
  return parse_jsonl(in);
}

}  // namespace dependsim

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

#include "scenario/metrics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "common/error.hpp"

namespace dependsim::scenario {
namespace {

std::string str(const Json& d, const char* key) {
  auto it = d.find(key);
  return it != d.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::int64_t num(const Json& d, const char* key) {
  auto it = d.find(key);
  return it != d.end() && it->is_number() ? it->get<std::int64_t>() : 0;
}

bool flag(const Json& d, const char* key) {
  auto it = d.find(key);
  return it != d.end() && it->is_boolean() && it->get<bool>();
}

struct Crash {
  std::string node;
  SimTime at;
  SimTime until;  // recover time, or max
  std::vector<std::pair<std::string, SimTime>> suspectors;  // first per observer
};

bool up_during(const std::map<std::string, std::vector<std::pair<SimTime, SimTime>>>& down,
               const std::string& n, SimTime from, SimTime to) {
  auto it = down.find(n);
  if (it == down.end()) return true;
  for (const auto& [a, b] : it->second)
    if (a <= to && b >= from) return false;
  return true;
}

}  // namespace

Json compute_metrics(const Trace& trace) {
  if (trace.empty() || trace.front().kind != "run_start")
    throw Error(ErrorCode::MalformedTrace, "trace does not start with run_start");
  const auto& hdr = trace.front().detail;
  const auto nodes = hdr.at("nodes").get<std::vector<std::string>>();
  const SimTime warmup = hdr.value("warmup", SimTime{0});
  const SimTime t_max = hdr.value("t_max", SimTime{0});
  std::map<std::string, std::string> cluster_of;
  for (const auto& c : hdr.at("clusters"))
    for (const auto& m : c.at("members"))
      cluster_of[m.get<std::string>()] = c.at("id").get<std::string>();
  constexpr SimTime kForever = std::numeric_limits<SimTime>::max();

  // First pass: down intervals.
  std::map<std::string, std::vector<std::pair<SimTime, SimTime>>> down;
  std::vector<Crash> crashes;
  {
    std::map<std::string, std::size_t> open;
    for (const auto& e : trace) {
      if (e.kind == "crash") {
        open[e.node] = crashes.size();
        crashes.push_back({e.node, e.t, kForever, {}});
      } else if (e.kind == "recover" && open.count(e.node)) {
        crashes[open[e.node]].until = e.t;
        open.erase(e.node);
      }
    }
    for (const auto& c : crashes) down[c.node].emplace_back(c.at, c.until);
  }
  auto crash_covering = [&](const std::string& host, SimTime t) -> Crash* {
    for (auto& c : crashes)
      if (c.node == host && c.at <= t && t < c.until) return &c;
    return nullptr;
  };

  std::int64_t false_total = 0, false_after = 0;
  std::int64_t issued = 0, succeeded = 0, no_quorum = 0, all_failed = 0;
  std::int64_t plans = 0, completed = 0, alerted = 0;
  std::vector<std::int64_t> latencies;
  std::set<std::pair<std::string, std::int64_t>> created;
  std::map<std::string, std::int64_t> applied_per_node;
  std::int64_t duplicates = 0, incomplete = 0;
  std::int64_t allow = 0, deny = 0;

  for (const auto& e : trace) {
    const auto& d = e.detail;
    if (e.kind == "suspect") {
      const auto host = str(d, "host");
      if (auto* c = crash_covering(host, e.t)) {
        auto& s = c->suspectors;
        if (std::none_of(s.begin(), s.end(), [&](auto& p) { return p.first == e.node; }))
          s.emplace_back(e.node, e.t);
      } else {
        bool crashes_soon = false;
        for (const auto& c : crashes)
          crashes_soon = crashes_soon ||
                         (c.node == host && c.at >= e.t && c.at <= e.t + t_max);
        if (!crashes_soon) {
          ++false_total;
          if (e.t >= warmup) ++false_after;
        }
      }
    } else if (e.kind == "invoke") {
      ++issued;
    } else if (e.kind == "invoke_done") {
      const auto o = str(d, "outcome");
      if (o == "success") ++succeeded;
      else if (o == "no_quorum") ++no_quorum;
      else ++all_failed;
    } else if (e.kind == "plan") {
      ++plans;
    } else if (e.kind == "plan_done") {
      if (flag(d, "completed")) ++completed;
      if (flag(d, "alerted")) ++alerted;
      latencies.push_back(num(d, "latency"));
    } else if (e.kind == "notice_applied") {
      created.insert({str(d, "origin"), num(d, "origin_seq")});
      ++applied_per_node[e.node];
    } else if (e.kind == "notice_dup") {
      ++duplicates;
    } else if (e.kind == "propagation_incomplete") {
      ++incomplete;
    } else if (e.kind == "audit") {
      (str(d, "decision") == "allow" ? allow : deny) += 1;
    }
  }

  Json report = Json::object();
  report["scenario"] = hdr.value("scenario", std::string());
  report["seed"] = hdr.value("seed", std::uint64_t{0});
  report["run_length"] = hdr.value("run_length", SimTime{0});

  Json detection = Json::array();
  for (const auto& c : crashes) {
    Json x = Json::object();
    x["node"] = c.node;
    x["crashed_at"] = c.at;
    // Observers expected to notice: cluster peers up for the whole outage.
    std::int64_t expected = 0;
    const SimTime end = c.until == kForever ? trace.back().t : c.until;
    for (const auto& n : nodes)
      if (n != c.node && cluster_of[n] == cluster_of[c.node] &&
          up_during(down, n, c.at, end))
        ++expected;
    if (c.suspectors.empty()) {
      x["first_suspector"] = nullptr;
      x["first_latency"] = nullptr;
      x["last_suspector"] = nullptr;
      x["last_latency"] = nullptr;
    } else {
      x["first_suspector"] = c.suspectors.front().first;
      x["first_latency"] = c.suspectors.front().second - c.at;
      x["last_suspector"] = c.suspectors.back().first;
      x["last_latency"] = c.suspectors.back().second - c.at;
    }
    x["suspectors"] = c.suspectors.size();
    x["expected"] = expected;
    detection.push_back(std::move(x));
  }
  report["detection"] = std::move(detection);

  Json fs = Json::object();
  fs["total"] = false_total;
  fs["after_warmup"] = false_after;
  report["false_suspicions"] = std::move(fs);

  Json inv = Json::object();
  inv["issued"] = issued;
  inv["succeeded"] = succeeded;
  inv["no_quorum"] = no_quorum;
  inv["all_failed"] = all_failed;
  inv["success_rate"] = issued ? static_cast<double>(succeeded) / issued : 0.0;
  report["invocations"] = std::move(inv);

  Json rep = Json::object();
  rep["plans"] = plans;
  rep["completed"] = completed;
  rep["alerted"] = alerted;
  double mean = 0;
  for (auto l : latencies) mean += static_cast<double>(l);
  rep["latency_mean"] = latencies.empty() ? 0.0 : mean / latencies.size();
  rep["latency_max"] =
      latencies.empty() ? 0 : *std::max_element(latencies.begin(), latencies.end());
  rep["latencies"] = latencies;
  report["repair"] = std::move(rep);

  Json nt = Json::object();
  nt["created"] = created.size();
  Json per = Json::object();
  for (const auto& n : nodes) per[n] = applied_per_node.count(n) ? applied_per_node[n] : 0;
  nt["applied_per_node"] = std::move(per);
  nt["duplicates"] = duplicates;
  nt["incomplete"] = incomplete;
  report["notices"] = std::move(nt);

  Json au = Json::object();
  au["allow"] = allow;
  au["deny"] = deny;
  au["total"] = allow + deny;
  report["audit"] = std::move(au);
  return report;
}

}  // namespace dependsim::scenario

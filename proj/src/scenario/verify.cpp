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

#include "scenario/verify.hpp"

#include <map>
#include <optional>
#include <set>

#include "common/error.hpp"

namespace dependsim::scenario {
namespace {

struct Header {
  std::vector<std::string> nodes;
  std::map<std::string, std::string> cluster_of;
  std::size_t tree_depth = 0;
  SimTime base_latency = 1;
  SimTime retry_interval = 1;
  std::uint64_t retry_max = 0;
  SimTime run_length = 0;
  bool full = true;
};

Header read_header(const Trace& trace) {
  if (trace.empty() || trace.front().kind != "run_start")
    throw Error(ErrorCode::MalformedTrace, "trace does not start with run_start");
  const auto& d = trace.front().detail;
  Header h;
  try {
    h.nodes = d.at("nodes").get<std::vector<std::string>>();
    std::map<std::string, std::string> parent;
    for (const auto& c : d.at("clusters")) {
      const auto id = c.at("id").get<std::string>();
      for (const auto& m : c.at("members")) h.cluster_of[m.get<std::string>()] = id;
      if (!c.at("parent").is_null()) parent[id] = c.at("parent").get<std::string>();
    }
    for (const auto& [id, p] : parent) {
      std::size_t depth = 0;
      for (auto cur = id; parent.count(cur) && depth <= parent.size(); cur = parent[cur])
        ++depth;
      h.tree_depth = std::max(h.tree_depth, depth);
    }
    h.base_latency = d.at("base_latency").get<SimTime>();
    h.retry_interval = d.at("retry_interval").get<SimTime>();
    h.retry_max = d.at("retry_max").get<std::uint64_t>();
    h.run_length = d.at("run_length").get<SimTime>();
    h.full = d.at("trace_level").get<std::string>() == "full";
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedTrace, std::string("bad run_start: ") + e.what());
  }
  return h;
}

std::string str(const Json& d, const char* key) {
  auto it = d.find(key);
  return it != d.end() && it->is_string() ? it->get<std::string>() : std::string();
}

std::int64_t num(const Json& d, const char* key, std::int64_t fallback = 0) {
  auto it = d.find(key);
  return it != d.end() && it->is_number() ? it->get<std::int64_t>() : fallback;
}

bool flag(const Json& d, const char* key) {
  auto it = d.find(key);
  return it != d.end() && it->is_boolean() && it->get<bool>();
}

using NoticeKey = std::pair<std::string, std::int64_t>;  // (origin, seq)

struct NodeLife {
  bool up = true;
  std::map<std::string, std::string> view;  // host -> Alive/Suspected/Removed
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> last_seen;
  std::set<NoticeKey> applied;
  std::map<std::int64_t, std::string> audits;  // audit id -> decision
  std::set<std::int64_t> requests;             // audit ids awaiting an audit
  // repair bookkeeping
  std::map<std::int64_t, std::int64_t> plan_of_diagnosis;
  std::set<std::int64_t> diagnoses;
  std::map<std::int64_t, std::int64_t> plan_diag;
  std::set<std::int64_t> failed_plans;
  std::set<std::int64_t> alerted_plans;
  std::set<std::int64_t> finished_plans;
};

}  // namespace

std::vector<Violation> verify(const Trace& trace) {
  const Header h = read_header(trace);
  std::vector<Violation> out;
  auto violate = [&](const char* inv, const TraceEntry& e, std::string msg) {
    out.push_back(Violation{inv, e.t, e.node, std::move(msg)});
  };

  std::map<std::string, NodeLife> life;
  for (const auto& n : h.nodes) life[n];
  std::map<std::string, SimTime> crashed_at;  // currently down nodes
  std::map<std::string, std::vector<std::pair<SimTime, SimTime>>> down;  // intervals
  std::map<std::int64_t, std::pair<SimTime, std::string>> sends;
  std::map<NoticeKey, SimTime> notices;  // created at
  std::map<std::pair<std::string, NoticeKey>, int> applied_total;
  SimTime last_t = trace.front().t;
  SimTime end_t = trace.back().t;

  auto close_life = [&](const std::string& node, const TraceEntry& e) {
    // Plans still running when a node dies are abandoned with it.
    (void)e;
    life[node] = NodeLife{};
    life[node].up = false;
  };

  for (const auto& e : trace) {
    const auto& d = e.detail;
    if (e.t < last_t)
      violate("monotonic-time", e, "time went back from " + std::to_string(last_t));
    last_t = std::max(last_t, e.t);

    if (e.kind == "crash") {
      crashed_at[e.node] = e.t;
      close_life(e.node, e);
      continue;
    }
    if (e.kind == "recover") {
      if (crashed_at.count(e.node))
        down[e.node].emplace_back(crashed_at[e.node], e.t);
      crashed_at.erase(e.node);
      life[e.node] = NodeLife{};
      continue;
    }
    if (!e.node.empty() && crashed_at.count(e.node) && e.kind != "drop")
      violate("crash-isolation", e, e.kind + " at a crashed node");

    auto& me = life[e.node];

    if (e.kind == "send") {
      sends[num(d, "msg")] = {e.t, e.node};
      if (str(d, "type") == "invoke_request") {
        const auto to = str(d, "to");
        auto it = me.view.find(to);
        if (it != me.view.end() && it->second == "removed")
          violate("no-routing-to-dead", e, "invocation sent to removed " + to);
      }
    } else if (e.kind == "deliver") {
      auto it = sends.find(num(d, "msg"));
      if (it == sends.end()) {
        if (h.full) violate("causality", e, "delivery without a send");
      } else if (e.t < it->second.first + h.base_latency) {
        violate("causality", e, "delivered before send time + base latency");
      }
    } else if (e.kind == "suspect" || e.kind == "refute" || e.kind == "remove" ||
               e.kind == "rejoin") {
      const auto host = str(d, "host");
      const auto from = str(d, "from");
      auto& state = me.view[host];
      if (state.empty()) state = "alive";
      static const std::map<std::string, std::pair<std::string, std::string>> legal = {
          {"suspect", {"alive", "suspected"}},
          {"refute", {"suspected", "alive"}},
          {"remove", {"suspected", "removed"}},
          {"rejoin", {"removed", "alive"}},
      };
      const auto& [need, next] = legal.at(e.kind);
      if (state != need || from != need)
        violate("suspicion-transitions", e,
                e.kind + " of " + host + " while " + state);
      state = next;
      const std::pair<std::int64_t, std::int64_t> seen{num(d, "incarnation"),
                                                       num(d, "counter")};
      auto prev = me.last_seen.find(host);
      if (prev != me.last_seen.end() && seen < prev->second)
        violate("counter-monotonicity", e, "counter of " + host + " went back");
      me.last_seen[host] = seen;
    } else if (e.kind == "summary") {
      for (const auto& s : d.at("suspected")) {
        const auto host = s.get<std::string>();
        auto it = me.view.find(host);
        if (it == me.view.end() || it->second == "alive")
          violate("hierarchy-soundness", e,
                  host + " reported suspected but alive in the local view");
      }
    } else if (e.kind == "notice_applied") {
      const NoticeKey key{str(d, "origin"), num(d, "origin_seq")};
      if (!notices.count(key)) notices[key] = e.t;
      if (!me.applied.insert(key).second)
        violate("exactly-once", e,
                "notice " + key.first + "#" + std::to_string(key.second) +
                    " applied twice");
      ++applied_total[{e.node, key}];
    } else if (e.kind == "access_request") {
      me.requests.insert(num(d, "audit_id"));
    } else if (e.kind == "audit") {
      const auto id = num(d, "audit_id");
      if (!me.requests.erase(id))
        violate("complete-mediation", e, "audit without an access request");
      me.audits[id] = str(d, "decision");
    } else if (e.kind == "access_effect") {
      auto it = me.audits.find(num(d, "audit_id"));
      if (it == me.audits.end() || it->second != "allow")
        violate("complete-mediation", e,
                "effect on " + str(d, "object") + " without an allow audit");
    } else if (e.kind == "diagnosis") {
      me.diagnoses.insert(num(d, "id"));
    } else if (e.kind == "plan") {
      me.plan_of_diagnosis[num(d, "diagnosis")] = num(d, "plan_id");
      me.plan_diag[num(d, "plan_id")] = num(d, "diagnosis");
    } else if (e.kind == "repair_step") {
      const auto plan = num(d, "plan_id");
      const auto action = str(d, "action");
      if (me.failed_plans.count(plan) && action != "alert_operator")
        violate("stop-on-failure", e,
                action + " ran after a failed step of plan " + std::to_string(plan));
      if (!flag(d, "ok")) me.failed_plans.insert(plan);
    } else if (e.kind == "alert_operator") {
      me.alerted_plans.insert(num(d, "plan_id"));
    } else if (e.kind == "plan_done") {
      const auto plan = num(d, "plan_id");
      me.finished_plans.insert(plan);
      if (!flag(d, "completed") && !me.alerted_plans.count(plan))
        violate("alert-totality", e,
                "plan " + std::to_string(plan) + " ended without completion or alert");
    } else if (e.kind == "vote_result") {
      if (flag(d, "quorum") && 2 * num(d, "agreeing") <= num(d, "n"))
        violate("vote-majority", e, "quorum declared without a strict majority");
    } else if (e.kind == "run_end") {
      end_t = e.t;
    }

    // A diagnosis must be answered by a plan in the same step.
    if (e.kind != "diagnosis") {
      for (auto it = me.diagnoses.begin(); it != me.diagnoses.end();) {
        if (me.plan_of_diagnosis.count(*it)) {
          it = me.diagnoses.erase(it);
        } else if (e.kind != "prediction" && e.kind != "plan") {
          violate("alert-totality", e,
                  "diagnosis " + std::to_string(*it) + " has no plan");
          it = me.diagnoses.erase(it);
        } else {
          ++it;
        }
      }
    }
  }

  // Nodes that stayed up from a notice's creation to the end must have
  // applied it, unless propagation could still be in flight.
  const SimTime settle = h.retry_interval * static_cast<SimTime>(h.retry_max + 1) *
                         static_cast<SimTime>(2 * h.tree_depth + 2);
  for (const auto& [key, created] : notices) {
    if (created + settle > end_t) continue;
    for (const auto& n : h.nodes) {
      if (crashed_at.count(n)) continue;
      bool interrupted = false;
      for (const auto& [a, b] : down[n]) interrupted = interrupted || b >= created;
      if (interrupted) continue;
      if (!applied_total.count({n, key})) {
        TraceEntry at;
        at.t = end_t;
        at.node = n;
        violate("exactly-once", at,
                "notice " + key.first + "#" + std::to_string(key.second) +
                    " never applied");
      }
    }
  }
  return out;
}

Json to_json(const Violation& v) {
  Json j = Json::object();
  j["invariant"] = v.invariant;
  j["t"] = v.t;
  j["node"] = v.node;
  j["message"] = v.message;
  return j;
}

}  // namespace dependsim::scenario

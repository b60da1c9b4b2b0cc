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

#include "scenario/loader.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "common/error.hpp"

namespace dependsim::scenario {
namespace {

struct Field {
  YAML::Node node;
  std::string path;

  int line() const { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }
  bool has(const char* key) const { return node.IsMap() && node[key]; }
  Field operator[](const char* key) const {
    return Field{node[key], path.empty() ? key : path + "." + key};
  }
  Field at(std::size_t i) const {
    return Field{node[i], path + "[" + std::to_string(i) + "]"};
  }
  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(path, line(), message);
  }
};

template <class T>
T as(const Field& f, const char* what) {
  if (!f.node || !f.node.IsScalar()) f.fail(std::string("expected ") + what);
  try {
    return f.node.as<T>();
  } catch (const YAML::Exception&) {
    f.fail(std::string("expected ") + what);
  }
}

std::string str(const Field& f) { return as<std::string>(f, "a string"); }
std::int64_t integer(const Field& f) { return as<std::int64_t>(f, "an integer"); }
double real(const Field& f) { return as<double>(f, "a number"); }
bool boolean(const Field& f) { return as<bool>(f, "true or false"); }

std::int64_t non_negative(const Field& f) {
  auto v = integer(f);
  if (v < 0) f.fail("must be >= 0");
  return v;
}

void expect_map(const Field& f) {
  if (!f.node.IsMap()) f.fail("expected a mapping");
}

void expect_list(const Field& f) {
  if (!f.node.IsSequence()) f.fail("expected a list");
}

// Rejects unknown keys so typos do not silently fall back to defaults.
void check_keys(const Field& f, std::initializer_list<const char*> allowed) {
  expect_map(f);
  for (auto it = f.node.begin(); it != f.node.end(); ++it) {
    const auto key = it->first.as<std::string>();
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) {
      Field bad{it->first, f.path.empty() ? key : f.path + "." + key};
      bad.fail("unknown field '" + key + "'");
    }
  }
}

std::vector<std::string> strings(const Field& f) {
  std::vector<std::string> out;
  if (f.node.IsScalar()) return {str(f)};
  expect_list(f);
  for (std::size_t i = 0; i < f.node.size(); ++i) out.push_back(str(f.at(i)));
  return out;
}

class Loader {
 public:
  Scenario load(const YAML::Node& root) {
    Field r{root, ""};
    if (!root || root.IsNull()) r.fail("empty scenario");
    check_keys(r, {"name", "seed", "run_length", "network", "nodes", "clusters",
                   "generate", "detector", "containers", "workload", "analysis",
                   "repair", "security", "timeline", "feeds"});
    if (r.has("name")) s_.name = str(r["name"]);
    if (r.has("seed")) s_.seed = static_cast<std::uint64_t>(non_negative(r["seed"]));
    if (r.has("run_length")) s_.run_length = non_negative(r["run_length"]);
    network(r);
    topology(r);
    detector(r);
    containers(r);
    workload(r);
    analysis(r);
    repair(r);
    security(r);
    timeline(r);
    feeds(r);
    validate(s_);
    return std::move(s_);
  }

 private:
  NodeId node(const Field& f) {
    const auto name = str(f);
    for (std::uint32_t i = 0; i < s_.nodes.size(); ++i)
      if (s_.nodes[i] == name) return NodeId{i};
    f.fail("undeclared node '" + name + "'");
  }

  // A partition side lists node names and/or cluster ids.
  std::vector<NodeId> side(const Field& f) {
    std::vector<NodeId> out;
    const auto items = f.node.IsScalar() ? std::vector<Field>{f} : [&] {
      expect_list(f);
      std::vector<Field> v;
      for (std::size_t i = 0; i < f.node.size(); ++i) v.push_back(f.at(i));
      return v;
    }();
    for (const auto& item : items) {
      const auto name = str(item);
      bool found = false;
      for (const auto& c : s_.clusters)
        if (c.name == name) {
          out.insert(out.end(), c.members.begin(), c.members.end());
          found = true;
        }
      if (!found) out.push_back(node(item));
    }
    return out;
  }

  void network(const Field& r) {
    if (!r.has("network")) return;
    auto f = r["network"];
    check_keys(f, {"base_latency", "jitter", "loss"});
    if (f.has("base_latency")) {
      s_.network.base_latency = integer(f["base_latency"]);
      if (s_.network.base_latency < 1) f["base_latency"].fail("must be >= 1");
    }
    if (f.has("jitter")) s_.network.jitter = non_negative(f["jitter"]);
    if (f.has("loss")) {
      s_.network.loss_probability = real(f["loss"]);
      if (!(s_.network.loss_probability >= 0 && s_.network.loss_probability <= 1))
        f["loss"].fail("must be in [0, 1]");
    }
  }

  void topology(const Field& r) {
    if (r.has("generate")) {
      if (r.has("nodes") || r.has("clusters"))
        r["generate"].fail("use either generate or nodes/clusters");
      auto g = r["generate"];
      check_keys(g, {"nodes", "clusters", "prefix"});
      const auto n = non_negative(g["nodes"]);
      const auto c = g.has("clusters") ? non_negative(g["clusters"]) : 1;
      if (c < 1 || n < c) g.fail("need at least one node per cluster");
      generate_topology(s_, static_cast<std::size_t>(n), static_cast<std::size_t>(c),
                        g.has("prefix") ? str(g["prefix"]) : "n");
      return;
    }
    if (!r.has("nodes")) r.fail("missing field 'nodes'");
    auto nodes = r["nodes"];
    expect_list(nodes);
    std::set<std::string> seen;
    for (std::size_t i = 0; i < nodes.node.size(); ++i) {
      auto name = str(nodes.at(i));
      if (!seen.insert(name).second) nodes.at(i).fail("duplicate node '" + name + "'");
      s_.nodes.push_back(name);
    }
    if (!r.has("clusters")) {
      membership::Cluster all;
      all.name = "c1";
      for (std::uint32_t i = 0; i < s_.nodes.size(); ++i) all.members.push_back({i});
      s_.clusters.push_back(std::move(all));
      return;
    }
    auto cl = r["clusters"];
    expect_list(cl);
    std::vector<std::pair<std::string, Field>> parents;
    for (std::size_t i = 0; i < cl.node.size(); ++i) {
      auto c = cl.at(i);
      check_keys(c, {"id", "members", "parent"});
      membership::Cluster out;
      out.name = str(c["id"]);
      auto members = c["members"];
      expect_list(members);
      for (std::size_t m = 0; m < members.node.size(); ++m)
        out.members.push_back(node(members.at(m)));
      std::sort(out.members.begin(), out.members.end());
      if (c.has("parent")) parents.emplace_back(out.name, c["parent"]);
      s_.clusters.push_back(std::move(out));
    }
    for (const auto& [child, pf] : parents) {
      const auto pname = str(pf);
      std::optional<ClusterId> pid;
      for (std::uint32_t i = 0; i < s_.clusters.size(); ++i)
        if (s_.clusters[i].name == pname) pid = ClusterId{i};
      if (!pid) pf.fail("undeclared cluster '" + pname + "'");
      for (auto& c : s_.clusters)
        if (c.name == child) c.parent = pid;
    }
    try {
      membership::ClusterTopology(s_.clusters, s_.nodes.size());
    } catch (const ConfigError& e) {
      throw ConfigError("clusters", cl.line(), e.what());
    }
  }

  void detector(const Field& r) {
    SimTime gi = 10;
    if (r.has("detector") && r["detector"].has("gossip_interval"))
      gi = integer(r["detector"]["gossip_interval"]);
    if (gi < 1) r["detector"]["gossip_interval"].fail("must be >= 1");
    auto& d = s_.detector = membership::DetectorParams::for_interval(gi);
    if (!r.has("detector")) return;
    auto f = r["detector"];
    check_keys(f, {"gossip_interval", "fanout", "k", "window", "t_min", "t_max",
                   "t_bootstrap", "t_cleanup", "summary_interval",
                   "peer_selection"});
    if (f.has("fanout")) d.fanout = static_cast<std::uint32_t>(non_negative(f["fanout"]));
    if (f.has("k")) d.k = real(f["k"]);
    if (f.has("window")) d.window = static_cast<std::size_t>(non_negative(f["window"]));
    if (f.has("t_min")) d.t_min = non_negative(f["t_min"]);
    if (f.has("t_max")) d.t_max = non_negative(f["t_max"]);
    if (f.has("t_bootstrap")) d.t_bootstrap = non_negative(f["t_bootstrap"]);
    if (f.has("t_cleanup")) d.t_cleanup = non_negative(f["t_cleanup"]);
    if (f.has("summary_interval")) d.summary_interval = non_negative(f["summary_interval"]);
    if (f.has("peer_selection")) {
      const auto v = str(f["peer_selection"]);
      if (v == "uniform")
        d.selection = membership::PeerSelection::Uniform;
      else if (v == "shuffled_cycle")
        d.selection = membership::PeerSelection::ShuffledCycle;
      else
        f["peer_selection"].fail("expected uniform or shuffled_cycle");
    }
  }

  container::ServiceSpec service(const Field& f,
                                 const container::ServiceSpec* base) {
    container::ServiceSpec out = base ? *base : container::ServiceSpec{};
    check_keys(f, {"id", "class", "table"});
    if (f.has("id")) out.service_id = str(f["id"]);
    if (f.has("class")) out.equivalence_class = str(f["class"]);
    if (f.has("table")) {
      auto t = f["table"];
      expect_map(t);
      out.table.clear();
      for (auto it = t.node.begin(); it != t.node.end(); ++it)
        out.table[it->first.as<std::string>()] =
            str(Field{it->second, t.path + "." + it->first.as<std::string>()});
    }
    if (out.service_id.empty()) f.fail("service id is required");
    if (out.equivalence_class.empty()) out.equivalence_class = out.service_id;
    return out;
  }

  container::ReplicaSpec replica(const Field& f,
                                 const container::ServiceSpec& base) {
    check_keys(f, {"host", "behavior", "wrong_value", "delay", "service"});
    container::ReplicaSpec r;
    r.host = node(f["host"]);
    r.service = f.has("service") ? service(f["service"], &base) : base;
    if (f.has("behavior")) {
      const auto b = str(f["behavior"]);
      if (b == "healthy")
        r.behavior = container::ReplicaBehavior::Healthy;
      else if (b == "corrupt")
        r.behavior = container::ReplicaBehavior::Corrupt;
      else if (b == "slow")
        r.behavior = container::ReplicaBehavior::Slow;
      else
        f["behavior"].fail("expected healthy, corrupt or slow");
    }
    if (f.has("wrong_value")) r.wrong_value = str(f["wrong_value"]);
    if (f.has("delay")) r.slow_delay = non_negative(f["delay"]);
    return r;
  }

  void containers(const Field& r) {
    if (!r.has("containers")) return;
    auto list = r["containers"];
    expect_list(list);
    std::set<std::string> ids;
    for (std::size_t i = 0; i < list.node.size(); ++i) {
      auto f = list.at(i);
      check_keys(f, {"id", "home", "strategy", "timeout", "service", "replicas",
                     "alternatives"});
      container::ContainerConfig c;
      c.id = str(f["id"]);
      if (!ids.insert(c.id).second) f["id"].fail("duplicate container '" + c.id + "'");
      c.home = node(f["home"]);
      c.timeout = f.has("timeout") ? non_negative(f["timeout"])
                                   : 10 * s_.network.base_latency;
      if (f.has("strategy")) {
        const auto st = str(f["strategy"]);
        if (st == "failover")
          c.strategy = container::Strategy::Failover;
        else if (st == "active")
          c.strategy = container::Strategy::ActiveReplication;
        else
          f["strategy"].fail("expected failover or active");
      }
      if (!f.has("service")) f.fail("missing field 'service'");
      const auto base = service(f["service"], nullptr);
      auto reps = f["replicas"];
      expect_list(reps);
      if (reps.node.size() == 0) reps.fail("must not be empty");
      for (std::size_t k = 0; k < reps.node.size(); ++k)
        c.replicas.push_back(replica(reps.at(k), base));
      if (c.strategy == container::Strategy::ActiveReplication &&
          c.replicas.size() % 2 == 0)
        reps.fail("active replication needs an odd replica count");
      if (f.has("alternatives")) {
        auto alts = f["alternatives"];
        expect_list(alts);
        for (std::size_t k = 0; k < alts.node.size(); ++k) {
          auto a = replica(alts.at(k), base);
          if (a.service.equivalence_class != base.equivalence_class)
            alts.at(k).fail("alternative must share equivalence class '" +
                            base.equivalence_class + "'");
          c.alternatives.push_back(std::move(a));
        }
      }
      s_.containers.push_back(std::move(c));
    }
  }

  void workload(const Field& r) {
    if (!r.has("workload")) return;
    auto list = r["workload"];
    expect_list(list);
    for (std::size_t i = 0; i < list.node.size(); ++i) {
      auto f = list.at(i);
      check_keys(f, {"container", "start", "every", "count", "requests"});
      WorkloadItem w;
      const auto cid = str(f["container"]);
      bool found = false;
      for (std::size_t c = 0; c < s_.containers.size(); ++c)
        if (s_.containers[c].id == cid) {
          w.container = c;
          found = true;
        }
      if (!found) f["container"].fail("undeclared container '" + cid + "'");
      if (f.has("start")) w.start = non_negative(f["start"]);
      if (f.has("every")) w.every = integer(f["every"]);
      if (w.every < 1) f["every"].fail("must be >= 1");
      if (f.has("count")) w.count = static_cast<std::uint32_t>(non_negative(f["count"]));
      w.requests = strings(f["requests"]);
      if (w.requests.empty()) f["requests"].fail("must not be empty");
      s_.workload.push_back(std::move(w));
    }
  }

  analysis::Comparator comparator(const Field& f) {
    auto c = analysis::parse_comparator(str(f));
    if (!c) f.fail("expected one of > >= < <=");
    return *c;
  }

  analysis::ThresholdPredicate threshold(const Field& f) {
    check_keys(f, {"metric", "comparator", "bound", "min_consecutive"});
    analysis::ThresholdPredicate t;
    t.metric = str(f["metric"]);
    if (f.has("comparator")) t.comparator = comparator(f["comparator"]);
    t.bound = real(f["bound"]);
    if (f.has("min_consecutive")) {
      t.min_consecutive = static_cast<std::size_t>(non_negative(f["min_consecutive"]));
      if (t.min_consecutive < 1) f["min_consecutive"].fail("must be >= 1");
    }
    return t;
  }

  analysis::TrendPredicate trend(const Field& f) {
    check_keys(f, {"metric", "window", "comparator", "slope"});
    analysis::TrendPredicate t;
    t.metric = str(f["metric"]);
    if (f.has("window")) t.window = static_cast<std::size_t>(non_negative(f["window"]));
    if (t.window < 2) f["window"].fail("must be >= 2");
    if (f.has("comparator")) t.comparator = comparator(f["comparator"]);
    t.slope_bound = real(f["slope"]);
    return t;
  }

  analysis::StepPredicate step(const Field& f) {
    check_keys(f, {"threshold", "trend"});
    if (f.has("threshold")) return threshold(f["threshold"]);
    if (f.has("trend")) return trend(f["trend"]);
    f.fail("expected threshold or trend");
  }

 public:
  analysis::Pattern pattern(const Field& f) {
    check_keys(f, {"id", "fault_class", "confidence", "threshold", "trend",
                   "sequence"});
    analysis::Pattern p;
    p.id = str(f["id"]);
    p.fault_class = str(f["fault_class"]);
    if (f.has("confidence")) p.confidence = real(f["confidence"]);
    if (!(p.confidence > 0 && p.confidence <= 1))
      f["confidence"].fail("must be in (0, 1]");
    if (f.has("threshold")) {
      p.predicate = threshold(f["threshold"]);
    } else if (f.has("trend")) {
      p.predicate = trend(f["trend"]);
    } else if (f.has("sequence")) {
      auto q = f["sequence"];
      check_keys(q, {"span", "steps"});
      analysis::SequencePredicate seq;
      seq.span = integer(q["span"]);
      if (seq.span < 1) q["span"].fail("must be >= 1");
      auto steps = q["steps"];
      expect_list(steps);
      if (steps.node.size() == 0) steps.fail("must not be empty");
      for (std::size_t k = 0; k < steps.node.size(); ++k)
        seq.steps.push_back(step(steps.at(k)));
      p.predicate = std::move(seq);
    } else {
      f.fail("pattern needs threshold, trend or sequence");
    }
    return p;
  }

 private:
  void analysis(const Field& r) {
    if (!r.has("analysis")) return;
    auto a = r["analysis"];
    check_keys(a, {"window_capacity", "patterns", "predictions", "learn"});
    auto& e = s_.engine;
    if (a.has("window_capacity")) {
      e.window_capacity = static_cast<std::size_t>(non_negative(a["window_capacity"]));
      if (e.window_capacity < 1) a["window_capacity"].fail("must be >= 1");
    }
    if (a.has("patterns")) {
      auto list = a["patterns"];
      expect_list(list);
      std::set<std::string> ids;
      for (std::size_t i = 0; i < list.node.size(); ++i) {
        auto f = list.at(i);
        auto p = pattern(f);
        if (!ids.insert(p.id).second) f["id"].fail("duplicate pattern '" + p.id + "'");
        e.patterns.push_back(std::move(p));
      }
    }
    if (a.has("predictions")) {
      auto list = a["predictions"];
      expect_list(list);
      for (std::size_t i = 0; i < list.node.size(); ++i) {
        auto f = list.at(i);
        check_keys(f, {"metric", "k", "horizon", "comparator", "threshold",
                       "fault_class", "confidence"});
        analysis::PredictionRule p;
        p.metric = str(f["metric"]);
        if (f.has("k")) p.k = static_cast<std::size_t>(non_negative(f["k"]));
        if (p.k < 1) f["k"].fail("must be >= 1");
        if (f.has("horizon")) p.horizon = non_negative(f["horizon"]);
        if (f.has("comparator")) p.comparator = comparator(f["comparator"]);
        p.threshold = real(f["threshold"]);
        if (f.has("fault_class")) p.fault_class = str(f["fault_class"]);
        if (f.has("confidence")) p.confidence = real(f["confidence"]);
        e.predictions.push_back(std::move(p));
      }
    }
    if (a.has("learn")) {
      auto f = a["learn"];
      check_keys(f, {"enabled", "lookback", "sigma", "min_shift",
                     "min_consecutive", "confidence"});
      if (f.has("enabled")) s_.learning = boolean(f["enabled"]);
      if (f.has("lookback")) e.learn.lookback = non_negative(f["lookback"]);
      if (f.has("sigma")) e.learn.sigma_multiplier = real(f["sigma"]);
      if (f.has("min_shift")) e.learn.min_shift = real(f["min_shift"]);
      if (f.has("min_consecutive"))
        e.learn.min_consecutive =
            static_cast<std::size_t>(non_negative(f["min_consecutive"]));
      if (f.has("confidence")) e.learn.confidence = real(f["confidence"]);
    }
  }

  std::vector<repair::PortOutcome> script(const Field& f) {
    expect_list(f);
    std::vector<repair::PortOutcome> out;
    for (std::size_t i = 0; i < f.node.size(); ++i) {
      auto item = f.at(i);
      if (item.node.IsScalar()) {
        const auto v = str(item);
        if (v == "ok")
          out.push_back({true, 0});
        else if (v == "fail")
          out.push_back({false, 0});
        else
          item.fail("expected ok, fail or a mapping");
        continue;
      }
      check_keys(item, {"ok", "delay"});
      repair::PortOutcome o;
      if (item.has("ok")) o.ok = boolean(item["ok"]);
      if (item.has("delay")) o.delay = non_negative(item["delay"]);
      out.push_back(o);
    }
    return out;
  }

  void repair(const Field& r) {
    s_.propagation.retry_interval = 2 * s_.network.base_latency;
    if (!r.has("repair")) return;
    auto f = r["repair"];
    check_keys(f, {"policy", "retry_interval", "retry_max", "jobs", "ports"});
    if (f.has("policy")) {
      auto p = f["policy"];
      expect_map(p);
      for (auto it = p.node.begin(); it != p.node.end(); ++it) {
        const auto cls = it->first.as<std::string>();
        Field v{it->second, p.path + "." + cls};
        auto strategy = repair::parse_strategy(str(v));
        if (!strategy)
          v.fail("expected activate_alternative, recover_jobs or alert");
        s_.repair_policy.by_class[cls] = *strategy;
      }
    }
    if (f.has("retry_interval")) {
      s_.propagation.retry_interval = integer(f["retry_interval"]);
      if (s_.propagation.retry_interval < 1) f["retry_interval"].fail("must be >= 1");
    }
    if (f.has("retry_max"))
      s_.propagation.retry_max = static_cast<std::uint32_t>(non_negative(f["retry_max"]));
    if (f.has("jobs")) {
      auto list = f["jobs"];
      expect_list(list);
      for (std::size_t i = 0; i < list.node.size(); ++i) {
        auto j = list.at(i);
        check_keys(j, {"id", "host", "checkpoint"});
        repair::JobRecord job;
        job.id = str(j["id"]);
        job.host = node(j["host"]);
        if (j.has("checkpoint")) job.checkpoint_ref = str(j["checkpoint"]);
        s_.jobs.push_back(std::move(job));
      }
    }
    if (f.has("ports")) {
      auto p = f["ports"];
      check_keys(p, {"scheduler", "checkpoint_store", "index", "transfer"});
      if (p.has("scheduler")) s_.ports.scheduler = script(p["scheduler"]);
      if (p.has("checkpoint_store"))
        s_.ports.checkpoint_store = script(p["checkpoint_store"]);
      if (p.has("index")) s_.ports.index = script(p["index"]);
      if (p.has("transfer")) s_.ports.transfer = script(p["transfer"]);
    }
  }

  security::PolicyRule rule(const Field& f) {
    check_keys(f, {"scope", "subject", "object", "operations", "effect"});
    security::PolicyRule out;
    if (f.has("scope")) {
      const auto scope = str(f["scope"]);
      if (scope != "global") {
        if (!vos_.count(scope)) f["scope"].fail("undeclared VO '" + scope + "'");
        out.vo = scope;
      }
    }
    if (f.has("subject")) out.subject_match = str(f["subject"]);
    if (f.has("object")) out.object_match = str(f["object"]);
    for (const auto& op : strings(f["operations"])) {
      auto parsed = security::parse_operation(op);
      if (!parsed) f["operations"].fail("unknown operation '" + op + "'");
      out.operations.insert(*parsed);
    }
    auto effect = security::parse_effect(str(f["effect"]));
    if (!effect) f["effect"].fail("expected allow or deny");
    out.effect = *effect;
    return out;
  }

  void security(const Field& r) {
    if (!r.has("security")) return;
    auto f = r["security"];
    check_keys(f, {"deny_window", "vos", "subjects", "objects", "rules"});
    if (f.has("deny_window")) {
      s_.deny_window = integer(f["deny_window"]);
      if (s_.deny_window < 1) f["deny_window"].fail("must be >= 1");
    }
    if (f.has("vos"))
      for (const auto& v : strings(f["vos"])) vos_.insert(v);
    auto& dir = s_.directory;
    if (f.has("subjects")) {
      auto list = f["subjects"];
      expect_list(list);
      for (std::size_t i = 0; i < list.node.size(); ++i) {
        auto s = list.at(i);
        check_keys(s, {"id", "vos"});
        security::Subject subj;
        subj.user_id = str(s["id"]);
        if (dir.subjects.count(subj.user_id))
          s["id"].fail("duplicate subject '" + subj.user_id + "'");
        if (s.has("vos"))
          for (const auto& v : strings(s["vos"])) {
            if (!vos_.count(v)) s["vos"].fail("undeclared VO '" + v + "'");
            subj.vos.insert(v);
          }
        dir.subjects.emplace(subj.user_id, std::move(subj));
      }
    }
    if (f.has("objects")) {
      auto list = f["objects"];
      expect_list(list);
      for (std::size_t i = 0; i < list.node.size(); ++i) {
        auto o = list.at(i);
        check_keys(o, {"id", "owner", "vo", "kind"});
        security::ObjectRef obj;
        obj.object_id = str(o["id"]);
        if (dir.objects.count(obj.object_id))
          o["id"].fail("duplicate object '" + obj.object_id + "'");
        obj.owner = str(o["owner"]);
        if (!dir.subjects.count(obj.owner))
          o["owner"].fail("undeclared subject '" + obj.owner + "'");
        obj.vo = str(o["vo"]);
        if (!vos_.count(obj.vo)) o["vo"].fail("undeclared VO '" + obj.vo + "'");
        if (o.has("kind")) {
          auto k = security::parse_object_kind(str(o["kind"]));
          if (!k) o["kind"].fail("expected data, service or resource");
          obj.kind = *k;
        }
        dir.objects.emplace(obj.object_id, std::move(obj));
      }
    }
    if (f.has("rules")) {
      auto list = f["rules"];
      expect_list(list);
      for (std::size_t i = 0; i < list.node.size(); ++i)
        s_.policy.rules.push_back(rule(list.at(i)));
    }
  }

  void timeline(const Field& r) {
    if (!r.has("timeline")) return;
    auto list = r["timeline"];
    expect_list(list);
    for (std::size_t i = 0; i < list.node.size(); ++i) {
      auto f = list.at(i);
      check_keys(f, {"at", "crash", "recover", "partition", "until", "set_loss",
                     "access", "repeat", "every", "policy_insert",
                     "policy_remove"});
      const SimTime t = non_negative(f["at"]);
      int actions = 0;
      for (const char* k : {"crash", "recover", "partition", "set_loss", "access",
                            "policy_insert", "policy_remove"})
        actions += f.has(k) ? 1 : 0;
      if (actions != 1) f.fail("each timeline entry needs exactly one action");
      if (f.has("crash")) {
        s_.faults.push_back(sim::Crash{node(f["crash"]), t});
      } else if (f.has("recover")) {
        s_.faults.push_back(sim::Recover{node(f["recover"]), t});
      } else if (f.has("partition")) {
        auto p = f["partition"];
        check_keys(p, {"a", "b"});
        sim::Partition part;
        part.side_a = side(p["a"]);
        part.side_b = side(p["b"]);
        part.start = t;
        if (!f.has("until")) f.fail("partition needs 'until'");
        part.end = non_negative(f["until"]);
        if (part.end < t) f["until"].fail("must not precede at");
        s_.faults.push_back(sim::PartitionFault{std::move(part)});
      } else if (f.has("set_loss")) {
        const double p = real(f["set_loss"]);
        if (!(p >= 0 && p <= 1)) f["set_loss"].fail("must be in [0, 1]");
        s_.faults.push_back(sim::SetLoss{p, t});
      } else if (f.has("access")) {
        auto a = f["access"];
        check_keys(a, {"subject", "object", "op", "node"});
        AccessItem item;
        item.at = t;
        item.subject = str(a["subject"]);
        if (!s_.directory.subjects.count(item.subject))
          a["subject"].fail("undeclared subject '" + item.subject + "'");
        item.object = str(a["object"]);
        if (!s_.directory.objects.count(item.object))
          a["object"].fail("undeclared object '" + item.object + "'");
        auto op = security::parse_operation(str(a["op"]));
        if (!op) a["op"].fail("expected read, write, execute or admin");
        item.operation = *op;
        item.node = a.has("node") ? node(a["node"]) : NodeId{0};
        if (f.has("repeat")) {
          item.repeat = static_cast<std::uint32_t>(non_negative(f["repeat"]));
          if (item.repeat < 1) f["repeat"].fail("must be >= 1");
        }
        if (f.has("every")) item.every = integer(f["every"]);
        if (item.every < 1) f["every"].fail("must be >= 1");
        s_.accesses.push_back(std::move(item));
      } else if (f.has("policy_insert")) {
        auto p = f["policy_insert"];
        check_keys(p, {"index", "rule"});
        s_.policy_changes.push_back(PolicyItem{
            t, security::InsertRule{static_cast<std::size_t>(non_negative(p["index"])),
                                    rule(p["rule"])}});
      } else {
        s_.policy_changes.push_back(PolicyItem{
            t, security::RemoveRule{
                   static_cast<std::size_t>(non_negative(f["policy_remove"]))}});
      }
    }
  }

  void feeds(const Field& r) {
    if (!r.has("feeds")) return;
    auto list = r["feeds"];
    expect_list(list);
    for (std::size_t i = 0; i < list.node.size(); ++i) {
      auto f = list.at(i);
      check_keys(f, {"observer", "source", "metric", "start", "every", "values",
                     "segments"});
      FeedItem feed;
      feed.observer = node(f["observer"]);
      feed.source = str(f["source"]);
      feed.metric = str(f["metric"]);
      SimTime t = f.has("start") ? non_negative(f["start"]) : 0;
      const SimTime every = f.has("every") ? integer(f["every"]) : 1;
      if (every < 1) f["every"].fail("must be >= 1");
      auto add_values = [&](const Field& vf, std::size_t count) {
        expect_list(vf);
        if (vf.node.size() == 0) vf.fail("must not be empty");
        std::vector<double> values;
        for (std::size_t k = 0; k < vf.node.size(); ++k) values.push_back(real(vf.at(k)));
        for (std::size_t k = 0; k < count; ++k, t += every)
          feed.samples.emplace_back(t, values[k % values.size()]);
      };
      if (f.has("values")) add_values(f["values"], f["values"].node.size());
      if (f.has("segments")) {
        auto segs = f["segments"];
        expect_list(segs);
        for (std::size_t k = 0; k < segs.node.size(); ++k) {
          auto seg = segs.at(k);
          check_keys(seg, {"count", "values"});
          add_values(seg["values"], static_cast<std::size_t>(non_negative(seg["count"])));
        }
      }
      s_.feeds.push_back(std::move(feed));
    }
  }

  Scenario s_;
  std::set<std::string> vos_;
};

}  // namespace

Scenario load_scenario_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  return Loader().load(root);
}

std::vector<analysis::Pattern> load_patterns_string(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", e.mark.line + 1, e.msg);
  }
  Field list{root, "patterns"};
  expect_list(list);
  Loader loader;
  std::vector<analysis::Pattern> out;
  for (std::size_t i = 0; i < list.node.size(); ++i)
    out.push_back(loader.pattern(list.at(i)));
  return out;
}

Json pattern_to_json(const analysis::Pattern& p) {
  auto threshold = [](const analysis::ThresholdPredicate& t) {
    Json j = Json::object();
    j["metric"] = t.metric;
    j["comparator"] = analysis::to_string(t.comparator);
    j["bound"] = t.bound;
    j["min_consecutive"] = t.min_consecutive;
    return j;
  };
  auto trend = [](const analysis::TrendPredicate& t) {
    Json j = Json::object();
    j["metric"] = t.metric;
    j["window"] = t.window;
    j["comparator"] = analysis::to_string(t.comparator);
    j["slope"] = t.slope_bound;
    return j;
  };
  Json j = Json::object();
  j["id"] = p.id;
  j["fault_class"] = p.fault_class;
  j["confidence"] = p.confidence;
  if (auto* t = std::get_if<analysis::ThresholdPredicate>(&p.predicate)) {
    j["threshold"] = threshold(*t);
  } else if (auto* t = std::get_if<analysis::TrendPredicate>(&p.predicate)) {
    j["trend"] = trend(*t);
  } else {
    const auto& seq = std::get<analysis::SequencePredicate>(p.predicate);
    Json q = Json::object();
    q["span"] = seq.span;
    Json steps = Json::array();
    for (const auto& st : seq.steps) {
      Json x = Json::object();
      if (auto* t = std::get_if<analysis::ThresholdPredicate>(&st))
        x["threshold"] = threshold(*t);
      else
        x["trend"] = trend(std::get<analysis::TrendPredicate>(st));
      steps.push_back(std::move(x));
    }
    q["steps"] = std::move(steps);
    j["sequence"] = std::move(q);
  }
  return j;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open scenario file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_scenario_string(buf.str());
}

}  // namespace dependsim::scenario

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

#include "runtime/world.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace dependsim::runtime {
namespace {

enum TimerKind : std::uint32_t {
  kGossip = 1,
  kSummary = 2,
  kInvokeTimeout = 3,
  kReply = 4,
  kRepairStep = 5,
  kNoticeRetry = 6,
};

enum DirectiveKind : std::uint32_t {
  kInvoke = 1,
  kAccess = 2,
  kPolicy = 3,
  kFeed = 4,
};

std::uint64_t pack(std::uint64_t hi, std::uint64_t lo) { return hi << 32 | lo; }
std::uint64_t high(std::uint64_t v) { return v >> 32; }
std::uint64_t low(std::uint64_t v) { return v & 0xffffffffu; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Suspicion: return "suspicion";
    case EventKind::MonitoringRecord: return "monitoring_record";
    case EventKind::Diagnosis: return "diagnosis";
    case EventKind::InvocationOutcome: return "invocation_outcome";
    case EventKind::ConfirmedFault: return "confirmed_fault";
    case EventKind::ChangeNotice: return "change_notice";
    case EventKind::NoticeApplied: return "notice_applied";
  }
  return "?";
}

Wiring Wiring::standard() {
  Wiring w;
  w.consumers = {
      {EventKind::Suspicion, "core-orchestrator"},
      {EventKind::MonitoringRecord, "analysis-engine"},
      {EventKind::Diagnosis, "repair-orchestrator"},
      {EventKind::InvocationOutcome, "core-orchestrator"},
      {EventKind::ConfirmedFault, "analysis-engine"},
      {EventKind::ChangeNotice, "change-propagation"},
      {EventKind::NoticeApplied, "ft-container"},
  };
  return w;
}

struct World::Node {
  NodeId id;
  std::unique_ptr<membership::Detector> detector;
  std::map<std::string, container::ReplicaContainer> containers;
  std::unique_ptr<analysis::AnalysisEngine> engine;
  repair::RepairContext context;
  std::map<std::uint64_t, repair::PlanExecution> executions;
  std::map<std::string, std::deque<std::uint64_t>> by_subject;
  std::uint64_t next_plan = 1;
  std::unique_ptr<repair::NoticeRelay> relay;
  std::unique_ptr<security::ReferenceMonitor> monitor;
  std::map<std::uint64_t, std::pair<NodeId, container::InvokeResponse>> replies;
  std::uint64_t next_reply = 1;
  std::set<std::string> failing;  // containers whose last outcome was AllFailed
  std::vector<NodeId> global_suspected;
};

World::World(scenario::Scenario scenario, RunOptions options, Wiring wiring)
    : scenario_(std::move(scenario)),
      wiring_(std::move(wiring)),
      sim_((scenario::validate(scenario_), scenario_.nodes), scenario_.network,
           scenario_.seed, options.level) {
  topology_ = membership::ClusterTopology(scenario_.clusters,
                                          scenario_.nodes.size());
  ports_.scheduler = repair::ScriptedPort("scheduler", scenario_.ports.scheduler);
  ports_.checkpoint_store =
      repair::ScriptedPort("checkpoint_store", scenario_.ports.checkpoint_store);
  ports_.index = repair::ScriptedPort("index", scenario_.ports.index);
  ports_.transfer = repair::ScriptedPort("transfer", scenario_.ports.transfer);
  policy_ = scenario_.policy;
  sim_.set_handler(this);
  record_header();
  nodes_.resize(scenario_.nodes.size());
  for (std::uint32_t i = 0; i < scenario_.nodes.size(); ++i) boot(NodeId{i});
  for (const auto& f : scenario_.faults) sim_.inject_fault(f);
  schedule_script();
}

World::~World() = default;

void World::record_header() {
  Json d = Json::object();
  d["scenario"] = scenario_.name;
  d["seed"] = scenario_.seed;
  d["run_length"] = scenario_.run_length;
  d["nodes"] = scenario_.nodes;
  Json clusters = Json::array();
  for (const auto& c : scenario_.clusters) {
    Json x = Json::object();
    x["id"] = c.name;
    Json members = Json::array();
    for (auto m : c.members) members.push_back(scenario_.nodes[m.value]);
    x["members"] = std::move(members);
    x["parent"] = c.parent ? Json(scenario_.clusters[c.parent->value].name)
                           : Json(nullptr);
    clusters.push_back(std::move(x));
  }
  d["clusters"] = std::move(clusters);
  d["base_latency"] = scenario_.network.base_latency;
  d["jitter"] = scenario_.network.jitter;
  d["loss_probability"] = scenario_.network.loss_probability;
  d["gossip_interval"] = scenario_.detector.gossip_interval;
  d["summary_interval"] = scenario_.detector.summary_interval;
  d["warmup"] = scenario_.detector.gossip_interval *
                static_cast<SimTime>(scenario_.detector.window);
  d["t_max"] = scenario_.detector.t_max;
  d["retry_interval"] = scenario_.propagation.retry_interval;
  d["retry_max"] = scenario_.propagation.retry_max;
  d["trace_level"] =
      sim_.trace_level() == sim::TraceLevel::Full ? "full" : "protocol";
  sim_.record("run_start", "", std::move(d));
}

void World::schedule_script() {
  for (std::size_t w = 0; w < scenario_.workload.size(); ++w) {
    const auto& item = scenario_.workload[w];
    const NodeId home = scenario_.containers[item.container].home;
    for (std::uint32_t i = 0; i < item.count; ++i)
      sim_.schedule(item.start + item.every * i, home,
                    sim::DirectiveEvent{{kInvoke, pack(w, i)}});
  }
  for (std::size_t a = 0; a < scenario_.accesses.size(); ++a) {
    const auto& item = scenario_.accesses[a];
    for (std::uint32_t i = 0; i < item.repeat; ++i)
      sim_.schedule(item.at + item.every * i, item.node,
                    sim::DirectiveEvent{{kAccess, pack(a, i)}});
  }
  for (std::size_t p = 0; p < scenario_.policy_changes.size(); ++p)
    sim_.schedule(scenario_.policy_changes[p].at, NodeId{0},
                  sim::DirectiveEvent{{kPolicy, p}});
  for (std::size_t f = 0; f < scenario_.feeds.size(); ++f) {
    const auto& feed = scenario_.feeds[f];
    for (std::size_t i = 0; i < feed.samples.size(); ++i)
      sim_.schedule(feed.samples[i].first, feed.observer,
                    sim::DirectiveEvent{{kFeed, pack(f, i)}});
  }
}

void World::boot(NodeId n) {
  auto node = std::make_unique<Node>();
  node->id = n;
  const auto inc = sim_.incarnation(n);
  const SimTime now = sim_.now();
  node->detector = std::make_unique<membership::Detector>(
      n, topology_, scenario_.detector, inc, now,
      sim_.make_stream(n, "gossip/" + std::to_string(inc)));
  for (const auto& c : scenario_.containers) {
    if (c.home == n) node->containers.emplace(c.id, container::ReplicaContainer(c));
    repair::ContainerRecord rec;
    if (!c.replicas.empty())
      rec.equivalence_class = c.replicas.front().service.equivalence_class;
    rec.alternatives.assign(c.alternatives.begin(), c.alternatives.end());
    node->context.containers.emplace(c.id, std::move(rec));
  }
  for (const auto& j : scenario_.jobs) node->context.jobs.emplace(j.id, j);
  for (std::uint32_t i = 0; i < scenario_.nodes.size(); ++i)
    node->context.node_by_name.emplace(scenario_.nodes[i], NodeId{i});
  node->engine = std::make_unique<analysis::AnalysisEngine>(scenario_.engine);
  node->relay = std::make_unique<repair::NoticeRelay>(n, scenario_.propagation);
  node->monitor = std::make_unique<security::ReferenceMonitor>(
      scenario_.directory, policy_, scenario_.deny_window);
  nodes_[n.value] = std::move(node);

  // Stagger the first gossip round so nodes do not tick in lockstep.
  auto phase = sim_.make_stream(n, "phase/" + std::to_string(inc));
  const auto gi = scenario_.detector.gossip_interval;
  sim_.schedule_timer(n, now + static_cast<SimTime>(phase.below(
                                  static_cast<std::uint64_t>(gi))),
                      sim::Timer{kGossip, 0, 0, 0, {}});
  sim_.schedule_timer(n, now + scenario_.detector.summary_interval,
                      sim::Timer{kSummary, 0, 0, 0, {}});
}

Trace World::run_until(SimTime t) { return sim_.run_until(t); }

void World::run() {
  sim_.run_until(scenario_.run_length);
  finish();
}

void World::finish() {
  if (finished_) return;
  finished_ = true;
  Json d = Json::object();
  Json up = Json::array();
  for (std::uint32_t i = 0; i < nodes_.size(); ++i)
    if (sim_.is_up(NodeId{i})) up.push_back(scenario_.nodes[i]);
  d["up"] = std::move(up);
  sim_.record("run_end", "", std::move(d));
}

const membership::Detector* World::detector(NodeId n) const {
  const auto& node = nodes_.at(n.value);
  return node && sim_.is_up(n) ? node->detector.get() : nullptr;
}

const analysis::AnalysisEngine* World::engine(NodeId n) const {
  const auto& node = nodes_.at(n.value);
  return node && sim_.is_up(n) ? node->engine.get() : nullptr;
}

const security::ReferenceMonitor* World::monitor(NodeId n) const {
  const auto& node = nodes_.at(n.value);
  return node && sim_.is_up(n) ? node->monitor.get() : nullptr;
}

const container::ReplicaContainer* World::container(
    NodeId home, const std::string& id) const {
  const auto& node = nodes_.at(home.value);
  if (!node || !sim_.is_up(home)) return nullptr;
  auto it = node->containers.find(id);
  return it == node->containers.end() ? nullptr : &it->second;
}

// Turns `<name>_index` node references into `<name>` node names, at any depth.
Json World::named(const Json& j) const {
  if (j.is_array()) {
    Json out = Json::array();
    for (const auto& v : j) out.push_back(named(v));
    return out;
  }
  if (!j.is_object()) return j;
  static const std::string suffix = "_index";
  Json out = Json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key.size() > suffix.size() &&
        key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0 &&
        it.value().is_number_unsigned()) {
      const auto idx = it.value().get<std::uint32_t>();
      out[key.substr(0, key.size() - suffix.size())] =
          idx < scenario_.nodes.size() ? scenario_.nodes[idx] : "?";
    } else {
      out[key] = named(it.value());
    }
  }
  return out;
}

// Stamps module notes with this node.
void World::emit(NodeId n, TraceNotes notes) {
  for (auto& note : notes) sim_.record(std::move(note.kind), n, named(note.detail));
}

bool World::routed(NodeId n, EventKind kind) {
  if (wiring_.consumers.count(kind)) return true;
  Json d = Json::object();
  d["event"] = to_string(kind);
  sim_.record("unrouted_event", n, std::move(d));
  return false;
}

container::LivenessFn World::liveness_fn(const Node& node) const {
  const auto* det = node.detector.get();
  return [det](NodeId h) { return det->liveness(h); };
}

const container::ReplicaSpec* World::deployed(const std::string& container_id,
                                              NodeId host) const {
  for (const auto& c : scenario_.containers) {
    if (c.id != container_id) continue;
    for (const auto& r : c.replicas)
      if (r.host == host) return &r;
    for (const auto& r : c.alternatives)
      if (r.host == host) return &r;
  }
  return nullptr;
}

// ---------------------------------------------------------------- messages

void World::on_message(NodeId to, NodeId from, const sim::Message& msg) {
  Node& node = *nodes_[to.value];
  const SimTime now = sim_.now();
  std::visit(
      Overloaded{
          [&](const membership::GossipDigest& d) {
            node.detector->on_digest(d, now);
          },
          [&](const membership::SummaryMessage& s) {
            node.detector->on_summary(s);
            report_global_view(node);
          },
          [&](const container::InvokeRequest& req) {
            const auto* spec = deployed(req.container_id, to);
            container::InvokeResponse resp;
            SimTime delay = 0;
            if (spec) {
              std::tie(resp, delay) = container::serve(*spec, req);
            } else {
              resp = container::InvokeResponse{req.container_id,
                                               req.request_id, req.slot,
                                               false, "not deployed"};
            }
            Json d = Json::object();
            d["container"] = req.container_id;
            d["request_id"] = req.request_id;
            d["slot"] = req.slot;
            d["ok"] = resp.ok;
            d["delay"] = delay;
            emit(to, {{"serve", std::move(d)}});
            if (delay > 0) {
              const auto id = node.next_reply++;
              node.replies.emplace(id, std::pair(from, resp));
              sim_.schedule_timer(to, now + delay,
                                  sim::Timer{kReply, id, 0, 0, {}});
            } else {
              sim_.send(to, from, resp);
            }
          },
          [&](const container::InvokeResponse& resp) {
            auto it = node.containers.find(resp.container_id);
            if (it == node.containers.end()) return;
            apply_container_step(
                node, it->first,
                it->second.on_response(resp, from, now, liveness_fn(node)));
          },
          [&](const repair::NoticeMessage& m) {
            apply_relay_step(node, node.relay->on_notice(from, m,
                                                         routing_view(node), now));
          },
          [&](const repair::NoticeAck& a) { node.relay->on_ack(from, a); },
      },
      msg);
}

// ------------------------------------------------------------------ timers

void World::on_timer(NodeId n, const sim::Timer& timer) {
  Node& node = *nodes_[n.value];
  const SimTime now = sim_.now();
  switch (timer.kind) {
    case kGossip: {
      handle_transitions(node, node.detector->evaluate(now));
      if (!sim_.is_up(n)) return;
      for (auto& [peer, digest] : node.detector->local_tick(now))
        sim_.send(n, peer, std::move(digest));
      sim_.schedule_timer(n, now + scenario_.detector.gossip_interval,
                          sim::Timer{kGossip, 0, 0, 0, {}});
      break;
    }
    case kSummary: {
      auto out = node.detector->summarize_and_channel(now);
      if (!out.empty()) {
        const auto& own = out.front().second.own;
        Json d = Json::object();
        d["cluster"] = scenario_.clusters[own.cluster.value].name;
        d["epoch"] = own.epoch;
        d["alive"] = own.alive.size();
        Json suspected = Json::array();
        for (auto s : own.suspected) suspected.push_back(scenario_.nodes[s.value]);
        d["suspected"] = std::move(suspected);
        Json to = Json::array();
        for (const auto& [dest, msg] : out) to.push_back(scenario_.nodes[dest.value]);
        d["to"] = std::move(to);
        emit(n, {{"summary", std::move(d)}});
        for (auto& [dest, msg] : out) sim_.send(n, dest, std::move(msg));
        report_global_view(node);
      }
      sim_.schedule_timer(n, now + scenario_.detector.summary_interval,
                          sim::Timer{kSummary, 0, 0, 0, {}});
      break;
    }
    case kInvokeTimeout: {
      auto it = node.containers.find(timer.key);
      if (it == node.containers.end()) return;
      apply_container_step(
          node, it->first,
          it->second.on_timeout(timer.a, static_cast<std::uint32_t>(timer.b),
                                      now, liveness_fn(node)));
      break;
    }
    case kReply: {
      auto it = node.replies.find(timer.a);
      if (it == node.replies.end()) return;
      auto [to, resp] = std::move(it->second);
      node.replies.erase(it);
      sim_.send(n, to, std::move(resp));
      break;
    }
    case kRepairStep:
      finish_step(node, timer.a);
      break;
    case kNoticeRetry: {
      const repair::NoticeId id{NodeId{static_cast<std::uint32_t>(high(timer.a))},
                                timer.b};
      const NodeId target{static_cast<std::uint32_t>(timer.c)};
      apply_relay_step(node, node.relay->on_retry(
                                 id, target,
                                 static_cast<std::uint32_t>(low(timer.a)), now,
                                 fallback_for(node, target)));
      break;
    }
    default: {
      Json d = Json::object();
      d["timer"] = timer.kind;
      sim_.record("unrouted_event", n, std::move(d));
    }
  }
}

// -------------------------------------------------------------- directives

void World::on_directive(NodeId n, const sim::Directive& directive) {
  const SimTime now = sim_.now();
  if (directive.kind == kPolicy) {
    const auto& item = scenario_.policy_changes.at(directive.index);
    try {
      policy_ = security::update_policy(policy_, item.change);
    } catch (const Error& e) {
      Json d = Json::object();
      d["error"] = to_string(e.code());
      d["message"] = e.what();
      sim_.record("policy_rejected", "", std::move(d));
      return;
    }
    Json d = Json::object();
    d["version"] = policy_.version;
    if (auto* ins = std::get_if<security::InsertRule>(&item.change)) {
      d["change"] = "insert";
      d["index"] = ins->index;
      d["rule"] = security::to_json(ins->rule);
    } else {
      d["change"] = "remove";
      d["index"] = std::get<security::RemoveRule>(item.change).index;
    }
    d["rules"] = policy_.rules.size();
    sim_.record("policy_changed", "", std::move(d));
    for (std::uint32_t i = 0; i < nodes_.size(); ++i)
      if (sim_.is_up(NodeId{i})) nodes_[i]->monitor->install(policy_);
    return;
  }
  if (!sim_.is_up(n)) return;  // a crashed node issues nothing
  Node& node = *nodes_[n.value];
  switch (directive.kind) {
    case kInvoke: {
      const auto& item = scenario_.workload.at(high(directive.index));
      const auto i = low(directive.index);
      const auto& cfg = scenario_.containers.at(item.container);
      auto it = node.containers.find(cfg.id);
      if (it == node.containers.end()) return;
      const auto& request = item.requests[i % item.requests.size()];
      apply_container_step(node, it->first,
                           it->second.invoke(request, now, liveness_fn(node)));
      break;
    }
    case kAccess: {
      const auto& item = scenario_.accesses.at(high(directive.index));
      auto out = node.monitor->request(security::AccessRequest{
          item.subject, item.object, item.operation, now});
      emit(n, std::move(out.notes));
      if (out.deny_rate) ingest(node, {*out.deny_rate});
      break;
    }
    case kFeed: {
      const auto& feed = scenario_.feeds.at(high(directive.index));
      const auto& [at, value] = feed.samples.at(low(directive.index));
      ingest(node, {analysis::MonitoringRecord{feed.source, feed.metric, value, at}});
      break;
    }
    default: {
      Json d = Json::object();
      d["directive"] = directive.kind;
      sim_.record("unrouted_event", n, std::move(d));
    }
  }
}

void World::on_crash(NodeId n) { nodes_[n.value].reset(); }

void World::on_recover(NodeId n) { boot(n); }

// --------------------------------------------------------------- pipeline

void World::handle_transitions(
    Node& node, const std::vector<membership::SuspicionTransition>& ts) {
  if (ts.empty() || !routed(node.id, EventKind::Suspicion)) return;
  const SimTime now = sim_.now();
  const bool rep = node.detector->is_representative();
  std::vector<analysis::MonitoringRecord> records;
  std::vector<analysis::ConfirmedFault> faults;
  for (const auto& t : ts) {
    Json d = Json::object();
    d["host_index"] = t.node.value;
    d["from"] = to_string(t.from);
    d["to"] = to_string(t.to);
    d["timeout"] = t.timeout;
    d["silence"] = t.silence;
    d["incarnation"] = t.incarnation;
    d["counter"] = t.counter;
    emit(node.id, {{membership::to_string(t.kind), std::move(d)}});

    const auto& host = scenario_.nodes[t.node.value];
    if (rep) {
      const bool down = t.to != Liveness::Alive;
      records.push_back(analysis::MonitoringRecord{
          host, "heartbeat_gap",
          down ? static_cast<double>(t.silence) : 0.0, now});
      if (t.kind == membership::TransitionKind::Remove && scenario_.learning)
        faults.push_back(
            analysis::ConfirmedFault{host, "NodeCrash", now - t.silence});
    }
    for (auto& [id, c] : node.containers)
      apply_container_step(node, id,
                           c.on_liveness(t.node, t.to, now, liveness_fn(node)));
  }
  if (!records.empty()) ingest(node, records);
  for (const auto& f : faults) on_confirmed_fault(node, f);
}

void World::ingest(Node& node,
                   const std::vector<analysis::MonitoringRecord>& records) {
  if (!routed(node.id, EventKind::MonitoringRecord)) return;
  for (const auto& r : records) node.engine->ingest(r);
  auto out = node.engine->analyze(sim_.now());
  emit(node.id, std::move(out.notes));
  for (const auto& d : out.diagnoses) on_diagnosis(node, d);
}

void World::on_diagnosis(Node& node, const analysis::Diagnosis& d) {
  if (!routed(node.id, EventKind::Diagnosis)) return;
  const auto id = node.next_plan++;
  auto p = repair::plan(d, scenario_.repair_policy, node.context, id, sim_.now());
  Json j = Json::object();
  j["plan_id"] = id;
  j["diagnosis"] = d.id;
  j["subject"] = d.subject;
  j["fault_class"] = d.fault_class;
  Json actions = Json::array();
  for (const auto& a : p.actions) actions.push_back(repair::to_json(a));
  j["actions"] = std::move(actions);
  auto& queue = node.by_subject[d.subject];
  j["queued_behind"] = queue.size();
  emit(node.id, {{"plan", std::move(j)}});
  node.executions.emplace(id, repair::PlanExecution(std::move(p)));
  queue.push_back(id);
  if (queue.size() == 1) start_step(node, id);
}

void World::start_step(Node& node, std::uint64_t plan_id) {
  auto& exec = node.executions.at(plan_id);
  const SimTime done = exec.begin_step(ports_, sim_.now());
  sim_.schedule_timer(node.id, done, sim::Timer{kRepairStep, plan_id, 0, 0, {}});
}

void World::finish_step(Node& node, std::uint64_t plan_id) {
  auto it = node.executions.find(plan_id);
  if (it == node.executions.end()) return;
  auto& exec = it->second;
  const SimTime now = sim_.now();
  const std::size_t before = exec.report().steps.size();
  auto change = exec.finish_step(node.context, now);
  const auto& report = exec.report();
  const auto& diag = exec.plan().diagnosis;
  for (std::size_t i = before; i < report.steps.size(); ++i) {
    const auto& s = report.steps[i];
    Json d = Json::object();
    d["plan_id"] = plan_id;
    d["step"] = s.index;
    d["action"] = s.action;
    d["ok"] = s.ok;
    d["started"] = s.started;
    if (!s.port.empty()) d["port"] = s.port;
    emit(node.id, {{"repair_step", std::move(d)}});
    if (s.action == "alert_operator") {
      Json a = Json::object();
      a["plan_id"] = plan_id;
      a["diagnosis"] = diag.id;
      a["subject"] = diag.subject;
      a["fault_class"] = diag.fault_class;
      const auto& actions = exec.plan().actions;
      if (s.index < actions.size() &&
          std::holds_alternative<repair::AlertOperator>(actions[s.index]))
        a["reason"] = std::get<repair::AlertOperator>(actions[s.index]).reason;
      else if (i > 0)
        a["reason"] = "step " + report.steps[i - 1].action + " failed";
      emit(node.id, {{"alert_operator", std::move(a)}});
    }
  }
  if (change) on_change(node, *change);
  if (!exec.done()) {
    start_step(node, plan_id);
    return;
  }
  Json d = Json::object();
  d["plan_id"] = plan_id;
  d["diagnosis"] = diag.id;
  d["subject"] = diag.subject;
  d["completed"] = report.completed;
  d["alerted"] = report.alerted;
  d["latency"] = now - diag.at;
  emit(node.id, {{"plan_done", std::move(d)}});
  auto& queue = node.by_subject[diag.subject];
  queue.pop_front();
  node.executions.erase(it);
  if (!queue.empty()) start_step(node, queue.front());
}

void World::on_outcome(Node& node, const std::string& container_id,
                       const container::InvocationOutcome& outcome,
                       SimTime started) {
  if (!routed(node.id, EventKind::InvocationOutcome)) return;
  if (!std::holds_alternative<container::AllFailed>(outcome)) {
    node.failing.erase(container_id);
    return;
  }
  // Learn once per outage, not once per failed call.
  if (!node.failing.insert(container_id).second || !scenario_.learning) return;
  on_confirmed_fault(node,
                     analysis::ConfirmedFault{container_id, "ServiceCrash", started});
}

void World::on_confirmed_fault(Node& node, const analysis::ConfirmedFault& fault) {
  if (!routed(node.id, EventKind::ConfirmedFault)) return;
  TraceNotes notes;
  auto p = node.engine->learn_from(fault, notes);
  emit(node.id, std::move(notes));
  if (p && learned_ids_.insert(p->id).second) learned_.push_back(*p);
}

void World::on_change(Node& node, const repair::AppliedChange& change) {
  if (!routed(node.id, EventKind::ChangeNotice)) return;
  auto notice = node.relay->originate(change.summary, sim_.now());
  notice.replica_change = change.replica_change;
  apply_relay_step(node, node.relay->start(notice, routing_view(node), sim_.now()));
}

void World::on_notice_applied(Node& node, const repair::ChangeNotice& notice) {
  if (!routed(node.id, EventKind::NoticeApplied)) return;
  if (!notice.replica_change) return;
  const auto& rc = *notice.replica_change;
  auto& rec = node.context.containers[rc.container_id];
  for (auto it = rec.alternatives.begin(); it != rec.alternatives.end(); ++it)
    if (it->host == rc.host && it->service.service_id == rc.service_id) {
      rec.alternatives.erase(it);
      break;
    }
  auto c = node.containers.find(rc.container_id);
  if (c == node.containers.end()) return;
  const auto* spec = deployed(rc.container_id, rc.host);
  if (!spec) return;
  c->second.add_replica(*spec, liveness_fn(node));
  Json d = Json::object();
  d["container"] = rc.container_id;
  d["host_index"] = rc.host.value;
  d["service"] = rc.service_id;
  d["replicas"] = c->second.replica_count();
  emit(node.id, {{"replica_added", std::move(d)}});
}

void World::apply_container_step(Node& node, const std::string& container_id,
                                 container::ContainerStep step) {
  emit(node.id, std::move(step.notes));
  for (auto& s : step.sends) sim_.send(node.id, s.host, std::move(s.request));
  if (step.timer)
    sim_.schedule_timer(node.id, step.timer->first,
                        sim::Timer{kInvokeTimeout, step.timer->second,
                                   step.timer_attempt, 0, container_id});
  if (!step.records.empty()) ingest(node, step.records);
  if (step.completed && sim_.is_up(node.id))
    on_outcome(node, container_id, step.completed->second, step.started);
}

void World::apply_relay_step(Node& node, repair::RelayStep step) {
  const SimTime now = sim_.now();
  for (auto& a : step.acks) sim_.send(node.id, a.to, a.ack);
  if (step.applied) {
    Json d = Json::object();
    d["origin_index"] = step.applied->id.origin.value;
    d["origin_seq"] = step.applied->id.sequence;
    d["summary"] = step.applied->summary;
    d["created"] = step.applied->at;
    emit(node.id, {{"notice_applied", std::move(d)}});
  }
  emit(node.id, std::move(step.notes));
  for (auto& s : step.sends) sim_.send(node.id, s.to, std::move(s.message));
  for (const auto& t : step.timers)
    sim_.schedule_timer(
        node.id, t.at,
        sim::Timer{kNoticeRetry, pack(t.id.origin.value, t.attempt),
                   t.id.sequence, t.target.value, {}});
  if (step.applied) on_notice_applied(node, *step.applied);
  (void)now;
}

repair::RoutingView World::routing_view(const Node& node) const {
  const auto& det = *node.detector;
  repair::RoutingView v;
  v.self = node.id;
  v.own_representative = det.own_representative();
  v.is_representative = v.own_representative == node.id;
  for (auto m : topology_.members(det.cluster()))
    if (m != node.id && det.liveness(m) != Liveness::Removed)
      v.cluster_members.push_back(m);
  if (auto p = topology_.parent(det.cluster()))
    v.tree_neighbours.push_back(det.representative_of(*p));
  for (auto c : topology_.children(det.cluster()))
    v.tree_neighbours.push_back(det.representative_of(c));
  const auto* topo = &topology_;
  v.same_cluster = [topo](NodeId a, NodeId b) {
    return topo->cluster_of(a) == topo->cluster_of(b);
  };
  return v;
}

// Next representative candidate of the target's cluster: the smallest
// member above the unreachable target that is not known to be down.
std::optional<NodeId> World::fallback_for(const Node& node, NodeId target) const {
  const auto c = topology_.cluster_of(target);
  if (c == node.detector->cluster()) return std::nullopt;
  for (auto m : topology_.members(c))
    if (m > target && node.detector->liveness(m) == Liveness::Alive) return m;
  return std::nullopt;
}

// The root representative traces its global view whenever the set of
// suspected nodes it knows of changes.
void World::report_global_view(Node& node) {
  const auto& det = *node.detector;
  if (det.cluster() != topology_.root() || !det.is_representative()) return;
  std::vector<NodeId> suspected;
  for (auto m : topology_.members(det.cluster()))
    if (det.liveness(m) != Liveness::Alive) suspected.push_back(m);
  for (const auto& [cid, s] : det.global_view())
    if (cid != det.cluster())
      suspected.insert(suspected.end(), s.suspected.begin(), s.suspected.end());
  std::sort(suspected.begin(), suspected.end());
  if (suspected == node.global_suspected) return;
  node.global_suspected = suspected;
  Json d = Json::object();
  Json names = Json::array();
  for (auto n : suspected) names.push_back(scenario_.nodes[n.value]);
  d["suspected"] = std::move(names);
  d["clusters"] = det.global_view().size();
  emit(node.id, {{"global_view", std::move(d)}});
}

}  // namespace dependsim::runtime

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

#include "container/container.hpp"

#include <algorithm>

#include "common/error.hpp"
#include "container/vote.hpp"

namespace dependsim::container {

const char* to_string(Strategy s) {
  return s == Strategy::Failover ? "failover" : "active";
}

const char* outcome_name(const InvocationOutcome& o) {
  switch (o.index()) {
    case 0: return "success";
    case 1: return "no_quorum";
    default: return "all_failed";
  }
}

std::pair<InvokeResponse, SimTime> serve(const ReplicaSpec& replica,
                                         const InvokeRequest& request) {
  InvokeResponse r;
  r.container_id = request.container_id;
  r.request_id = request.request_id;
  r.slot = request.slot;
  auto it = replica.service.table.find(request.request);
  if (it == replica.service.table.end()) {
    r.ok = false;
    r.value = "unknown request";
    return {r, 0};
  }
  r.value = it->second;
  switch (replica.behavior) {
    case ReplicaBehavior::Healthy: return {r, 0};
    case ReplicaBehavior::Corrupt:
      r.value = replica.wrong_value;
      return {r, 0};
    case ReplicaBehavior::Slow: return {r, replica.slow_delay};
  }
  return {r, 0};
}

ReplicaContainer::ReplicaContainer(ContainerConfig config)
    : config_(std::move(config)) {
  for (const auto& r : config_.replicas) slots_.push_back(Slot{r, false});
}

bool ReplicaContainer::usable(std::size_t slot,
                              const LivenessFn& liveness) const {
  const auto& s = slots_[slot];
  if (s.degraded) return false;
  const auto l = liveness(s.spec.host);
  if (config_.strategy == Strategy::Failover) return l == Liveness::Alive;
  return l != Liveness::Removed;
}

std::vector<std::size_t> ReplicaContainer::eligible(
    const LivenessFn& liveness) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (usable(i, liveness)) out.push_back(i);
  return out;
}

double ReplicaContainer::availability(const LivenessFn& liveness) const {
  if (slots_.empty()) return 0.0;
  return static_cast<double>(eligible(liveness).size()) /
         static_cast<double>(slots_.size());
}

analysis::MonitoringRecord ReplicaContainer::availability_record(
    SimTime now, const LivenessFn& liveness) const {
  return {config_.id, "svc_available", availability(liveness), now};
}

ContainerStep ReplicaContainer::invoke(const std::string& request, SimTime now,
                                       const LivenessFn& liveness) {
  const std::uint64_t id = next_request_++;
  Pending p;
  p.request = request;
  p.started = now;
  p.plan = eligible(liveness);
  ContainerStep step;
  Json d = Json::object();
  d["container"] = config_.id;
  d["request_id"] = id;
  d["strategy"] = to_string(config_.strategy);
  d["request"] = request;
  d["eligible"] = p.plan.size();
  step.notes.push_back({"invoke", std::move(d)});
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (std::find(p.plan.begin(), p.plan.end(), i) != p.plan.end()) continue;
    Json s = Json::object();
    s["container"] = config_.id;
    s["request_id"] = id;
    s["slot"] = i;
    s["host_index"] = slots_[i].spec.host.value;
    s["reason"] = slots_[i].degraded ? "degraded"
                                     : to_string(liveness(slots_[i].spec.host));
    step.notes.push_back({"replica_skip", std::move(s)});
  }
  pending_.emplace(id, std::move(p));
  ContainerStep rest;
  if (config_.strategy == Strategy::Failover) {
    rest = failover_next(id, now, liveness);
  } else {
    auto& pend = pending_.at(id);
    if (pend.plan.empty()) {
      rest = finish(id, AllFailed{}, now);
    } else {
      for (auto slot : pend.plan)
        rest.sends.push_back(OutboundInvoke{
            slots_[slot].spec.host,
            InvokeRequest{config_.id, id, static_cast<std::uint32_t>(slot),
                          pend.request}});
      pend.attempt = 1;
      rest.timer = std::pair(now + config_.timeout, id);
      rest.timer_attempt = 1;
    }
  }
  for (auto& n : rest.notes) step.notes.push_back(std::move(n));
  step.sends = std::move(rest.sends);
  step.timer = rest.timer;
  step.timer_attempt = rest.timer_attempt;
  step.records = std::move(rest.records);
  step.completed = std::move(rest.completed);
  step.started = rest.started;
  return step;
}

ContainerStep ReplicaContainer::failover_next(std::uint64_t id, SimTime now,
                                              const LivenessFn& liveness) {
  ContainerStep step;
  auto& p = pending_.at(id);
  while (p.cursor < p.plan.size()) {
    const auto slot = p.plan[p.cursor];
    if (usable(slot, liveness)) {
      ++p.attempt;
      Json d = Json::object();
      d["container"] = config_.id;
      d["request_id"] = id;
      d["slot"] = slot;
      d["attempt"] = p.attempt;
      step.notes.push_back({"failover_step", std::move(d)});
      step.sends.push_back(OutboundInvoke{
          slots_[slot].spec.host,
          InvokeRequest{config_.id, id, static_cast<std::uint32_t>(slot),
                        p.request}});
      step.timer = std::pair(now + config_.timeout, id);
      step.timer_attempt = p.attempt;
      return step;
    }
    // Liveness changed since the plan was made.
    Json s = Json::object();
    s["container"] = config_.id;
    s["request_id"] = id;
    s["slot"] = slot;
    s["host_index"] = slots_[slot].spec.host.value;
    s["reason"] = slots_[slot].degraded
                      ? "degraded"
                      : to_string(liveness(slots_[slot].spec.host));
    step.notes.push_back({"replica_skip", std::move(s)});
    ++p.cursor;
  }
  AllFailed failed;
  for (const auto& [slot, answer] : p.answers)
    failed.errors.emplace_back(slots_[slot].spec.host,
                               answer ? *answer : std::string("timeout"));
  auto fin = finish(id, std::move(failed), now);
  for (auto& n : fin.notes) step.notes.push_back(std::move(n));
  step.records = std::move(fin.records);
  step.completed = std::move(fin.completed);
  step.started = fin.started;
  return step;
}

ContainerStep ReplicaContainer::on_response(const InvokeResponse& response,
                                            NodeId from, SimTime now,
                                            const LivenessFn& liveness) {
  ContainerStep step;
  auto it = pending_.find(response.request_id);
  if (it == pending_.end()) return step;  // already decided
  auto& p = it->second;
  const std::size_t slot = response.slot;
  if (slot >= slots_.size() || slots_[slot].spec.host != from) return step;
  if (config_.strategy == Strategy::Failover) {
    if (response.ok)
      return finish(response.request_id, Success{response.value, {from}}, now);
    p.answers[slot] = response.value;
    // Only an error from the replica currently being tried moves us on.
    if (p.cursor < p.plan.size() && p.plan[p.cursor] == slot) {
      ++p.cursor;
      return failover_next(response.request_id, now, liveness);
    }
    return step;
  }
  if (response.ok)
    p.answers[slot] = response.value;
  else
    p.answers[slot] = std::nullopt;
  return decide_active(response.request_id, now, false);
}

ContainerStep ReplicaContainer::on_timeout(std::uint64_t request_id,
                                           std::uint32_t attempt, SimTime now,
                                           const LivenessFn& liveness) {
  ContainerStep step;
  auto it = pending_.find(request_id);
  if (it == pending_.end() || it->second.attempt != attempt) return step;
  auto& p = it->second;
  if (config_.strategy == Strategy::Failover) {
    const auto slot = p.plan[p.cursor];
    if (!p.answers.count(slot)) p.answers[slot] = std::string("timeout");
    ++p.cursor;
    return failover_next(request_id, now, liveness);
  }
  return decide_active(request_id, now, true);
}

ContainerStep ReplicaContainer::decide_active(std::uint64_t id, SimTime now,
                                              bool final) {
  auto& p = pending_.at(id);
  std::vector<std::string> values;
  for (const auto& [slot, answer] : p.answers)
    if (answer) values.push_back(*answer);
  const auto n = slots_.size();
  auto result = vote(std::span<const std::string>(values), n);
  if (!result.winner && !final && p.answers.size() < p.plan.size())
    return {};
  ContainerStep step;
  {
    Json d = Json::object();
    d["container"] = config_.id;
    d["request_id"] = id;
    d["n"] = n;
    d["responses"] = values.size();
    d["agreeing"] = result.agreeing;
    d["quorum"] = result.winner.has_value();
    if (result.winner) d["value"] = *result.winner;
    step.notes.push_back({"vote_result", std::move(d)});
  }
  ContainerStep fin;
  if (result.winner) {
    Success s;
    s.response = *result.winner;
    for (const auto& [slot, answer] : p.answers) {
      if (answer && *answer == *result.winner) {
        s.responders.push_back(slots_[slot].spec.host);
      } else if (answer) {
        // Outvoted replica: take it out of rotation.
        slots_[slot].degraded = true;
        Json d = Json::object();
        d["container"] = config_.id;
        d["slot"] = slot;
        d["host_index"] = slots_[slot].spec.host.value;
        d["reason"] = "outvoted";
        step.notes.push_back({"replica_degraded", std::move(d)});
        step.records.push_back({config_.id, "svc_error", 1.0, now});
      }
    }
    fin = finish(id, std::move(s), now);
  } else if (!values.empty()) {
    fin = finish(id, NoQuorum{values}, now);
  } else {
    AllFailed failed;
    for (auto slot : p.plan)
      failed.errors.emplace_back(slots_[slot].spec.host,
                                 p.answers.count(slot) ? "error" : "timeout");
    fin = finish(id, std::move(failed), now);
  }
  for (auto& n2 : fin.notes) step.notes.push_back(std::move(n2));
  for (auto& r : fin.records) step.records.push_back(std::move(r));
  step.completed = std::move(fin.completed);
  step.started = fin.started;
  return step;
}

ContainerStep ReplicaContainer::finish(std::uint64_t id,
                                       InvocationOutcome outcome, SimTime now) {
  ContainerStep step;
  auto it = pending_.find(id);
  const SimTime started = it->second.started;
  pending_.erase(it);
  const bool ok = std::holds_alternative<Success>(outcome);
  Json d = Json::object();
  d["container"] = config_.id;
  d["request_id"] = id;
  d["outcome"] = outcome_name(outcome);
  d["latency"] = now - started;
  if (ok) {
    const auto& s = std::get<Success>(outcome);
    d["value"] = s.response;
    d["responders"] = s.responders.size();
  }
  step.notes.push_back({"invoke_done", std::move(d)});
  step.records.push_back({config_.id, "svc_error", ok ? 0.0 : 1.0, now});
  if (ok)
    step.records.push_back(
        {config_.id, "svc_latency", static_cast<double>(now - started), now});
  if (std::holds_alternative<AllFailed>(outcome))
    step.records.push_back({config_.id, "svc_unavailable", 1.0, now});
  step.completed = std::pair(id, std::move(outcome));
  step.started = started;
  return step;
}

ContainerStep ReplicaContainer::mark_degraded(NodeId host, SimTime now,
                                              const LivenessFn& liveness) {
  bool found = false;
  ContainerStep step;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].spec.host != host) continue;
    found = true;
    if (slots_[i].degraded) continue;
    slots_[i].degraded = true;
    Json d = Json::object();
    d["container"] = config_.id;
    d["slot"] = i;
    d["host_index"] = host.value;
    d["reason"] = "membership";
    step.notes.push_back({"replica_degraded", std::move(d)});
  }
  if (!found)
    throw Error(ErrorCode::UnknownReplica,
                "container " + config_.id + " has no replica on node index " +
                    std::to_string(host.value));
  step.records.push_back(availability_record(now, liveness));
  return step;
}

ContainerStep ReplicaContainer::on_liveness(NodeId host, Liveness state,
                                            SimTime now,
                                            const LivenessFn& liveness) {
  ContainerStep step;
  if (state != Liveness::Alive) return step;
  bool changed = false;
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].spec.host != host || !slots_[i].degraded) continue;
    slots_[i].degraded = false;
    changed = true;
    Json d = Json::object();
    d["container"] = config_.id;
    d["slot"] = i;
    d["host_index"] = host.value;
    step.notes.push_back({"replica_reinstated", std::move(d)});
  }
  if (changed) step.records.push_back(availability_record(now, liveness));
  return step;
}

void ReplicaContainer::add_replica(const ReplicaSpec& spec,
                                   const LivenessFn& liveness) {
  if (config_.strategy == Strategy::ActiveReplication) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (!usable(i, liveness)) {
        slots_[i] = Slot{spec, false};
        return;
      }
    }
    return;  // nothing to replace; keep n odd
  }
  slots_.push_back(Slot{spec, false});
}

}  // namespace dependsim::container

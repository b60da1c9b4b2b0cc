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

#include "repair/plan.hpp"

namespace dependsim::repair {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

const char* action_name(const RepairAction& a) {
  return std::visit(Overloaded{
                        [](const ActivateAlternative&) { return "activate_alternative"; },
                        [](const RescheduleJobs&) { return "reschedule_jobs"; },
                        [](const RestoreCheckpoint&) { return "restore_checkpoint"; },
                        [](const AlertOperator&) { return "alert_operator"; },
                    },
                    a);
}

Json to_json(const RepairAction& a) {
  Json j = Json::object();
  j["action"] = action_name(a);
  std::visit(Overloaded{
                 [&](const ActivateAlternative& x) {
                   j["container"] = x.container_id;
                   j["service"] = x.replacement.service.service_id;
                   j["host_index"] = x.replacement.host.value;
                 },
                 [&](const RescheduleJobs& x) { j["jobs"] = x.job_ids; },
                 [&](const RestoreCheckpoint& x) {
                   j["job"] = x.job_id;
                   j["checkpoint"] = x.checkpoint_ref;
                 },
                 [&](const AlertOperator& x) {
                   j["diagnosis"] = x.diagnosis_id;
                   j["reason"] = x.reason;
                 },
             },
             a);
  return j;
}

std::optional<RepairStrategy> parse_strategy(const std::string& s) {
  if (s == "activate_alternative") return RepairStrategy::ActivateAlternative;
  if (s == "recover_jobs") return RepairStrategy::RecoverJobs;
  if (s == "alert") return RepairStrategy::Alert;
  return std::nullopt;
}

RepairStrategy RepairPolicyTable::strategy_for(
    const std::string& fault_class) const {
  auto it = by_class.find(fault_class);
  return it == by_class.end() ? RepairStrategy::Alert : it->second;
}

RepairPlan plan(const analysis::Diagnosis& diagnosis,
                const RepairPolicyTable& policy, const RepairContext& context,
                std::uint64_t plan_id, SimTime now) {
  RepairPlan p;
  p.plan_id = plan_id;
  p.diagnosis = diagnosis;
  p.created_at = now;
  auto alert = [&](std::string reason) {
    p.actions = {AlertOperator{diagnosis.id, std::move(reason)}};
    return p;
  };
  switch (policy.strategy_for(diagnosis.fault_class)) {
    case RepairStrategy::ActivateAlternative: {
      auto it = context.containers.find(diagnosis.subject);
      if (it == context.containers.end())
        return alert("no container " + diagnosis.subject);
      for (const auto& alt : it->second.alternatives) {
        if (alt.service.equivalence_class != it->second.equivalence_class)
          continue;
        p.actions = {ActivateAlternative{diagnosis.subject, alt}};
        return p;
      }
      return alert("no alternative left for " + diagnosis.subject);
    }
    case RepairStrategy::RecoverJobs: {
      // Subject is a job id, or a node whose jobs are all affected.
      std::vector<const JobRecord*> jobs;
      if (auto j = context.jobs.find(diagnosis.subject); j != context.jobs.end()) {
        jobs.push_back(&j->second);
      } else if (auto n = context.node_by_name.find(diagnosis.subject);
                 n != context.node_by_name.end()) {
        for (const auto& [id, job] : context.jobs)
          if (job.host == n->second) jobs.push_back(&job);
      }
      if (jobs.empty()) return alert("no jobs affected by " + diagnosis.subject);
      RescheduleJobs resched;
      for (const auto* job : jobs) {
        if (job->checkpoint_ref)
          p.actions.push_back(RestoreCheckpoint{job->id, *job->checkpoint_ref});
        resched.job_ids.push_back(job->id);
      }
      p.actions.push_back(std::move(resched));
      return p;
    }
    case RepairStrategy::Alert:
      break;
  }
  return alert("no automatic repair for " + diagnosis.fault_class);
}

PortOutcome ScriptedPort::call() {
  ++calls_;
  if (script_.empty()) return {};
  auto r = script_.front();
  script_.pop_front();
  return r;
}

PlanExecution::PlanExecution(RepairPlan plan) : plan_(std::move(plan)) {
  report_.plan_id = plan_.plan_id;
  if (plan_.actions.empty()) done_ = true;
}

SimTime PlanExecution::begin_step(ServicePorts& ports, SimTime now) {
  in_step_ = true;
  step_ok_ = true;
  failed_port_.clear();
  step_started_ = now;
  SimTime delay = 0;
  auto use = [&](ScriptedPort& port) {
    if (!step_ok_) return;
    auto r = port.call();
    delay += r.delay;
    if (!r.ok) {
      step_ok_ = false;
      failed_port_ = port.name();
    }
  };
  std::visit(Overloaded{
                 [&](const ActivateAlternative&) { use(ports.index); },
                 [&](const RescheduleJobs&) { use(ports.scheduler); },
                 [&](const RestoreCheckpoint&) {
                   use(ports.checkpoint_store);
                   use(ports.transfer);
                 },
                 [&](const AlertOperator&) {},
             },
             plan_.actions[next_]);
  return now + delay;
}

std::optional<AppliedChange> PlanExecution::finish_step(RepairContext& context,
                                                        SimTime now) {
  const auto& action = plan_.actions[next_];
  StepRecord rec;
  rec.index = next_;
  rec.action = action_name(action);
  rec.ok = step_ok_;
  rec.started = step_started_;
  rec.finished = now;
  rec.port = failed_port_;
  report_.steps.push_back(rec);
  in_step_ = false;
  ++next_;
  report_.finished_at = now;

  if (!step_ok_) {
    report_.alerted = true;
    report_.steps.push_back(StepRecord{next_, "alert_operator", true, now, now, {}});
    done_ = true;
    return std::nullopt;
  }
  std::optional<AppliedChange> change;
  std::visit(
      Overloaded{
          [&](const ActivateAlternative& a) {
            auto& rec2 = context.containers[a.container_id];
            for (auto it = rec2.alternatives.begin(); it != rec2.alternatives.end(); ++it)
              if (it->host == a.replacement.host &&
                  it->service.service_id == a.replacement.service.service_id) {
                rec2.alternatives.erase(it);
                break;
              }
            change = AppliedChange{
                "activate " + a.replacement.service.service_id + " for " + a.container_id,
                ReplicaChange{a.container_id, a.replacement.host,
                              a.replacement.service.service_id}};
          },
          [&](const RescheduleJobs& a) {
            std::string s = "reschedule";
            for (const auto& id : a.job_ids) {
              context.jobs[id].reschedules++;
              s += " " + id;
            }
            change = AppliedChange{s, std::nullopt};
          },
          [&](const RestoreCheckpoint& a) {
            context.jobs[a.job_id].restores++;
            change = AppliedChange{"restore " + a.job_id + " from " + a.checkpoint_ref,
                                   std::nullopt};
          },
          [&](const AlertOperator&) { report_.alerted = true; },
      },
      action);
  if (change) report_.changes.push_back(*change);
  if (next_ >= plan_.actions.size()) {
    done_ = true;
    report_.completed = true;
  }
  return change;
}

ExecutionReport execute(const RepairPlan& plan, ServicePorts& ports,
                        RepairContext& context, SimTime now) {
  PlanExecution exec(plan);
  SimTime t = now;
  while (!exec.done()) {
    t = exec.begin_step(ports, t);
    exec.finish_step(context, t);
  }
  auto report = exec.report();
  if (plan.actions.empty()) report.finished_at = now;
  return report;
}

}  // namespace dependsim::repair

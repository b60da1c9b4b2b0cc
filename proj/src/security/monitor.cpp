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

#include "security/monitor.hpp"

namespace dependsim::security {

ReferenceMonitor::ReferenceMonitor(Directory directory, SecurityPolicy policy,
                                   SimTime deny_window)
    : directory_(std::move(directory)),
      policy_(std::move(policy)),
      deny_window_(deny_window) {}

std::size_t ReferenceMonitor::recent_denials(const std::string& subject,
                                             SimTime now) const {
  auto it = denials_.find(subject);
  if (it == denials_.end()) return 0;
  std::size_t n = 0;
  for (auto t : it->second)
    if (t > now - deny_window_ && t <= now) ++n;
  return n;
}

Json ReferenceMonitor::apply_effect(const AccessRequest& req) {
  auto& r = store_[req.object];
  switch (req.operation) {
    case Operation::Read: ++r.reads; break;
    case Operation::Write: ++r.version; break;
    case Operation::Execute: ++r.executions; break;
    case Operation::Admin: break;
  }
  Json d = Json::object();
  d["object"] = req.object;
  d["operation"] = to_string(req.operation);
  d["version"] = r.version;
  return d;
}

ReferenceMonitor::Outcome ReferenceMonitor::request(AccessRequest req) {
  Outcome out;
  auto m = mediate(req, directory_, policy_);
  m.audit.id = log_.size() + 1;
  log_.push_back(m.audit);
  out.audit = m.audit;

  Json attempt = Json::object();
  attempt["audit_id"] = m.audit.id;
  attempt["subject"] = req.subject;
  attempt["object"] = req.object;
  attempt["operation"] = to_string(req.operation);
  out.notes.push_back({"access_request", std::move(attempt)});
  out.notes.push_back({"audit", to_json(m.audit)});

  if (m.decision.effect == Effect::Allow) {
    Json effect = apply_effect(req);
    effect["audit_id"] = m.audit.id;
    out.notes.push_back({"access_effect", std::move(effect)});
    return out;
  }

  auto& q = denials_[req.subject];
  q.push_back(req.at);
  while (!q.empty() && q.front() <= req.at - deny_window_) q.pop_front();
  out.deny_rate = analysis::MonitoringRecord{
      req.subject, "deny_rate", static_cast<double>(q.size()), req.at};
  return out;
}

TraceNotes ReferenceMonitor::change_policy(const PolicyChange& change,
                                           SimTime /*now*/) {
  policy_ = update_policy(policy_, change);
  Json d = Json::object();
  d["version"] = policy_.version;
  if (auto* ins = std::get_if<InsertRule>(&change)) {
    d["change"] = "insert";
    d["index"] = ins->index;
    d["rule"] = to_json(ins->rule);
  } else {
    d["change"] = "remove";
    d["index"] = std::get<RemoveRule>(change).index;
  }
  d["rules"] = policy_.rules.size();
  return {{"policy_changed", std::move(d)}};
}

}  // namespace dependsim::security

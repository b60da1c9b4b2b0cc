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

#include "security/policy.hpp"

#include <algorithm>

#include "common/error.hpp"

namespace dependsim::security {

const char* to_string(Operation op) {
  switch (op) {
    case Operation::Read: return "read";
    case Operation::Write: return "write";
    case Operation::Execute: return "execute";
    case Operation::Admin: return "admin";
  }
  return "?";
}

const char* to_string(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::Data: return "data";
    case ObjectKind::Service: return "service";
    case ObjectKind::Resource: return "resource";
  }
  return "?";
}

const char* to_string(Effect e) { return e == Effect::Allow ? "allow" : "deny"; }

std::optional<Operation> parse_operation(const std::string& s) {
  for (auto op : {Operation::Read, Operation::Write, Operation::Execute,
                  Operation::Admin})
    if (s == to_string(op)) return op;
  return std::nullopt;
}

std::optional<ObjectKind> parse_object_kind(const std::string& s) {
  for (auto k : {ObjectKind::Data, ObjectKind::Service, ObjectKind::Resource})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

std::optional<Effect> parse_effect(const std::string& s) {
  if (s == "allow") return Effect::Allow;
  if (s == "deny") return Effect::Deny;
  return std::nullopt;
}

SecurityPolicy update_policy(const SecurityPolicy& policy,
                             const PolicyChange& change) {
  SecurityPolicy next = policy;
  next.version = policy.version + 1;
  if (auto* ins = std::get_if<InsertRule>(&change)) {
    if (ins->index > policy.rules.size())
      throw Error(ErrorCode::IndexOutOfRange,
                  "insert index " + std::to_string(ins->index) +
                      " beyond " + std::to_string(policy.rules.size()));
    next.rules.insert(next.rules.begin() + static_cast<long>(ins->index),
                      ins->rule);
  } else {
    auto idx = std::get<RemoveRule>(change).index;
    if (idx >= policy.rules.size())
      throw Error(ErrorCode::IndexOutOfRange,
                  "remove index " + std::to_string(idx) + " with " +
                      std::to_string(policy.rules.size()) + " rules");
    next.rules.erase(next.rules.begin() + static_cast<long>(idx));
  }
  return next;
}

std::string MatchedRule::label() const {
  switch (layer) {
    case Layer::Builtin: return "builtin:" + builtin;
    case Layer::Custom: return "rule:" + std::to_string(index);
    case Layer::Default: return "default";
  }
  return "default";
}

namespace {

bool rule_applies(const PolicyRule& r, const Subject& s, const ObjectRef& o,
                  Operation op) {
  if (!r.vo.empty() && r.vo != o.vo) return false;
  if (r.subject_match != "*" && r.subject_match != s.user_id) return false;
  if (r.object_match != "*") {
    const std::string prefix = "kind:";
    if (r.object_match.rfind(prefix, 0) == 0) {
      if (r.object_match.substr(prefix.size()) != to_string(o.kind))
        return false;
    } else if (r.object_match != o.object_id) {
      return false;
    }
  }
  return r.operations.count(op) > 0;
}

Decision builtin(Effect e, const char* name, const char* reason) {
  Decision d;
  d.effect = e;
  d.reason = reason;
  d.matched.layer = MatchedRule::Layer::Builtin;
  d.matched.builtin = name;
  return d;
}

}  // namespace

Decision decide(const AccessRequest& request, const Directory& directory,
                const SecurityPolicy& policy) {
  auto s = directory.subjects.find(request.subject);
  if (s == directory.subjects.end())
    return builtin(Effect::Deny, "unknown_subject", "unknown subject");
  auto o = directory.objects.find(request.object);
  if (o == directory.objects.end())
    return builtin(Effect::Deny, "unknown_object", "unknown object");
  const Subject& subj = s->second;
  const ObjectRef& obj = o->second;
  const Operation op = request.operation;

  if (obj.owner == subj.user_id)
    return builtin(Effect::Allow, "owner", "owner of the object");
  if (!subj.vos.count(obj.vo))
    return builtin(Effect::Deny, "non_member", "not a member of the object's VO");
  if (op == Operation::Write || op == Operation::Admin)
    return builtin(Effect::Deny, "member_modify",
                   "members cannot modify each other's objects");

  for (std::size_t i = 0; i < policy.rules.size(); ++i) {
    if (!rule_applies(policy.rules[i], subj, obj, op)) continue;
    Decision d;
    d.effect = policy.rules[i].effect;
    d.reason = "custom rule";
    d.matched.layer = MatchedRule::Layer::Custom;
    d.matched.index = i;
    return d;
  }

  if (op == Operation::Read)
    return builtin(Effect::Allow, "member_read", "VO member read");
  if (op == Operation::Execute && obj.kind == ObjectKind::Service)
    return builtin(Effect::Allow, "member_execute", "VO member service call");

  Decision d;
  d.effect = Effect::Deny;
  d.reason = "no rule matched";
  return d;
}

Mediation mediate(const AccessRequest& request, const Directory& directory,
                  const SecurityPolicy& policy) {
  Mediation m;
  m.decision = decide(request, directory, policy);
  m.audit.request = request;
  m.audit.decision = m.decision.effect;
  m.audit.reason = m.decision.reason;
  m.audit.matched = m.decision.matched;
  m.audit.policy_version = policy.version;
  m.audit.at = request.at;
  return m;
}

std::vector<AuditRecord> audit_query(const std::vector<AuditRecord>& log,
                                     const AuditFilter& f) {
  std::vector<AuditRecord> out;
  std::copy_if(log.begin(), log.end(), std::back_inserter(out),
               [&](const AuditRecord& r) {
                 if (f.subject && r.request.subject != *f.subject) return false;
                 if (f.object && r.request.object != *f.object) return false;
                 if (f.decision && r.decision != *f.decision) return false;
                 if (f.from && r.at < *f.from) return false;
                 if (f.to && r.at > *f.to) return false;
                 return true;
               });
  return out;
}

Json to_json(const PolicyRule& rule) {
  Json j = Json::object();
  j["scope"] = rule.vo.empty() ? "global" : rule.vo;
  j["subject"] = rule.subject_match;
  j["object"] = rule.object_match;
  Json ops = Json::array();
  for (auto op : rule.operations) ops.push_back(to_string(op));
  j["operations"] = std::move(ops);
  j["effect"] = to_string(rule.effect);
  return j;
}

Json to_json(const AuditRecord& rec) {
  Json j = Json::object();
  j["audit_id"] = rec.id;
  j["subject"] = rec.request.subject;
  j["object"] = rec.request.object;
  j["operation"] = to_string(rec.request.operation);
  j["decision"] = to_string(rec.decision);
  j["matched_rule"] = rec.matched.label();
  j["reason"] = rec.reason;
  j["policy_version"] = rec.policy_version;
  return j;
}

}  // namespace dependsim::security

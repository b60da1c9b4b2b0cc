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
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "common/trace.hpp"

namespace dependsim::security {

enum class Operation { Read, Write, Execute, Admin };
enum class ObjectKind { Data, Service, Resource };
enum class Effect { Allow, Deny };

const char* to_string(Operation op);
const char* to_string(ObjectKind kind);
const char* to_string(Effect e);
std::optional<Operation> parse_operation(const std::string& s);
std::optional<ObjectKind> parse_object_kind(const std::string& s);
std::optional<Effect> parse_effect(const std::string& s);

struct Subject {
  std::string user_id;
  std::set<std::string> vos;
};

struct ObjectRef {
  std::string object_id;
  std::string owner;
  std::string vo;  // VO the object was submitted under
  ObjectKind kind = ObjectKind::Data;
};

/// Declared subjects and objects. Authentication happens upstream; a
/// subject id arriving here is taken as proven.
struct Directory {
  std::map<std::string, Subject> subjects;
  std::map<std::string, ObjectRef> objects;
};

struct AccessRequest {
  std::string subject;
  std::string object;
  Operation operation = Operation::Read;
  SimTime at = 0;
};

/// Custom rule. Empty `vo` means Global scope; "*" matches any subject or
/// object; `object_match` may also be "kind:<data|service|resource>".
struct PolicyRule {
  std::string vo;
  std::string subject_match = "*";
  std::string object_match = "*";
  std::set<Operation> operations;
  Effect effect = Effect::Deny;

  bool operator==(const PolicyRule&) const = default;
};

/// Immutable once built; updates return a new value with version + 1.
struct SecurityPolicy {
  std::vector<PolicyRule> rules;
  std::uint64_t version = 1;
};

struct InsertRule {
  std::size_t index = 0;
  PolicyRule rule;
};
struct RemoveRule {
  std::size_t index = 0;
};
using PolicyChange = std::variant<InsertRule, RemoveRule>;

/// Throws Error(IndexOutOfRange).
SecurityPolicy update_policy(const SecurityPolicy& policy,
                             const PolicyChange& change);

/// Which layer decided: a built-in VO rule, a custom rule index, or the
/// default.
struct MatchedRule {
  enum class Layer { Builtin, Custom, Default } layer = Layer::Default;
  std::string builtin;  // owner, non_member, member_modify, member_read, ...
  std::size_t index = 0;

  std::string label() const;
};

struct Decision {
  Effect effect = Effect::Deny;
  std::string reason;
  MatchedRule matched;
};

struct AuditRecord {
  std::uint64_t id = 0;
  AccessRequest request;
  Effect decision = Effect::Deny;
  std::string reason;
  MatchedRule matched;
  std::uint64_t policy_version = 0;
  SimTime at = 0;
};

/// Pure decision. Unknown subjects or objects are denied with a reason.
/// Order: owner allow; non-member deny; member write/admin on another's
/// object deny; custom rules (first match); member read and member execute
/// on services allow; default deny.
Decision decide(const AccessRequest& request, const Directory& directory,
                const SecurityPolicy& policy);

struct Mediation {
  Decision decision;
  AuditRecord audit;
};

Mediation mediate(const AccessRequest& request, const Directory& directory,
                  const SecurityPolicy& policy);

struct AuditFilter {
  std::optional<std::string> subject;
  std::optional<std::string> object;
  std::optional<Effect> decision;
  std::optional<SimTime> from;  // inclusive
  std::optional<SimTime> to;    // inclusive
};

std::vector<AuditRecord> audit_query(const std::vector<AuditRecord>& log,
                                     const AuditFilter& filter);

Json to_json(const PolicyRule& rule);
Json to_json(const AuditRecord& rec);

}  // namespace dependsim::security

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

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "analysis/record.hpp"
#include "security/policy.hpp"

namespace dependsim::security {

/// Per-node mediation point. The resource store is reachable only through
/// `request`, and only after an Allow decision.
class ReferenceMonitor {
 public:
  ReferenceMonitor(Directory directory, SecurityPolicy policy,
                   SimTime deny_window = 100);

  struct Outcome {
    AuditRecord audit;
    TraceNotes notes;  // access_request, audit, and access_effect on Allow
    std::optional<analysis::MonitoringRecord> deny_rate;
  };

  Outcome request(AccessRequest req);

  /// Swaps in the next policy version. Throws Error(IndexOutOfRange); the
  /// current policy is left untouched in that case.
  TraceNotes change_policy(const PolicyChange& change, SimTime now);

  /// Replaces the policy wholesale (policy distribution to a node).
  void install(SecurityPolicy policy) { policy_ = std::move(policy); }

  const SecurityPolicy& policy() const { return policy_; }
  const Directory& directory() const { return directory_; }
  const std::vector<AuditRecord>& log() const { return log_; }

  /// Denials by `subject` with at in (now - deny_window, now].
  std::size_t recent_denials(const std::string& subject, SimTime now) const;

 private:
  struct Resource {
    std::uint64_t version = 0;
    std::uint64_t reads = 0;
    std::uint64_t executions = 0;
  };

  Json apply_effect(const AccessRequest& req);

  Directory directory_;
  SecurityPolicy policy_;
  SimTime deny_window_;
  std::vector<AuditRecord> log_;
  std::map<std::string, std::deque<SimTime>> denials_;
  std::map<std::string, Resource> store_;
};

}  // namespace dependsim::security

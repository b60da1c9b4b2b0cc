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

#include "analysis/engine.hpp"

#include "common/error.hpp"

namespace dependsim::analysis {

AnalysisEngine::AnalysisEngine(EngineConfig config) : config_(std::move(config)) {
  for (const auto& p : config_.patterns) library_.add(p);
}

bool AnalysisEngine::ingest(const MonitoringRecord& r) {
  WindowKey key{r.source, r.metric};
  auto it = windows_.find(key);
  if (it == windows_.end())
    it = windows_.emplace(key, MetricWindow(key, config_.window_capacity)).first;
  if (it->second.push(Sample{r.at, r.value})) return true;
  Json d = Json::object();
  d["source"] = r.source;
  d["metric"] = r.metric;
  d["at"] = r.at;
  d["newest"] = it->second.back().at;
  d["reason"] = "out_of_order";
  pending_notes_.push_back({"record_dropped", std::move(d)});
  return false;
}

AnalysisEngine::Output AnalysisEngine::analyze(SimTime now) {
  Output out;
  out.notes = std::move(pending_notes_);
  pending_notes_.clear();

  std::vector<Diagnosis> current = compare(windows_, library_, now);

  // Forecast rules contribute diagnoses as well (fault avoidance).
  std::set<std::pair<WindowKey, std::size_t>> crossing_now;
  for (std::size_t r = 0; r < config_.predictions.size(); ++r) {
    const auto& rule = config_.predictions[r];
    for (const auto& [key, w] : windows_) {
      if (key.second != rule.metric || w.size() < rule.k) continue;
      auto p = forecast_ma(w, rule.k, rule.horizon, rule.comparator,
                           rule.threshold, now);
      if (!p.will_cross) continue;
      crossing_now.insert({key, r});
      if (crossing_.count({key, r})) continue;
      out.predictions.push_back(p);
      Json d = Json::object();
      d["source"] = key.first;
      d["metric"] = key.second;
      d["k"] = rule.k;
      d["horizon"] = rule.horizon;
      d["forecast"] = p.forecast;
      d["comparator"] = to_string(rule.comparator);
      d["threshold"] = rule.threshold;
      d["will_cross"] = true;
      out.notes.push_back({"prediction", std::move(d)});
      Diagnosis diag;
      diag.subject = key.first;
      diag.fault_class = rule.fault_class;
      diag.confidence = rule.confidence;
      diag.at = now;
      diag.evidence.push_back(
          Evidence{"forecast:" + rule.metric, {p.forecast}});
      current.push_back(std::move(diag));
    }
  }
  crossing_ = std::move(crossing_now);

  std::set<std::pair<std::string, std::string>> matched;
  for (auto& d : current) {
    const auto key = std::pair(d.subject, d.fault_class);
    const bool fresh = !active_.count(key) && !matched.count(key);
    matched.insert(key);
    if (!fresh) continue;
    d.id = next_diagnosis_++;
    out.diagnoses.push_back(std::move(d));
  }
  active_ = std::move(matched);
  for (const auto& d : out.diagnoses) out.notes.push_back({"diagnosis", to_json(d)});
  return out;
}

std::optional<Pattern> AnalysisEngine::learn_from(const ConfirmedFault& fault,
                                                  TraceNotes& notes) {
  try {
    auto p = learn(fault, windows_, config_.learn);
    const bool added = library_.add_learned(p);
    Json d = to_json(p);
    d["subject"] = fault.subject;
    d["fault_at"] = fault.at;
    d["added"] = added;
    notes.push_back({"pattern_learned", std::move(d)});
    return p;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSignal) throw;
    Json d = Json::object();
    d["subject"] = fault.subject;
    d["fault_class"] = fault.fault_class;
    d["fault_at"] = fault.at;
    notes.push_back({"learn_no_signal", std::move(d)});
    return std::nullopt;
  }
}

Json to_json(const Diagnosis& d) {
  Json j = Json::object();
  j["id"] = d.id;
  j["fault_class"] = d.fault_class;
  j["subject"] = d.subject;
  j["confidence"] = d.confidence;
  Json ev = Json::array();
  for (const auto& e : d.evidence) {
    Json x = Json::object();
    x["pattern"] = e.pattern_id;
    x["excerpt"] = e.excerpt;
    ev.push_back(std::move(x));
  }
  j["evidence"] = std::move(ev);
  return j;
}

Json to_json(const Pattern& p) {
  Json j = Json::object();
  j["id"] = p.id;
  j["origin"] = p.origin == PatternOrigin::Learned ? "learned" : "predefined";
  j["fault_class"] = p.fault_class;
  j["confidence"] = p.confidence;
  if (auto* t = std::get_if<ThresholdPredicate>(&p.predicate)) {
    j["metric"] = t->metric;
    j["comparator"] = to_string(t->comparator);
    j["bound"] = t->bound;
    j["min_consecutive"] = t->min_consecutive;
  } else if (auto* t = std::get_if<TrendPredicate>(&p.predicate)) {
    j["metric"] = t->metric;
    j["window"] = t->window;
    j["comparator"] = to_string(t->comparator);
    j["slope"] = t->slope_bound;
  } else {
    j["steps"] = std::get<SequencePredicate>(p.predicate).steps.size();
  }
  return j;
}

}  // namespace dependsim::analysis

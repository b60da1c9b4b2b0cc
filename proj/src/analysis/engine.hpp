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

#include <set>
#include <vector>

#include "analysis/pattern.hpp"
#include "common/trace.hpp"

namespace dependsim::analysis {

struct PredictionRule {
  std::string metric;
  std::size_t k = 4;
  SimTime horizon = 0;
  Comparator comparator = Comparator::Greater;
  double threshold = 0.0;
  std::string fault_class = "PredictedFault";
  double confidence = 0.5;
};

struct EngineConfig {
  std::size_t window_capacity = 128;
  LearnParams learn;
  std::vector<Pattern> patterns;
  std::vector<PredictionRule> predictions;
};

/// Architectural analysis engine: windows monitored data, compares it with
/// the pattern library, forecasts, and learns new patterns from faults.
/// Diagnoses are edge-triggered: one per (subject, fault class) each time it
/// starts matching.
class AnalysisEngine {
 public:
  explicit AnalysisEngine(EngineConfig config);

  /// False when the record is older than its window's newest sample; such a
  /// record is dropped and a `record_dropped` note is queued.
  bool ingest(const MonitoringRecord& record);

  struct Output {
    std::vector<Diagnosis> diagnoses;
    std::vector<Prediction> predictions;
    TraceNotes notes;
  };

  /// Runs compare + forecasting at `now` and returns only new diagnoses.
  Output analyze(SimTime now);

  /// Learns from a confirmed fault and adds the pattern (deduplicated).
  /// Returns the learned pattern, or nullopt on NoSignal. Notes describe the
  /// outcome.
  std::optional<Pattern> learn_from(const ConfirmedFault& fault,
                                    TraceNotes& notes);

  const WindowStore& windows() const { return windows_; }
  const PatternLibrary& library() const { return library_; }
  PatternLibrary& library() { return library_; }

 private:
  EngineConfig config_;
  WindowStore windows_;
  PatternLibrary library_;
  std::set<std::pair<std::string, std::string>> active_;
  std::set<std::pair<WindowKey, std::size_t>> crossing_;
  std::uint64_t next_diagnosis_ = 1;
  TraceNotes pending_notes_;
};

Json to_json(const Diagnosis& d);
Json to_json(const Pattern& p);

}  // namespace dependsim::analysis

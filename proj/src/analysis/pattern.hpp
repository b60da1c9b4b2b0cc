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
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "analysis/record.hpp"

namespace dependsim::analysis {

struct Sample {
  SimTime at = 0;
  double value = 0.0;
};

using WindowKey = std::pair<std::string, std::string>;  // (source, metric)

/// Bounded ring of samples for one (source, metric), oldest first.
class MetricWindow {
 public:
  MetricWindow() = default;
  MetricWindow(WindowKey key, std::size_t capacity)
      : key_(std::move(key)), capacity_(capacity) {}

  const WindowKey& key() const { return key_; }
  const std::string& source() const { return key_.first; }
  const std::string& metric() const { return key_.second; }
  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  const Sample& back() const { return samples_.back(); }
  const std::deque<Sample>& samples() const { return samples_; }

  /// False (and nothing stored) when `at` precedes the newest sample.
  bool push(Sample s);

 private:
  WindowKey key_;
  std::size_t capacity_ = 128;
  std::deque<Sample> samples_;
};

using WindowStore = std::map<WindowKey, MetricWindow>;

enum class Comparator { Greater, GreaterEqual, Less, LessEqual };

const char* to_string(Comparator c);
std::optional<Comparator> parse_comparator(const std::string& s);
bool compare_values(double lhs, Comparator c, double rhs);

struct ThresholdPredicate {
  std::string metric;
  Comparator comparator = Comparator::Greater;
  double bound = 0.0;
  std::size_t min_consecutive = 1;
};

/// Least-squares slope (value per tick) over the last `window` samples.
struct TrendPredicate {
  std::string metric;
  std::size_t window = 2;
  Comparator comparator = Comparator::Greater;
  double slope_bound = 0.0;
};

using StepPredicate = std::variant<ThresholdPredicate, TrendPredicate>;

/// Steps must match in order, each no earlier than the previous one, with
/// the first match no more than `span` ticks before evaluation time.
struct SequencePredicate {
  std::vector<StepPredicate> steps;
  SimTime span = 1;
};

using Predicate =
    std::variant<ThresholdPredicate, TrendPredicate, SequencePredicate>;

enum class PatternOrigin { Predefined, Learned };

struct Pattern {
  std::string id;
  PatternOrigin origin = PatternOrigin::Predefined;
  Predicate predicate;
  std::string fault_class;
  double confidence = 1.0;
};

/// Metrics a predicate reads.
std::vector<std::string> metrics_of(const Predicate& p);

/// Does `pred` hold on the first `upto` samples of `window`?
bool step_matches(const StepPredicate& pred, const MetricWindow& window,
                  std::size_t upto);

double least_squares_slope(const MetricWindow& window, std::size_t first,
                           std::size_t last);

/// Evaluates a pattern on the windows of one source at time `now`.
bool pattern_matches(const Pattern& pattern, const WindowStore& windows,
                     const std::string& source, SimTime now);

class PatternLibrary {
 public:
  void add(Pattern p) { patterns_.push_back(std::move(p)); }

  /// Appends a learned pattern unless one with the same (metric, bound to 3
  /// decimals, fault class) exists. Returns true when added.
  bool add_learned(Pattern p);

  const std::vector<Pattern>& patterns() const { return patterns_; }
  std::size_t size() const { return patterns_.size(); }

 private:
  std::vector<Pattern> patterns_;
};

struct Evidence {
  std::string pattern_id;
  std::vector<double> excerpt;
};

struct Diagnosis {
  std::uint64_t id = 0;
  std::string fault_class;
  std::string subject;
  double confidence = 0.0;
  std::vector<Evidence> evidence;
  SimTime at = 0;
};

/// One Diagnosis per (subject, fault class) with at least one matching
/// pattern, sorted by (subject, fault class).
std::vector<Diagnosis> compare(const WindowStore& windows,
                               const PatternLibrary& library, SimTime now);

struct Prediction {
  WindowKey key;
  SimTime horizon = 0;
  double forecast = 0.0;
  Comparator comparator = Comparator::Greater;
  double threshold = 0.0;
  bool will_cross = false;
  SimTime at = 0;
};

/// Simple moving average of the last k values; horizon does not change the
/// forecast. Throws Error(InsufficientData) when fewer than k samples.
Prediction forecast_ma(const MetricWindow& window, std::size_t k,
                       SimTime horizon, Comparator comparator,
                       double threshold, SimTime now);

struct LearnParams {
  SimTime lookback = 50;
  double sigma_multiplier = 2.0;
  double min_shift = 1.0;
  std::size_t min_consecutive = 2;
  double confidence = 0.5;
};

struct ConfirmedFault {
  std::string subject;
  std::string fault_class;
  SimTime at = 0;
};

/// Learns a Threshold pattern from the subject's windows: the metric whose
/// pre-fault mean (samples in [at - lookback, at)) shifted most, in baseline
/// standard deviations, from its baseline (samples before at - lookback).
/// Throws Error(NoSignal) when no shift exceeds `min_shift`.
Pattern learn(const ConfirmedFault& fault, const WindowStore& windows,
              const LearnParams& params);

}  // namespace dependsim::analysis

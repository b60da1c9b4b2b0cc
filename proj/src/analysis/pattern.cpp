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

#include "analysis/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "common/error.hpp"

namespace dependsim::analysis {

bool MetricWindow::push(Sample s) {
  if (!samples_.empty() && s.at < samples_.back().at) return false;
  samples_.push_back(s);
  while (samples_.size() > capacity_) samples_.pop_front();
  return true;
}

const char* to_string(Comparator c) {
  switch (c) {
    case Comparator::Greater: return ">";
    case Comparator::GreaterEqual: return ">=";
    case Comparator::Less: return "<";
    case Comparator::LessEqual: return "<=";
  }
  return "?";
}

std::optional<Comparator> parse_comparator(const std::string& s) {
  if (s == ">") return Comparator::Greater;
  if (s == ">=") return Comparator::GreaterEqual;
  if (s == "<") return Comparator::Less;
  if (s == "<=") return Comparator::LessEqual;
  return std::nullopt;
}

bool compare_values(double lhs, Comparator c, double rhs) {
  switch (c) {
    case Comparator::Greater: return lhs > rhs;
    case Comparator::GreaterEqual: return lhs >= rhs;
    case Comparator::Less: return lhs < rhs;
    case Comparator::LessEqual: return lhs <= rhs;
  }
  return false;
}

std::vector<std::string> metrics_of(const Predicate& p) {
  std::vector<std::string> out;
  auto add_step = [&](const StepPredicate& s) {
    std::visit([&](const auto& x) { out.push_back(x.metric); }, s);
  };
  if (auto* t = std::get_if<ThresholdPredicate>(&p)) out.push_back(t->metric);
  if (auto* t = std::get_if<TrendPredicate>(&p)) out.push_back(t->metric);
  if (auto* s = std::get_if<SequencePredicate>(&p))
    for (const auto& st : s->steps) add_step(st);
  return out;
}

double least_squares_slope(const MetricWindow& w, std::size_t first,
                           std::size_t last) {
  const double n = static_cast<double>(last - first);
  double mt = 0, mv = 0;
  for (auto i = first; i < last; ++i) {
    mt += static_cast<double>(w[i].at);
    mv += w[i].value;
  }
  mt /= n;
  mv /= n;
  double num = 0, den = 0;
  for (auto i = first; i < last; ++i) {
    const double dt = static_cast<double>(w[i].at) - mt;
    num += dt * (w[i].value - mv);
    den += dt * dt;
  }
  return den == 0.0 ? 0.0 : num / den;
}

bool step_matches(const StepPredicate& pred, const MetricWindow& w,
                  std::size_t upto) {
  if (auto* t = std::get_if<ThresholdPredicate>(&pred)) {
    if (t->min_consecutive == 0 || upto < t->min_consecutive) return false;
    for (auto i = upto - t->min_consecutive; i < upto; ++i)
      if (!compare_values(w[i].value, t->comparator, t->bound)) return false;
    return true;
  }
  const auto& tr = std::get<TrendPredicate>(pred);
  if (tr.window < 2 || upto < tr.window) return false;
  return compare_values(least_squares_slope(w, upto - tr.window, upto),
                        tr.comparator, tr.slope_bound);
}

namespace {

const MetricWindow* find_window(const WindowStore& windows,
                                const std::string& source,
                                const std::string& metric) {
  auto it = windows.find(WindowKey{source, metric});
  return it == windows.end() ? nullptr : &it->second;
}

bool sequence_matches(const SequencePredicate& seq, const WindowStore& windows,
                      const std::string& source, SimTime now) {
  if (seq.steps.empty()) return false;
  SimTime earliest = now - seq.span;
  bool first = true;
  for (const auto& step : seq.steps) {
    const auto& metric = std::visit(
        [](const auto& x) -> const std::string& { return x.metric; }, step);
    const auto* w = find_window(windows, source, metric);
    if (!w) return false;
    std::optional<SimTime> hit;
    for (std::size_t i = 0; i < w->size(); ++i) {
      const SimTime at = (*w)[i].at;
      if (at < earliest || at > now) continue;
      if (step_matches(step, *w, i + 1)) {
        hit = at;
        break;
      }
    }
    if (!hit) return false;
    // Greedy earliest placement; later steps may share the same tick.
    earliest = *hit;
    first = false;
  }
  return !first;
}

}  // namespace

bool pattern_matches(const Pattern& pattern, const WindowStore& windows,
                     const std::string& source, SimTime now) {
  if (auto* seq = std::get_if<SequencePredicate>(&pattern.predicate))
    return sequence_matches(*seq, windows, source, now);
  const StepPredicate step =
      std::holds_alternative<ThresholdPredicate>(pattern.predicate)
          ? StepPredicate(std::get<ThresholdPredicate>(pattern.predicate))
          : StepPredicate(std::get<TrendPredicate>(pattern.predicate));
  const auto metric = metrics_of(pattern.predicate).front();
  const auto* w = find_window(windows, source, metric);
  return w && step_matches(step, *w, w->size());
}

bool PatternLibrary::add_learned(Pattern p) {
  auto key = [](const Pattern& x) -> std::optional<std::tuple<std::string, long long, std::string>> {
    auto* t = std::get_if<ThresholdPredicate>(&x.predicate);
    if (!t || x.origin != PatternOrigin::Learned) return std::nullopt;
    return std::tuple(t->metric, std::llround(t->bound * 1000.0), x.fault_class);
  };
  const auto k = key(p);
  if (k)
    for (const auto& existing : patterns_)
      if (key(existing) == k) return false;
  patterns_.push_back(std::move(p));
  return true;
}

std::vector<Diagnosis> compare(const WindowStore& windows,
                               const PatternLibrary& library, SimTime now) {
  std::map<std::pair<std::string, std::string>, Diagnosis> found;
  std::vector<std::string> sources;
  for (const auto& [key, w] : windows)
    if (sources.empty() || sources.back() != key.first)
      sources.push_back(key.first);
  for (const auto& source : sources) {
    for (const auto& pattern : library.patterns()) {
      if (!pattern_matches(pattern, windows, source, now)) continue;
      auto& d = found[{source, pattern.fault_class}];
      d.subject = source;
      d.fault_class = pattern.fault_class;
      d.at = now;
      d.confidence = std::max(d.confidence, pattern.confidence);
      Evidence ev;
      ev.pattern_id = pattern.id;
      const auto metric = metrics_of(pattern.predicate).back();
      if (const auto* w = find_window(windows, source, metric)) {
        const std::size_t n = std::min<std::size_t>(w->size(), 8);
        for (auto i = w->size() - n; i < w->size(); ++i)
          ev.excerpt.push_back((*w)[i].value);
      }
      d.evidence.push_back(std::move(ev));
    }
  }
  std::vector<Diagnosis> out;
  out.reserve(found.size());
  for (auto& [key, d] : found) out.push_back(std::move(d));
  return out;
}

Prediction forecast_ma(const MetricWindow& window, std::size_t k,
                       SimTime horizon, Comparator comparator,
                       double threshold, SimTime now) {
  if (k == 0 || window.size() < k)
    throw Error(ErrorCode::InsufficientData,
                "forecast needs " + std::to_string(k) + " samples, have " +
                    std::to_string(window.size()));
  double sum = 0.0;
  for (auto i = window.size() - k; i < window.size(); ++i) sum += window[i].value;
  Prediction p;
  p.key = window.key();
  p.horizon = horizon;
  p.forecast = sum / static_cast<double>(k);
  p.comparator = comparator;
  p.threshold = threshold;
  p.will_cross = compare_values(p.forecast, comparator, threshold);
  p.at = now;
  return p;
}

Pattern learn(const ConfirmedFault& fault, const WindowStore& windows,
              const LearnParams& params) {
  const SimTime cut = fault.at - params.lookback;
  struct Best {
    std::string metric;
    double shift = 0.0;
    double mean = 0.0;
    double sd = 0.0;
  };
  std::optional<Best> best;
  for (const auto& [key, w] : windows) {
    if (key.first != fault.subject) continue;
    double bsum = 0, bsq = 0, psum = 0;
    std::size_t bn = 0, pn = 0;
    for (const auto& s : w.samples()) {
      if (s.at < cut) {
        bsum += s.value;
        bsq += s.value * s.value;
        ++bn;
      } else if (s.at < fault.at) {
        psum += s.value;
        ++pn;
      }
    }
    if (bn == 0 || pn == 0) continue;
    const double mean = bsum / static_cast<double>(bn);
    double var = 0;
    for (const auto& s : w.samples())
      if (s.at < cut) var += (s.value - mean) * (s.value - mean);
    const double sd = std::sqrt(var / static_cast<double>(bn));
    const double delta = psum / static_cast<double>(pn) - mean;
    double shift;
    if (sd > 0.0)
      shift = delta / sd;
    else
      shift = delta == 0.0 ? 0.0
                           : std::copysign(std::numeric_limits<double>::infinity(), delta);
    if (!best || std::abs(shift) > std::abs(best->shift))
      best = Best{key.second, shift, mean, sd};
  }
  if (!best || !(std::abs(best->shift) > params.min_shift))
    throw Error(ErrorCode::NoSignal,
                "no metric of " + fault.subject + " shifted before the fault");
  ThresholdPredicate t;
  t.metric = best->metric;
  t.min_consecutive = params.min_consecutive;
  if (best->shift > 0) {
    t.comparator = Comparator::Greater;
    t.bound = best->mean + params.sigma_multiplier * best->sd;
  } else {
    t.comparator = Comparator::Less;
    t.bound = best->mean - params.sigma_multiplier * best->sd;
  }
  char bound[64];
  std::snprintf(bound, sizeof bound, "%.3f", t.bound);
  Pattern p;
  p.id = "learned:" + fault.fault_class + ":" + t.metric + to_string(t.comparator) + bound;
  p.origin = PatternOrigin::Learned;
  p.predicate = t;
  p.fault_class = fault.fault_class;
  p.confidence = params.confidence;
  return p;
}

}  // namespace dependsim::analysis

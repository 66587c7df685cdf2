/*
 * Copyright (c) 2026 the survgp authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SURVGP_DATA_HPP
#define SURVGP_DATA_HPP

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "survgp/longitudinal.hpp"
#include "survgp/survival.hpp"
#include "survgp/types.hpp"

namespace survgp {

// Named step-function covariates: the recorded value is carried forward
// until the next recorded change; zero before the first record.
class CovariateTrack {
 public:
  void add(const std::string& name, double time, double value) {
    auto& series = tracks_[name];
    series.emplace_back(time, value);
    std::sort(series.begin(), series.end());
  }

  double at(const std::string& name, double time) const {
    const auto it = tracks_.find(name);
    if (it == tracks_.end()) return 0.0;
    double value = 0.0;
    for (const auto& [t, v] : it->second) {
      if (t > time) break;
      value = v;
    }
    return value;
  }

  Vec vector_at(const std::vector<std::string>& name_order, double time) const {
    Vec x(static_cast<Eigen::Index>(name_order.size()));
    for (std::size_t i = 0; i < name_order.size(); ++i) x[static_cast<Eigen::Index>(i)] = at(name_order[i], time);
    return x;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [name, series] : tracks_) out.push_back(name);
    return out;
  }

  const std::map<std::string, std::vector<std::pair<double, double>>>& raw() const { return tracks_; }

 private:
  std::map<std::string, std::vector<std::pair<double, double>>> tracks_;
};

// One individual's multivariate irregular observations, covariates, and
// (possibly censored) event data.
struct IndividualRecord {
  long long id = 0;
  std::vector<longitudinal::ObservationSeries> signals;
  CovariateTrack covariates;
  survival::EventRecord event;

  int n_signals() const { return static_cast<int>(signals.size()); }

  // maximum observed time across signals; falls back to the event horizon
  double t_max() const {
    double m = 0.0;
    for (const auto& s : signals)
      if (s.times.size() > 0) m = std::max(m, s.times[s.times.size() - 1]);
    if (m <= 0.0) m = std::max(1.0, event.end_time());
    return m;
  }

  void validate() const {
    for (const auto& s : signals) s.validate();
    event.validate();
  }

  // copy containing only observations at or before the landmark time
  IndividualRecord prefix(double time) const {
    IndividualRecord out = *this;
    for (auto& s : out.signals) {
      Eigen::Index keep = 0;
      while (keep < s.times.size() && s.times[keep] <= time) ++keep;
      s.times = s.times.head(keep).eval();
      s.values = s.values.head(keep).eval();
    }
    return out;
  }
};

// Per-signal train-split standardization (zero-mean unit-scale inputs match
// the zero-mean GP prior).
struct SignalStats {
  Vec mean;
  Vec stddev;
};

inline SignalStats compute_signal_stats(const std::vector<IndividualRecord>& population, int n_signals) {
  SignalStats stats;
  stats.mean = Vec::Zero(n_signals);
  stats.stddev = Vec::Ones(n_signals);
  for (int d = 0; d < n_signals; ++d) {
    double sum = 0.0, sum2 = 0.0;
    long long count = 0;
    for (const auto& record : population) {
      if (d >= record.n_signals()) continue;
      const auto& v = record.signals[static_cast<std::size_t>(d)].values;
      sum += v.sum();
      sum2 += v.squaredNorm();
      count += v.size();
    }
    if (count >= 2) {
      const double m = sum / static_cast<double>(count);
      const double var = sum2 / static_cast<double>(count) - m * m;
      stats.mean[d] = m;
      stats.stddev[d] = var > 1e-12 ? std::sqrt(var) : 1.0;
    }
  }
  return stats;
}

inline void apply_standardization(IndividualRecord& record, const SignalStats& stats) {
  for (int d = 0; d < record.n_signals() && d < stats.mean.size(); ++d) {
    auto& v = record.signals[static_cast<std::size_t>(d)].values;
    v = ((v.array() - stats.mean[d]) / stats.stddev[d]).matrix();
  }
}

inline void apply_standardization(std::vector<IndividualRecord>& population, const SignalStats& stats) {
  for (auto& record : population) apply_standardization(record, stats);
}

}  // namespace survgp

#endif  // SURVGP_DATA_HPP

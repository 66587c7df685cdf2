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

#ifndef SURVGP_EVALHARNESS_HPP
#define SURVGP_EVALHARNESS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "survgp/inference.hpp"
#include "survgp/policy.hpp"
#include "survgp/survival.hpp"
#include "survgp/types.hpp"

// The evaluation protocol: per-individual prediction schedules with labels,
// decision aggregation into TPR/FPR/PPV/decision-rate, and cost sweeps that
// trace out ROC and TPR-vs-PPV behavior for the quantile policy against the
// uncertainty-discarding point policy.
namespace survgp::evalharness {

inline constexpr double kDefaultHorizon = 720.0;  // minutes

struct PredictionInstance {
  long long individual = 0;
  double t = 0.0;
  std::optional<bool> label;  // empty when the censoring pattern leaves it unknown
  policy::EventProbDist dist;
};

// Event-within-horizon label from a (possibly censored) record. Right- or
// interval-censored horizons that the record cannot resolve yield no label.
inline std::optional<bool> label_from_record(const survival::EventRecord& event, double t, double horizon) {
  switch (event.kind) {
    case survival::EventRecord::Kind::observed:
      return event.t_event <= t + horizon;
    case survival::EventRecord::Kind::right_censored:
      if (event.t_left >= t + horizon) return false;
      return std::nullopt;
    case survival::EventRecord::Kind::interval_censored:
      if (event.t_right <= t + horizon) return true;
      if (event.t_left >= t + horizon) return false;
      return std::nullopt;
  }
  return std::nullopt;
}

// Ground-truth label (simulated data): always determinate; an infinite event
// time means the event never happens.
inline bool label_from_truth(double t_event_true, double t, double horizon) {
  return t_event_true <= t + horizon;
}

// The five landmark points of the shared schedule, with labels attached from
// the truth when available, otherwise from the censored record.
inline std::vector<PredictionInstance> schedule_predictions(long long individual,
                                                            const survival::EventRecord& event, double end_time,
                                                            double horizon,
                                                            std::optional<double> t_event_true = std::nullopt) {
  std::vector<PredictionInstance> out;
  for (double t : inference::grid_schedule(std::min(event.end_time(), end_time))) {
    PredictionInstance inst;
    inst.individual = individual;
    inst.t = t;
    inst.label = t_event_true ? std::optional<bool>(label_from_truth(*t_event_true, t, horizon))
                              : label_from_record(event, t, horizon);
    out.push_back(inst);
  }
  return out;
}

struct Outcome {
  std::optional<bool> label;
  policy::Verdict verdict = policy::Verdict::abstain;
};

struct MetricRow {
  std::string mode;
  double l1 = 0.0, l2 = 0.0, q = 0.0;
  double tpr = 0.0, fpr = 0.0, decision_rate = 0.0;
  std::optional<double> ppv;
  long long n_excluded = 0;
  long long tp = 0, fp = 0, fn = 0, tn = 0, abstained = 0;
};

// Aggregates decisions over all labeled prediction points; abstentions count
// against the TPR/FPR denominators. Unlabeled instances are excluded and
// tallied.
inline MetricRow compute_metrics(const std::vector<Outcome>& outcomes) {
  if (outcomes.empty()) throw validation_error("compute_metrics: no instances");
  MetricRow row;
  long long positives = 0, negatives = 0, decided = 0, predicted_pos = 0;
  for (const auto& o : outcomes) {
    if (!o.label) {
      ++row.n_excluded;
      continue;
    }
    const bool truth = *o.label;
    (truth ? positives : negatives) += 1;
    if (o.verdict == policy::Verdict::abstain) {
      ++row.abstained;
      continue;
    }
    ++decided;
    if (o.verdict == policy::Verdict::positive) {
      ++predicted_pos;
      (truth ? row.tp : row.fp) += 1;
    } else {
      (truth ? row.fn : row.tn) += 1;
    }
  }
  const long long labeled = positives + negatives;
  row.tpr = positives > 0 ? static_cast<double>(row.tp) / static_cast<double>(positives) : 0.0;
  row.fpr = negatives > 0 ? static_cast<double>(row.fp) / static_cast<double>(negatives) : 0.0;
  row.decision_rate = labeled > 0 ? static_cast<double>(decided) / static_cast<double>(labeled) : 0.0;
  if (predicted_pos > 0) row.ppv = static_cast<double>(row.tp) / static_cast<double>(predicted_pos);
  return row;
}

enum class Mode { robust, point };

inline std::string mode_name(Mode mode) { return mode == Mode::robust ? "robust" : "point"; }

// One decision per instance under the given costs. Point mode discards the
// scale and thresholds the plug-in probability (the two-stage baseline
// behavior); robust mode uses the full distribution.
inline policy::Decision decide(const PredictionInstance& inst, const policy::CostSpec& costs, Mode mode) {
  if (mode == Mode::point) {
    return policy::point_decide(policy::transform_h(inst.dist.k, inst.dist.loc), costs);
  }
  return policy::robust_decide(inst.dist, costs);
}

struct SweepGrids {
  std::vector<double> l1{0.25, 0.5, 1.0, 2.0, 4.0};
  std::vector<double> l2;  // defaults to 20 log-spaced points in [0.01, 1]
  std::vector<double> q{0.55, 0.75, 0.9, 0.95};

  SweepGrids() {
    for (int i = 0; i < 20; ++i) l2.push_back(std::pow(10.0, -2.0 + 2.0 * static_cast<double>(i) / 19.0));
  }
};

inline std::vector<MetricRow> sweep(const std::vector<PredictionInstance>& instances, const SweepGrids& grids,
                                    Mode mode) {
  if (instances.empty()) throw validation_error("sweep: no instances");
  std::vector<MetricRow> rows;
  for (double q : grids.q) {
    for (double l1 : grids.l1) {
      for (double l2 : grids.l2) {
        const policy::CostSpec costs{l1, l2, q};
        std::vector<Outcome> outcomes;
        outcomes.reserve(instances.size());
        for (const auto& inst : instances)
          outcomes.push_back({inst.label, decide(inst, costs, mode).verdict});
        MetricRow row = compute_metrics(outcomes);
        row.mode = mode_name(mode);
        row.l1 = l1;
        row.l2 = l2;
        row.q = q;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

// Upper ROC envelope: for increasing FPR, the best TPR achievable at or
// below that false-positive rate.
inline std::vector<MetricRow> roc_frontier(std::vector<MetricRow> rows) {
  std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    return a.fpr < b.fpr || (a.fpr == b.fpr && a.tpr > b.tpr);
  });
  std::vector<MetricRow> out;
  double best = -1.0;
  for (const auto& row : rows) {
    if (row.tpr > best) {
      out.push_back(row);
      best = row.tpr;
    }
  }
  return out;
}

// Best TPR at or above each PPV level, scanning PPV downward.
inline std::vector<MetricRow> tpr_ppv_frontier(std::vector<MetricRow> rows) {
  rows.erase(std::remove_if(rows.begin(), rows.end(), [](const MetricRow& r) { return !r.ppv.has_value(); }),
             rows.end());
  std::sort(rows.begin(), rows.end(), [](const MetricRow& a, const MetricRow& b) {
    return *a.ppv > *b.ppv || (*a.ppv == *b.ppv && a.tpr > b.tpr);
  });
  std::vector<MetricRow> out;
  double best = -1.0;
  for (const auto& row : rows) {
    if (row.tpr > best) {
      out.push_back(row);
      best = row.tpr;
    }
  }
  return out;
}

// Convenience for acceptance-style checks: best TPR among rows whose PPV
// meets the floor.
inline double max_tpr_at_ppv(const std::vector<MetricRow>& rows, double min_ppv) {
  double best = 0.0;
  for (const auto& row : rows)
    if (row.ppv && *row.ppv >= min_ppv) best = std::max(best, row.tpr);
  return best;
}

// Landmark prediction at time t: the local parameters are re-fit on the
// observations up to t only (the event term is off, since the outcome is
// unknown at prediction time), then the event-probability distribution
//   loc = b + gamma'x_t + mu^(t), scale = sigma^(t), k = (1 - e^{a h})/a
// is read off the history-feature moments.
inline policy::EventProbDist predict_at(const inference::GlobalParams& global, const IndividualRecord& record,
                                        double t, const std::vector<std::string>& covariate_names,
                                        const inference::TrainConfig& cfg, double horizon,
                                        const longitudinal::LocalState* warm = nullptr,
                                        longitudinal::LocalState* fitted_out = nullptr) {
  inference::TrainConfig gp_cfg = cfg;
  gp_cfg.t2e_weight = 0.0;
  auto fit = inference::fit_local(global, record, {t}, covariate_names, gp_cfg, warm);
  if (!std::isfinite(fit.elbo)) fit = inference::fit_local(global, record, {t}, covariate_names, gp_cfg, nullptr);
  const auto fd = survival::fbar_distribution(fit.state, global.hazard, t);
  const Vec x = record.covariates.vector_at(covariate_names, t);
  policy::EventProbDist dist;
  dist.loc = global.hazard.b + survival::dot_or_zero(global.hazard.gamma, x) + fd.mu;
  dist.scale = std::sqrt(std::max(0.0, fd.var));
  dist.k = -math::expm1_over(global.hazard.a, horizon);
  if (fitted_out) *fitted_out = fit.state;
  return dist;
}

// Full five-point landmark schedule with labels and predicted distributions;
// consecutive points warm-start from the previous fit.
inline std::vector<PredictionInstance> predict_schedule(const inference::GlobalParams& global,
                                                        const IndividualRecord& record,
                                                        const std::vector<std::string>& covariate_names,
                                                        const inference::TrainConfig& cfg, double horizon,
                                                        std::optional<double> t_event_true = std::nullopt) {
  auto instances = schedule_predictions(record.id, record.event, record.event.end_time(), horizon, t_event_true);
  longitudinal::LocalState warm;
  bool have_warm = false;
  for (auto& inst : instances) {
    inst.dist = predict_at(global, record, inst.t, covariate_names, cfg, horizon,
                           have_warm ? &warm : nullptr, &warm);
    have_warm = true;
  }
  return instances;
}

}  // namespace survgp::evalharness

#endif  // SURVGP_EVALHARNESS_HPP

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

#ifndef SURVGP_POLICY_HPP
#define SURVGP_POLICY_HPP

#include <cmath>
#include <stdexcept>

#include "survgp/math.hpp"

// The event probability H = 1 - exp(k e^v) with v ~ N(loc, scale^2) and
// k <= 0, the closed-form quantiles of its distribution, and the decision
// rule that minimizes the q-quantile of the {false-negative, false-positive,
// abstain} cost. Works entirely on the (loc, scale, k) triple the joint model
// produces at a prediction time.
namespace survgp::policy {

// Distribution of the event probability within the horizon encoded by k.
// loc/scale describe the Gaussian over the log-hazard offset; k < 0 shrinks
// toward 0 as the horizon shrinks.
struct EventProbDist {
  double loc = 0.0;
  double scale = 0.0;  // >= 0; 0 means a point mass
  double k = -1.0;     // (1 - e^{a delta})/a, <= 0 whenever delta >= 0
};

// Costs relative to the false-negative cost: l1 = L01/L10, l2 = La/L10.
struct CostSpec {
  double l1 = 1.0;
  double l2 = 0.5;
  double q = 0.9;  // quantile level, must exceed 0.5
};

enum class Verdict { negative, positive, abstain };

inline char verdict_code(Verdict v) {
  switch (v) {
    case Verdict::negative: return '0';
    case Verdict::positive: return '1';
    default: return 'a';
  }
}

struct Decision {
  Verdict verdict = Verdict::abstain;
  double h_lo = 0.0;    // (1-q)-quantile of H
  double h_hi = 0.0;    // q-quantile of H
  double tau_lo = 0.0;  // decide negative when h_hi <= tau_lo
  double tau_hi = 0.0;  // decide positive when h_hi >= tau_hi
};

inline void validate(const CostSpec& costs) {
  if (!(costs.l1 > 0.0) || !(costs.l2 > 0.0)) throw std::domain_error("CostSpec: costs must be positive");
  if (!(costs.q > 0.5 && costs.q < 1.0)) throw std::domain_error("CostSpec: q must lie in (0.5, 1)");
}

// H as a function of the Gaussian variable v
inline double transform_h(double k, double v) { return -std::expm1(k * std::exp(v)); }

// density of H at h:
//   N(log(log(1-h)/k); loc, scale^2) / ((h-1) log(1-h))
inline double ph_density(const EventProbDist& dist, double h) {
  if (!(h > 0.0 && h < 1.0)) throw std::domain_error("ph_density: h must be inside (0,1)");
  if (!(dist.scale > 0.0)) throw std::domain_error("ph_density: scale must be positive");
  const double log1mh = std::log1p(-h);
  const double v = std::log(log1mh / dist.k);
  const double z = (v - dist.loc) / dist.scale;
  const double normal = math::norm_pdf(z) / dist.scale;
  return normal / ((h - 1.0) * log1mh);
}

// q-quantile: H is monotone increasing in v (k < 0), so the quantile maps
// through the transform of the Gaussian quantile.
inline double quantile(const EventProbDist& dist, double q) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error("quantile: q must be inside (0,1)");
  const double v = (dist.scale == 0.0) ? dist.loc : dist.loc + dist.scale * math::norm_quantile(q);
  return transform_h(dist.k, v);
}

// q-quantile of the risk of a fixed verdict, in L10-normalized units:
//   negative -> h^{(q)}
//   positive -> (1 - h^{(1-q)}) L1   [q-quantile of (1-H) is 1 - h^{(1-q)}]
//   abstain  -> L2
inline double risk_quantile(const EventProbDist& dist, const CostSpec& costs, Verdict verdict) {
  validate(costs);
  switch (verdict) {
    case Verdict::negative: return quantile(dist, costs.q);
    case Verdict::positive: return (1.0 - quantile(dist, 1.0 - costs.q)) * costs.l1;
    default: return costs.l2;
  }
}

// Rule for a point estimate h0 (degenerate distribution):
//   tau_lo = min{L2, L1/(1+L1)}, tau_hi = max{1 - L2/L1, L1/(1+L1)}
inline Decision point_decide(double h0, const CostSpec& costs) {
  validate(costs);
  if (!(h0 >= 0.0 && h0 <= 1.0)) throw std::domain_error("point_decide: h0 must lie in [0,1]");
  Decision d;
  d.h_lo = d.h_hi = h0;
  d.tau_lo = std::min(costs.l2, costs.l1 / (1.0 + costs.l1));
  d.tau_hi = std::max(1.0 - costs.l2 / costs.l1, costs.l1 / (1.0 + costs.l1));
  if (h0 <= d.tau_lo) {
    d.verdict = Verdict::negative;
  } else if (h0 >= d.tau_hi) {
    d.verdict = Verdict::positive;
  } else {
    d.verdict = Verdict::abstain;
  }
  return d;
}

// Quantile-risk rule. With c_q = h^{(q)} - h^{(1-q)}:
//   negative when h^{(q)} <= tau_lo(c_q) = min{L1 (1+c_q)/(1+L1), L2}
//   positive when h^{(q)} >= tau_hi(c_q) = max{L1 (1+c_q)/(1+L1), 1 + c_q - L2/L1}
//   abstain otherwise.
// Boundary ties follow the inequalities above (negative checked first), which
// is also the tie order of the brute-force risk argmin.
inline Decision robust_decide(const EventProbDist& dist, const CostSpec& costs) {
  validate(costs);
  if (dist.scale == 0.0) {
    return point_decide(transform_h(dist.k, dist.loc), costs);
  }
  Decision d;
  d.h_hi = quantile(dist, costs.q);
  d.h_lo = quantile(dist, 1.0 - costs.q);
  const double cq = d.h_hi - d.h_lo;
  const double pivot = costs.l1 * (1.0 + cq) / (1.0 + costs.l1);
  d.tau_lo = std::min(pivot, costs.l2);
  d.tau_hi = std::max(pivot, 1.0 + cq - costs.l2 / costs.l1);
  if (d.h_hi <= d.tau_lo) {
    d.verdict = Verdict::negative;
  } else if (d.h_hi >= d.tau_hi) {
    d.verdict = Verdict::positive;
  } else {
    d.verdict = Verdict::abstain;
  }
  return d;
}

// E[H] = E[1 - exp(k e^v)] by Gauss-Hermite over v ~ N(loc, scale^2).
inline double expected_event_probability(const EventProbDist& dist, int n_nodes = 32) {
  if (n_nodes < 10) throw std::invalid_argument("expected_event_probability: need at least 10 nodes");
  if (dist.scale == 0.0) return transform_h(dist.k, dist.loc);
  const auto gh = math::gauss_hermite(n_nodes);
  const double root2s = std::sqrt(2.0) * dist.scale;
  double acc = 0.0;
  for (int i = 0; i < n_nodes; ++i) {
    acc += gh.weights[static_cast<std::size_t>(i)] * transform_h(dist.k, dist.loc + root2s * gh.nodes[static_cast<std::size_t>(i)]);
  }
  return acc / std::sqrt(math::pi);
}

}  // namespace survgp::policy

#endif  // SURVGP_POLICY_HPP

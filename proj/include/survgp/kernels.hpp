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

#ifndef SURVGP_KERNELS_HPP
#define SURVGP_KERNELS_HPP

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>

#include "survgp/math.hpp"
#include "survgp/types.hpp"

// Matern-1/2 kernel, the length-scale link that ties a latent function's
// length-scale to the duration of an individual's record, and the closed-form
// covariances of the exponentially weighted history integral
//   fbar = int_0^t rho_c(t';t) g(t') dt'
// against the Matern-1/2 prior. All times are in minutes.
namespace survgp::kernels {

inline constexpr double kJitter = 1e-8;
inline constexpr double kMaxJitter = 1e-4;
// below this, the exponential weight is treated as uniform (1/t)
inline constexpr double kUniformWeightC = 1e-10;
// below this, a weighting window [0, t] collapses to a point evaluation at 0
inline constexpr double kPointWindowT = 1e-9;

// K(t, t') = exp(-|t - t'| / (2 l)), unit variance by convention; signal
// amplitude is carried by the mixing weights.
inline double matern12(double t, double t2, double l) {
  if (!(l > 0.0)) throw std::domain_error("matern12: length-scale must be positive");
  return std::exp(-0.5 * std::abs(t - t2) / l);
}

inline Mat matern12_gram(const Vec& times, double l) {
  if (!(l > 0.0)) throw std::domain_error("matern12_gram: length-scale must be positive");
  const Eigen::Index n = times.size();
  const double rate = -0.5 / l;
  Mat k(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    k.col(j) = (rate * (times.array() - times[j]).abs()).exp().matrix();
  return k;
}

inline Mat matern12_cross(const Vec& a, const Vec& b, double l) {
  if (!(l > 0.0)) throw std::domain_error("matern12_cross: length-scale must be positive");
  const double rate = -0.5 / l;
  Mat k(a.size(), b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j)
    k.col(j) = (rate * (a.array() - b[j]).abs()).exp().matrix();
  return k;
}

// Maps beta * log(t_max) + beta0 into (lo, lo + hi) so optimized
// length-scales can neither collapse nor blow up.
struct LengthScaleLink {
  double beta = 1.0;
  double beta0 = -12.0;
  static constexpr double lo = 0.1;
  static constexpr double hi = 15000.0;
};

inline double map_lengthscale(const LengthScaleLink& link, double t_max) {
  if (!(t_max > 0.0)) throw std::domain_error("map_lengthscale: t_max must be positive");
  // clamp keeps the output strictly interior even when the sigmoid saturates
  // to 0 or 1 in floating point
  double s = math::sigmoid(link.beta * std::log(t_max) + link.beta0);
  s = std::min(std::max(s, 1e-12), 1.0 - 1e-12);
  return LengthScaleLink::lo + LengthScaleLink::hi * s;
}

// d length-scale / d(beta, beta0), needed by the trainer
inline void map_lengthscale_grad(const LengthScaleLink& link, double t_max, double* d_beta, double* d_beta0) {
  const double s = math::sigmoid(link.beta * std::log(t_max) + link.beta0);
  const double base = LengthScaleLink::hi * s * (1.0 - s);
  *d_beta = base * std::log(t_max);
  *d_beta0 = base;
}

// Exponential history weight rho_c(t';t) = c e^{-c(t-t')} / (1 - e^{-ct}),
// normalized so it integrates to one over [0, t].
struct HistoryWeight {
  double c;  // rate, 1/minutes; c -> 0 degenerates to the uniform weight 1/t
  double t;  // prediction time, minutes
};

inline double rho(const HistoryWeight& w, double t_prime) {
  if (!(w.t > 0.0)) throw std::domain_error("rho: window length must be positive");
  if (w.c < 0.0) throw std::domain_error("rho: rate must be nonnegative");
  if (t_prime < 0.0 || t_prime > w.t) throw std::domain_error("rho: t_prime outside [0, t]");
  if (w.c < kUniformWeightC) return 1.0 / w.t;
  // c / (1 - e^{-ct}) * e^{-c(t-t')}
  const double cprime = w.c / (-std::expm1(-w.c * w.t));
  return cprime * std::exp(-w.c * (w.t - t_prime));
}

namespace detail {

// Cov( int_0^t rho_c(t';t) g(t') dt', g(z) ) under the Matern-1/2 prior,
// generic over the scalar type of (c, l) so the same code yields values and
// (d/dc, d/dl) forward-mode derivatives.
//
// With b = 1/(2l) and c' = c / (1 - e^{-ct}):
//   z >= t:      c'/(c+b) * (e^{-b(z-t)} - e^{-ct} e^{-bz})
//   0 <= z <= t: c'/(c+b) * (e^{-cu} - e^{-ct} e^{-bz})
//                + c' u e^{-bu} phi((c-b) u),   u = t - z
// where phi(x) = (1 - e^{-x})/x; the series branch of phi covers the
// resonant case c = 1/(2l) with its analytic limit.
template <class S>
S integrated_cross_cov_impl(const S& c, const S& l, double t, double z) {
  using math::exp_s;
  using math::expm1_s;
  using math::one_mexp_over_s;
  const S b = S(0.5) / l;
  if (t < kPointWindowT) {
    // window collapses to a point mass at 0
    return exp_s(-b * S(z));
  }
  if (math::value(c) < kUniformWeightC) {
    // uniform weight 1/t
    const S inv_tb = S(1.0) / (S(t) * b);
    if (z >= t) return inv_tb * (exp_s(-b * S(z - t)) - exp_s(-b * S(z)));
    return inv_tb * (S(2.0) - exp_s(-b * S(z)) - exp_s(-b * S(t - z)));
  }
  const S cprime = c / (-expm1_s(-c * S(t)));
  const S head = cprime / (c + b);
  if (z >= t) {
    return head * (exp_s(-b * S(z - t)) - exp_s(-c * S(t)) * exp_s(-b * S(z)));
  }
  const double u = t - z;
  const S piece1 = head * (exp_s(-c * S(u)) - exp_s(-c * S(t)) * exp_s(-b * S(z)));
  const S piece2 = cprime * S(u) * exp_s(-b * S(u)) * one_mexp_over_s((c - b) * S(u));
  return piece1 + piece2;
}

// Var( int_0^t rho_c(t';t) g(t') dt' ) under the prior:
//   c'^2 [ (1 - e^{-tp}) - p t e^{-tp} phi(t m) ] / (p c),
// p = c + b, m = c - b. In (0, 1]: a weighted average of a unit-variance
// process cannot exceed the prior variance.
template <class S>
S integrated_variance_impl(const S& c, const S& l, double t) {
  using math::exp_s;
  using math::expm1_s;
  using math::one_mexp_over_s;
  if (t < kPointWindowT) return S(1.0);
  const S b = S(0.5) / l;
  if (math::value(c) < kUniformWeightC) {
    // (2/(t b)) - (2/(t b)^2)(1 - e^{-t b})
    const S tb = S(t) * b;
    const S inv = S(1.0) / tb;
    return S(2.0) * inv - S(2.0) * inv * inv * (-expm1_s(-tb));
  }
  const S cprime = c / (-expm1_s(-c * S(t)));
  const S p = c + b;
  const S m = c - b;
  const S etp = exp_s(-S(t) * p);
  const S bracket = (S(1.0) - etp) - p * S(t) * etp * one_mexp_over_s(S(t) * m);
  return cprime * cprime * bracket / (p * c);
}

}  // namespace detail

inline double integrated_cross_cov(const HistoryWeight& w, double l, double z) {
  if (!(l > 0.0)) throw std::domain_error("integrated_cross_cov: length-scale must be positive");
  if (w.c < 0.0) throw std::domain_error("integrated_cross_cov: rate must be nonnegative");
  return detail::integrated_cross_cov_impl<double>(w.c, l, w.t, z);
}

inline double integrated_variance(const HistoryWeight& w, double l) {
  if (!(l > 0.0)) throw std::domain_error("integrated_variance: length-scale must be positive");
  if (w.c < 0.0) throw std::domain_error("integrated_variance: rate must be nonnegative");
  return detail::integrated_variance_impl<double>(w.c, l, w.t);
}

// value plus partials w.r.t. c (d0) and l (d1)
inline math::Dual2 integrated_cross_cov_dual(const HistoryWeight& w, double l, double z) {
  return detail::integrated_cross_cov_impl<math::Dual2>({w.c, 1.0, 0.0}, {l, 0.0, 1.0}, w.t, z);
}

inline math::Dual2 integrated_variance_dual(const HistoryWeight& w, double l) {
  return detail::integrated_variance_impl<math::Dual2>({w.c, 1.0, 0.0}, {l, 0.0, 1.0}, w.t);
}

// Lower Cholesky factor of K + jitter*I. Starts at kJitter and escalates
// tenfold up to kMaxJitter before giving up.
struct JitteredChol {
  Mat lower;
  double jitter_used;
};

inline JitteredChol jittered_cholesky(const Mat& k, double base_jitter = kJitter, double max_jitter = kMaxJitter) {
  Mat work = k;
  double jitter = base_jitter;
  while (true) {
    work = k;
    work.diagonal().array() += jitter;
    Eigen::LLT<Mat> llt(work);
    if (llt.info() == Eigen::Success) {
      return {Mat(llt.matrixL()), jitter};
    }
    if (jitter >= max_jitter) {
      throw ill_conditioned_kernel("Cholesky failed at maximum jitter " + std::to_string(max_jitter));
    }
    jitter *= 10.0;
  }
}

}  // namespace survgp::kernels

#endif  // SURVGP_KERNELS_HPP

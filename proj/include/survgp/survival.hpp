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

#ifndef SURVGP_SURVIVAL_HPP
#define SURVGP_SURVIVAL_HPP

#include <cmath>
#include <stdexcept>
#include <vector>

#include "survgp/kernels.hpp"
#include "survgp/longitudinal.hpp"
#include "survgp/math.hpp"
#include "survgp/types.hpp"

// The dynamic hazard landmarked at prediction time t,
//   lambda(s;t) = exp(b + a (s-t) + gamma'x_t + fbar(t)),  s >= t,
// where fbar(t) is the exponentially weighted history of the latent signal
// trajectories. Under the variational posterior fbar(t) is Gaussian with
// closed-form moments, which makes the survival and log-hazard terms of the
// censored likelihood analytic; interval censoring keeps a reparameterized
// Monte Carlo term.
namespace survgp::survival {

using CovariateVector = Vec;

struct EventRecord {
  enum class Kind { observed, right_censored, interval_censored };
  Kind kind = Kind::right_censored;
  double t_event = 0.0;  // observed kind only; equals t_left there
  double t_left = 0.0;
  double t_right = 0.0;  // interval kind only

  void validate() const {
    if (t_event < 0.0 || t_left < 0.0 || t_right < 0.0) throw validation_error("EventRecord: negative time");
    if (kind == Kind::observed && t_event != t_left)
      throw validation_error("EventRecord: observed event must have t_event == t_left");
    if (kind == Kind::interval_censored && !(t_left < t_right))
      throw validation_error("EventRecord: interval needs t_left < t_right");
  }

  // The landmark horizon end: event time, censoring time, or treatment time.
  double end_time() const { return kind == Kind::observed ? t_event : t_left; }
};

struct HazardParams {
  double a = 0.0;        // baseline slope, 1/minutes
  double b = -8.0;       // baseline log-rate
  Vec gamma;             // covariate coefficients
  Vec alpha;             // per-signal history coefficients
  double c = 0.01;       // history weight rate, > 0

  void validate() const {
    if (!(c > 0.0)) throw validation_error("HazardParams: c must be positive");
    if (!std::isfinite(a) || !std::isfinite(b)) throw validation_error("HazardParams: non-finite baseline");
  }
};

// Gaussian law of fbar(t) under the variational posterior.
struct HistoryFeatureDist {
  double mu = 0.0;
  double var = 0.0;
};

inline double dot_or_zero(const Vec& coef, const Vec& x) {
  if (coef.size() == 0) return 0.0;
  if (coef.size() != x.size()) throw std::invalid_argument("covariate size mismatch");
  return coef.dot(x);
}

// lambda(s;t) for one realization of fbar
inline double hazard_at(const HazardParams& params, const CovariateVector& x, double fbar_sample, double s,
                        double t) {
  if (s < t) throw std::domain_error("hazard_at: s must not precede the landmark t");
  return std::exp(params.b + params.a * (s - t) + dot_or_zero(params.gamma, x) + fbar_sample);
}

// Integrated hazard Lambda(t, s) = lambda(t;t) (e^{a(s-t)} - 1)/a in closed
// form, series at a -> 0.
inline double integrated_hazard(const HazardParams& params, const CovariateVector& x, double fbar_sample, double t,
                                double s) {
  if (s < t) throw std::domain_error("integrated_hazard: s must not precede t");
  const double lam_tt = std::exp(params.b + dot_or_zero(params.gamma, x) + fbar_sample);
  return lam_tt * math::expm1_over(params.a, s - t);
}

// H(delta | fbar, t) = 1 - exp(-lambda(t;t) (e^{a delta} - 1)/a), in [0, 1]
inline double event_probability(const HazardParams& params, const CovariateVector& x, double fbar_sample, double t,
                                double delta) {
  if (delta < 0.0) throw std::domain_error("event_probability: horizon must be nonnegative");
  (void)t;
  const double lam_tt = std::exp(params.b + dot_or_zero(params.gamma, x) + fbar_sample);
  return -std::expm1(-lam_tt * math::expm1_over(params.a, delta));
}

// log p(T, delta | fbar, t) with survival measured from the landmark t:
//   observed:  log lambda(T;t) - Lambda(t, T)
//   right:     -Lambda(t, T_l)
//   interval:  -Lambda(t, T_l) + log(1 - e^{-(Lambda(t,T_r) - Lambda(t,T_l))})
inline double censored_loglik(const HazardParams& params, const CovariateVector& x, double fbar_sample,
                              const EventRecord& record, double t) {
  record.validate();
  if (record.t_left < t) throw std::domain_error("censored_loglik: record precedes landmark");
  const double surv_left = -integrated_hazard(params, x, fbar_sample, t, record.t_left);
  switch (record.kind) {
    case EventRecord::Kind::observed: {
      const double log_lam =
          params.b + params.a * (record.t_event - t) + dot_or_zero(params.gamma, x) + fbar_sample;
      return log_lam + surv_left;
    }
    case EventRecord::Kind::right_censored:
      return surv_left;
    case EventRecord::Kind::interval_censored: {
      const double lam_left = std::exp(params.b + params.a * (record.t_left - t) +
                                       dot_or_zero(params.gamma, x) + fbar_sample);
      const double delta_cum = lam_left * math::expm1_over(params.a, record.t_right - record.t_left);
      return surv_left + math::log1mexp(delta_cum);
    }
  }
  return 0.0;
}

// Moments of fbar(t) = alpha' int_0^t rho_c(t';t) f(t') dt' under the
// variational posterior:
//   mu  = sum_j coef_j Kbar_j' Kzz_j^{-1} m_j
//   var = sum_j coef_j^2 [ I_t,j - Kbar_j' Kzz_j^{-1} (I - S_j Kzz_j^{-1}) Kbar_j ]
// with coef_r = sum_d w_dr alpha_d for shared latents and coef_{R+d} =
// kappa_d alpha_d for signal-specific ones.
inline HistoryFeatureDist fbar_distribution(const longitudinal::LocalState& local, const HazardParams& params,
                                            double t) {
  if (!(t >= 0.0)) throw std::domain_error("fbar_distribution: t must be nonnegative");
  params.validate();
  const int n_sig = local.n_signals();
  const int n_lat = local.n_latents();
  if (params.alpha.size() != n_sig) throw std::invalid_argument("fbar_distribution: alpha size mismatch");
  const kernels::HistoryWeight weight{params.c, t};
  HistoryFeatureDist out;
  for (int j = 0; j < n_lat; ++j) {
    double coef;
    if (j < local.r_shared) {
      coef = 0.0;
      for (int d = 0; d < n_sig; ++d) coef += local.weights.w(d, j) * params.alpha[d];
    } else {
      const int d = j - local.r_shared;
      coef = local.weights.kappa[d] * params.alpha[d];
    }
    if (coef == 0.0) continue;
    const auto& block = local.blocks[static_cast<std::size_t>(j)];
    const double l = local.lengthscales[j];
    Vec kbar(block.z.size());
    for (Eigen::Index k = 0; k < block.z.size(); ++k)
      kbar[k] = kernels::integrated_cross_cov(weight, l, block.z[k]);
    const auto chol = kernels::jittered_cholesky(kernels::matern12_gram(block.z, l));
    const Vec v = chol.lower.triangularView<Eigen::Lower>().solve(kbar);
    const Vec w = chol.lower.transpose().triangularView<Eigen::Upper>().solve(v);
    const Vec cw = block.s_chol.transpose() * w;
    const double i_t = kernels::integrated_variance(weight, l);
    out.mu += coef * w.dot(block.m);
    out.var += coef * coef * (i_t - v.squaredNorm() + cw.squaredNorm());
  }
  if (out.var < -1e-8) throw std::runtime_error("fbar_distribution: variance fell below tolerance");
  out.var = std::max(0.0, out.var);
  return out;
}

// E_q log p(T, delta | fbar, t) with fbar ~ N(mu, var). The survival and
// log-hazard pieces are analytic through the lognormal mean identity
//   E lambda(T_l;t) = exp(b + a(T_l-t) + gamma'x + mu + var/2);
// the interval piece averages the frozen standard-normal draws.
inline double expected_t2e_loglik(const HazardParams& params, const CovariateVector& x,
                                  const HistoryFeatureDist& fd, const EventRecord& record, double t,
                                  const std::vector<double>& noise) {
  record.validate();
  if (record.t_left < t) throw std::domain_error("expected_t2e_loglik: record precedes landmark");
  const double u = params.b + dot_or_zero(params.gamma, x) + fd.mu;
  const double tau_l = record.t_left - t;
  double total = -math::expm1_over(params.a, tau_l) * std::exp(u + 0.5 * fd.var);
  if (record.kind == EventRecord::Kind::observed) {
    total += u + params.a * tau_l;
  } else if (record.kind == EventRecord::Kind::interval_censored) {
    if (noise.empty()) throw std::invalid_argument("expected_t2e_loglik: interval record needs noise draws");
    const double k_f = math::expm1_over(params.a, record.t_right - record.t_left);
    const double sigma = std::sqrt(std::max(0.0, fd.var));
    double acc = 0.0;
    for (double eps : noise) {
      const double lam_hat = std::exp(u + params.a * tau_l + sigma * eps);
      acc += math::log1mexp(lam_hat * k_f);
    }
    total += acc / static_cast<double>(noise.size());
  }
  return total;
}

// Partials of expected_t2e_loglik w.r.t. the shift u = b + gamma'x + mu, the
// variance, and the slope a. Used by the trainer; kept next to the value
// computation so the two stay in lockstep.
struct T2eGrad {
  double value = 0.0;
  double d_shift = 0.0;  // d/du, u = b + gamma'x + mu
  double d_var = 0.0;
  double d_a = 0.0;
};

inline T2eGrad expected_t2e_loglik_grad(const HazardParams& params, const CovariateVector& x,
                                        const HistoryFeatureDist& fd, const EventRecord& record, double t,
                                        const std::vector<double>& noise) {
  record.validate();
  T2eGrad g;
  const double u = params.b + dot_or_zero(params.gamma, x) + fd.mu;
  const double tau_l = record.t_left - t;
  const double e0 = std::exp(u + 0.5 * fd.var);
  const double k_s = math::expm1_over(params.a, tau_l);
  const double es = -k_s * e0;
  g.value = es;
  g.d_shift = es;
  g.d_var = 0.5 * es;
  g.d_a = -e0 * math::expm1_over_da(params.a, tau_l);
  if (record.kind == EventRecord::Kind::observed) {
    g.value += u + params.a * tau_l;
    g.d_shift += 1.0;
    g.d_a += tau_l;
  } else if (record.kind == EventRecord::Kind::interval_censored) {
    if (noise.empty()) throw std::invalid_argument("expected_t2e_loglik_grad: interval record needs noise draws");
    const double dt = record.t_right - record.t_left;
    const double k_f = math::expm1_over(params.a, dt);
    const double dk_f = math::expm1_over_da(params.a, dt);
    const double sigma = std::sqrt(std::max(0.0, fd.var));
    const double inv_n = 1.0 / static_cast<double>(noise.size());
    // xi/(e^xi - 1), the derivative of log(1 - e^{-xi}) w.r.t. log xi; series
    // near 0, underflows cleanly for large xi
    auto dlog_dlogxi = [](double xi) { return xi < 1e-8 ? 1.0 - 0.5 * xi : xi / std::expm1(xi); };
    double val = 0.0, du = 0.0, dvar = 0.0, da = 0.0;
    for (double eps : noise) {
      const double lam_hat = std::exp(u + params.a * tau_l + sigma * eps);
      const double xi = lam_hat * k_f;
      val += math::log1mexp(xi);
      const double dxi = dlog_dlogxi(xi);
      du += dxi;
      da += dxi * (tau_l + dk_f / k_f);
      if (sigma >= 1e-8) {
        dvar += dxi * eps / (2.0 * sigma);
      } else {
        // smoothing identity: d/dvar E g(u + sigma eps) -> (1/2) g''(u)
        dvar += 0.5 * dxi * (1.0 - xi - dxi);
      }
    }
    g.value += val * inv_n;
    g.d_shift += du * inv_n;
    g.d_var += dvar * inv_n;
    g.d_a += da * inv_n;
  }
  return g;
}

}  // namespace survgp::survival

#endif  // SURVGP_SURVIVAL_HPP

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

#ifndef SURVGP_LONGITUDINAL_HPP
#define SURVGP_LONGITUDINAL_HPP

#include <Eigen/Cholesky>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "survgp/kernels.hpp"
#include "survgp/math.hpp"
#include "survgp/types.hpp"

// The multi-output longitudinal sub-model: each signal is a weighted sum of
// R shared latent functions plus one signal-specific latent function, every
// latent a Matern-1/2 GP approximated variationally through M inducing
// points, with Student-t (nu = 3) observation noise.
namespace survgp::longitudinal {

// One signal's irregular observations. signal_id is 1-based to match the
// on-disk format.
struct ObservationSeries {
  int signal_id = 1;
  Vec times;
  Vec values;

  void validate() const {
    if (times.size() != values.size()) throw validation_error("ObservationSeries: times/values length mismatch");
    for (Eigen::Index i = 0; i < times.size(); ++i) {
      if (!std::isfinite(times[i]) || !std::isfinite(values[i]))
        throw validation_error("ObservationSeries: non-finite entry");
      if (i > 0 && !(times[i] > times[i - 1]))
        throw validation_error("ObservationSeries: times must be strictly increasing");
    }
  }
};

// Variational parameters of one latent function: inducing inputs z, mean m,
// and the lower Cholesky factor of the covariance S (SPD by construction).
struct InducingBlock {
  Vec z;
  Vec m;
  Mat s_chol;

  Mat s() const { return s_chol * s_chol.transpose(); }
};

// Mixing weights of the coregionalization: w is D x R over the shared
// latents, kappa scales each signal-specific latent, noise_scale is the
// per-signal Student-t scale.
struct LMCWeights {
  Mat w;
  Vec kappa;
  Vec noise_scale;
};

struct SignalPosterior {
  Vec mean;
  Mat cov;
};

// Per-individual model state: R shared blocks followed by D signal-specific
// blocks, the mixing weights, the record length t_max that anchors the
// length-scale link, and the current mapped length-scales (refreshed from
// the global links whenever the individual is fit).
struct LocalState {
  std::vector<InducingBlock> blocks;
  LMCWeights weights;
  double t_max = 0.0;
  Vec lengthscales;
  int r_shared = 0;

  int n_signals() const { return static_cast<int>(weights.kappa.size()); }
  int n_latents() const { return static_cast<int>(blocks.size()); }
  const InducingBlock& shared_block(int r) const { return blocks[static_cast<std::size_t>(r)]; }
  const InducingBlock& signal_block(int d) const { return blocks[static_cast<std::size_t>(r_shared + d)]; }
};

// Posterior of one latent function at query times:
//   mean = K_NZ K_ZZ^{-1} m
//   cov  = K_NN - K_NZ K_ZZ^{-1} (I - S K_ZZ^{-1}) K_ZN
inline SignalPosterior predict_latent(const InducingBlock& block, double l, const Vec& query_times) {
  const auto chol = kernels::jittered_cholesky(kernels::matern12_gram(block.z, l));
  const Mat b = kernels::matern12_cross(query_times, block.z, l);
  const Mat v = chol.lower.triangularView<Eigen::Lower>().solve(b.transpose());              // L^{-1} K_ZN
  const Mat w = chol.lower.transpose().triangularView<Eigen::Upper>().solve(v);              // K_ZZ^{-1} K_ZN
  const Mat cw = block.s_chol.transpose() * w;                                               // C^T K_ZZ^{-1} K_ZN
  SignalPosterior post;
  post.mean = w.transpose() * block.m;
  post.cov = kernels::matern12_gram(query_times, l) - v.transpose() * v + cw.transpose() * cw;
  return post;
}

// Mean and variance only; the training path never needs dense covariances.
inline void predict_latent_diag(const InducingBlock& block, double l, const Vec& query_times, Vec* mean, Vec* var) {
  const auto chol = kernels::jittered_cholesky(kernels::matern12_gram(block.z, l));
  const Mat b = kernels::matern12_cross(query_times, block.z, l);
  const Mat v = chol.lower.triangularView<Eigen::Lower>().solve(b.transpose());
  const Mat w = chol.lower.transpose().triangularView<Eigen::Upper>().solve(v);
  const Mat cw = block.s_chol.transpose() * w;
  *mean = w.transpose() * block.m;
  *var = Vec::Ones(query_times.size()) - v.colwise().squaredNorm().transpose() +
         cw.colwise().squaredNorm().transpose();
}

// Signal posterior as the weighted combination of independent latents:
//   mu_d = sum_r w_dr mu_{g_r} + kappa_d mu_{v_d}
//   Sigma_d = sum_r w_dr^2 Sigma_{g_r} + kappa_d^2 Sigma_{v_d}
inline SignalPosterior predict_signal(const LocalState& local, int d, const Vec& query_times) {
  if (d < 0 || d >= local.n_signals()) throw std::out_of_range("predict_signal: bad signal index");
  SignalPosterior acc;
  acc.mean = Vec::Zero(query_times.size());
  acc.cov = Mat::Zero(query_times.size(), query_times.size());
  for (int r = 0; r < local.r_shared; ++r) {
    const double wdr = local.weights.w(d, r);
    if (wdr == 0.0) continue;
    const auto lat = predict_latent(local.shared_block(r), local.lengthscales[r], query_times);
    acc.mean += wdr * lat.mean;
    acc.cov += wdr * wdr * lat.cov;
  }
  const double kd = local.weights.kappa[d];
  if (kd != 0.0) {
    const auto lat =
        predict_latent(local.signal_block(d), local.lengthscales[local.r_shared + d], query_times);
    acc.mean += kd * lat.mean;
    acc.cov += kd * kd * lat.cov;
  }
  return acc;
}

// log density of the non-standardized Student-t with 3 degrees of freedom:
//   log( Gamma(2) / (Gamma(1.5) sqrt(3 pi) sigma) (1 + (y-f)^2/(3 sigma^2))^{-2} )
// the normalizer reduces to 2 / (pi sqrt(3) sigma).
inline double student_t_logpdf(double y, double f, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("student_t_logpdf: scale must be positive");
  constexpr double log_norm = -1.0008888496235095;  // log(2/(pi sqrt(3)))
  const double r = (y - f) / scale;
  return log_norm - std::log(scale) - 2.0 * std::log1p(r * r / 3.0);
}

// E_{f ~ N(mu_n, var_n)} log t3(y_n | f, sigma) summed over observations,
// by Gauss-Hermite quadrature:
//   sum_n sum_k w_k log t3(y_n | mu_n + sqrt(2 var_n) x_k, sigma) / sqrt(pi)
inline double expected_loglik_gh(const Vec& mean, const Vec& var, const Vec& values, double noise_scale,
                                 int n_nodes = 20) {
  if (n_nodes < 5) throw std::invalid_argument("expected_loglik_gh: need at least 5 nodes");
  if (mean.size() != var.size() || mean.size() != values.size())
    throw std::invalid_argument("expected_loglik_gh: size mismatch");
  const auto gh = math::gauss_hermite(n_nodes);
  const double inv_sqrt_pi = 1.0 / std::sqrt(math::pi);
  double total = 0.0;
  for (Eigen::Index n = 0; n < mean.size(); ++n) {
    const double s = std::sqrt(std::max(0.0, var[n]) * 2.0);
    double acc = 0.0;
    for (int k = 0; k < n_nodes; ++k) {
      acc += gh.weights[static_cast<std::size_t>(k)] *
             student_t_logpdf(values[n], mean[n] + s * gh.nodes[static_cast<std::size_t>(k)], noise_scale);
    }
    total += acc * inv_sqrt_pi;
  }
  return total;
}

}  // namespace survgp::longitudinal

#endif  // SURVGP_LONGITUDINAL_HPP

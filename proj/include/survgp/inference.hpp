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

#ifndef SURVGP_INFERENCE_HPP
#define SURVGP_INFERENCE_HPP

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <optional>
#include <vector>

#include "survgp/data.hpp"
#include "survgp/kernels.hpp"
#include "survgp/lbfgs.hpp"
#include "survgp/longitudinal.hpp"
#include "survgp/math.hpp"
#include "survgp/parallel.hpp"
#include "survgp/rng.hpp"
#include "survgp/survival.hpp"
#include "survgp/types.hpp"

// Training: the per-individual evidence lower bound summed over landmark grid
// points, its analytic gradient w.r.t. every local and global parameter,
// L-BFGS for the per-individual (local) solves, and minibatch AdaGrad for the
// shared (global) parameters.
namespace survgp::inference {

enum class NoiseModel { student_t, gaussian };

struct TrainConfig {
  double lr = 0.025;
  int max_global_iters = 1500;
  int minibatch = 2;
  int n_mc = 1000;           // reparameterization draws for interval censoring
  int local_max_iters = 500;
  int gh_nodes = 20;
  int m_inducing = 20;
  int r_shared = 2;
  double rel_tol = 1e-4;     // stop when max relative global change drops below
  std::uint64_t seed = 0;
  int threads = 0;           // 0 = hardware concurrency
  double t2e_weight = 1.0;   // 0 drops the event term (diagnostic mode)
  NoiseModel noise_model = NoiseModel::student_t;
};

// Shared parameters: the hazard (alpha, gamma, a, b, c) plus one length-scale
// link per latent function (R shared links first, then D signal-specific).
struct GlobalParams {
  survival::HazardParams hazard;
  std::vector<kernels::LengthScaleLink> links;
  int r_shared = 0;

  int n_latents() const { return static_cast<int>(links.size()); }
  int n_signals() const { return n_latents() - r_shared; }
};

// Five equally spaced landmark points covering the final two days, ending 15
// minutes before the event/censoring/record end; points before time zero are
// dropped, duplicates removed.
inline std::vector<double> grid_schedule(double end_time) {
  const double hi = end_time - 15.0;
  std::vector<double> pts;
  for (int i = 0; i < 5; ++i) {
    const double p = hi - 2880.0 + 2880.0 * static_cast<double>(i) / 4.0;
    if (p >= 0.0 && p <= hi) pts.push_back(p);
  }
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

inline std::vector<double> grid_schedule(const survival::EventRecord& record, double end_time) {
  return grid_schedule(std::min(record.end_time(), end_time));
}

// Per-coordinate AdaGrad: step = lr * g / (sqrt(sum g^2) + 1e-8), with the
// squared-gradient accumulator starting at zero.
struct Adagrad {
  double lr = 0.025;
  double eps = 1e-8;
  Vec accum;

  Vec step(const Vec& grad) {
    if (accum.size() == 0) accum = Vec::Zero(grad.size());
    accum.array() += grad.array().square();
    return (lr * grad.array() / (accum.array().sqrt() + eps)).matrix();
  }
};

// KL(N(m, S) || N(0, Kzz)) in closed form.
inline double kl_inducing(const longitudinal::InducingBlock& block, const Mat& kzz) {
  const auto chol = kernels::jittered_cholesky(kzz, 0.0, kernels::kMaxJitter);
  const Eigen::Index m = block.m.size();
  const Mat linv_c = chol.lower.triangularView<Eigen::Lower>().solve(block.s_chol);
  const Vec linv_m = chol.lower.triangularView<Eigen::Lower>().solve(block.m);
  double logdet_k = 0.0, logdet_s = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    logdet_k += std::log(chol.lower(i, i));
    logdet_s += std::log(block.s_chol(i, i));
  }
  return 0.5 * (linv_c.squaredNorm() + linv_m.squaredNorm() - static_cast<double>(m)) + logdet_k - logdet_s;
}

namespace detail {

// ---------------------------------------------------------------------------
// parameter packing
//
// local:  per latent [m (M), strict-lower C row-major (M(M-1)/2),
//         softplus-diag of C (M)], then w row-major (D*R), kappa (D),
//         softplus-inv noise scales (D)
// global: alpha (D), gamma (P), a, b, softplus-inv c, then (beta, beta0) per
//         latent (2J)
// ---------------------------------------------------------------------------

inline int local_block_dim(int m) { return m + m * (m - 1) / 2 + m; }

inline int local_dim(int j_latents, int m, int d, int r) {
  return j_latents * local_block_dim(m) + d * r + 2 * d;
}

inline int global_dim(int d, int p, int j_latents) { return d + p + 3 + 2 * j_latents; }

// The packed optimizer works in per-day units for the baseline slope so every
// coordinate has a comparable natural scale; a is 1/minutes in HazardParams.
inline constexpr double kSlopeScale = 1440.0;

inline Vec pack_local(const longitudinal::LocalState& local) {
  const int j_latents = local.n_latents();
  const int m = static_cast<int>(local.blocks[0].m.size());
  const int d = local.n_signals();
  const int r = local.r_shared;
  Vec x(local_dim(j_latents, m, d, r));
  int at = 0;
  for (const auto& block : local.blocks) {
    for (int i = 0; i < m; ++i) x[at++] = block.m[i];
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < i; ++k) x[at++] = block.s_chol(i, k);
    for (int i = 0; i < m; ++i) x[at++] = math::softplus_inv(block.s_chol(i, i));
  }
  for (int dd = 0; dd < d; ++dd)
    for (int rr = 0; rr < r; ++rr) x[at++] = local.weights.w(dd, rr);
  for (int dd = 0; dd < d; ++dd) x[at++] = local.weights.kappa[dd];
  for (int dd = 0; dd < d; ++dd) x[at++] = math::softplus_inv(local.weights.noise_scale[dd]);
  return x;
}

inline void unpack_local(const Vec& x, longitudinal::LocalState* local) {
  const int j_latents = local->n_latents();
  const int m = static_cast<int>(local->blocks[0].m.size());
  const int d = local->n_signals();
  const int r = local->r_shared;
  int at = 0;
  for (auto& block : local->blocks) {
    for (int i = 0; i < m; ++i) block.m[i] = x[at++];
    for (int i = 0; i < m; ++i)
      for (int k = 0; k < i; ++k) block.s_chol(i, k) = x[at++];
    for (int i = 0; i < m; ++i) block.s_chol(i, i) = math::softplus(x[at++]);
  }
  for (int dd = 0; dd < d; ++dd)
    for (int rr = 0; rr < r; ++rr) local->weights.w(dd, rr) = x[at++];
  for (int dd = 0; dd < d; ++dd) local->weights.kappa[dd] = x[at++];
  for (int dd = 0; dd < d; ++dd) local->weights.noise_scale[dd] = math::softplus(x[at++]);
  (void)j_latents;
}

inline Vec pack_global(const GlobalParams& global) {
  const int d = static_cast<int>(global.hazard.alpha.size());
  const int p = static_cast<int>(global.hazard.gamma.size());
  const int j_latents = global.n_latents();
  Vec x(global_dim(d, p, j_latents));
  int at = 0;
  for (int i = 0; i < d; ++i) x[at++] = global.hazard.alpha[i];
  for (int i = 0; i < p; ++i) x[at++] = global.hazard.gamma[i];
  x[at++] = global.hazard.a * kSlopeScale;
  x[at++] = global.hazard.b;
  x[at++] = math::softplus_inv(global.hazard.c);
  for (const auto& link : global.links) {
    x[at++] = link.beta;
    x[at++] = link.beta0;
  }
  return x;
}

inline void unpack_global(const Vec& x, GlobalParams* global) {
  const int d = static_cast<int>(global->hazard.alpha.size());
  const int p = static_cast<int>(global->hazard.gamma.size());
  int at = 0;
  for (int i = 0; i < d; ++i) global->hazard.alpha[i] = x[at++];
  for (int i = 0; i < p; ++i) global->hazard.gamma[i] = x[at++];
  global->hazard.a = x[at++] / kSlopeScale;
  global->hazard.b = x[at++];
  global->hazard.c = math::softplus(x[at++]);
  for (auto& link : global->links) {
    link.beta = x[at++];
    link.beta0 = x[at++];
  }
}

// ---------------------------------------------------------------------------
// per-individual preprocessing
// ---------------------------------------------------------------------------

struct PreparedIndividual {
  long long id = 0;
  double t_max = 1.0;
  survival::EventRecord event;
  Vec t_all;                       // all observation times, signals concatenated
  Vec y_all;
  std::vector<int> sig_offset;     // slice of each signal inside t_all
  std::vector<int> sig_count;
  Vec obs_weight;                  // how many grid points see each observation
  std::vector<double> schedule;
  std::vector<Vec> x_grid;         // covariates at each grid point
  std::vector<double> noise;       // frozen draws for the interval MC term

  int n_signals() const { return static_cast<int>(sig_count.size()); }
};

inline PreparedIndividual prepare_individual(const IndividualRecord& record,
                                             const std::vector<std::string>& covariate_names,
                                             const std::vector<double>& schedule, const TrainConfig& cfg) {
  record.validate();
  PreparedIndividual prep;
  prep.id = record.id;
  prep.event = record.event;
  prep.t_max = record.t_max();
  prep.schedule = schedule;
  const int d = record.n_signals();
  prep.sig_offset.resize(static_cast<std::size_t>(d));
  prep.sig_count.resize(static_cast<std::size_t>(d));
  int total = 0;
  for (int dd = 0; dd < d; ++dd) {
    prep.sig_offset[static_cast<std::size_t>(dd)] = total;
    prep.sig_count[static_cast<std::size_t>(dd)] = static_cast<int>(record.signals[static_cast<std::size_t>(dd)].times.size());
    total += prep.sig_count[static_cast<std::size_t>(dd)];
  }
  prep.t_all.resize(total);
  prep.y_all.resize(total);
  int at = 0;
  for (int dd = 0; dd < d; ++dd) {
    const auto& s = record.signals[static_cast<std::size_t>(dd)];
    for (Eigen::Index i = 0; i < s.times.size(); ++i) {
      prep.t_all[at] = s.times[i];
      prep.y_all[at] = s.values[i];
      ++at;
    }
  }
  prep.obs_weight = Vec::Zero(total);
  for (int i = 0; i < total; ++i) {
    for (double g : schedule)
      if (prep.t_all[i] <= g) prep.obs_weight[i] += 1.0;
  }
  prep.x_grid.reserve(schedule.size());
  for (double g : schedule) prep.x_grid.push_back(record.covariates.vector_at(covariate_names, g));
  const bool needs_noise = cfg.t2e_weight != 0.0 &&
                           record.event.kind == survival::EventRecord::Kind::interval_censored;
  if (needs_noise) {
    Rng rng = Rng(cfg.seed).substream("mc", static_cast<std::uint64_t>(record.id));
    prep.noise.resize(static_cast<std::size_t>(cfg.n_mc));
    for (auto& e : prep.noise) e = rng.normal();
  }
  return prep;
}

// ---------------------------------------------------------------------------
// ELBO and its gradient
// ---------------------------------------------------------------------------

struct LatentWork {
  Mat kzz;       // jittered K_ZZ
  Mat lchol;     // lower Cholesky factor
  Vec kinv_m;    // K^{-1} m
  Mat b;         // N_j x M cross-kernel at this latent's observation times
  Mat v;         // M x N_j, L^{-1} B'
  Mat w;         // M x N_j, K^{-1} B'
  Mat p;         // M x N_j, C' W
  Vec post_mean; // N_j
  Vec post_var;  // N_j
  int offset = 0;  // position of this latent's times inside t_all
  int count = 0;
  // adjoint accumulators
  Vec a_bar, q_bar;  // N_j
  Mat k_adj, b_adj, c_adj, s_adj;
  Vec m_adj;
  double l_adj = 0.0;
};

// Student-t (nu=3) local derivatives
struct TDerivs {
  double h, dh_df, d2h_df2, dh_dsigma;
};

inline TDerivs t3_derivs(double y, double f, double sigma) {
  constexpr double log_norm = -1.0008888496235095;
  const double r = y - f;
  const double u2 = r * r / (3.0 * sigma * sigma);
  const double denom = 1.0 + u2;
  TDerivs out;
  out.h = log_norm - std::log(sigma) - 2.0 * std::log1p(u2);
  out.dh_df = 4.0 * r / (3.0 * sigma * sigma * denom);
  out.d2h_df2 = -4.0 / (3.0 * sigma * sigma * denom) + 8.0 * r * r / (9.0 * sigma * sigma * sigma * sigma * denom * denom);
  out.dh_dsigma = -1.0 / sigma + 4.0 * r * r / (3.0 * sigma * sigma * sigma * denom);
  return out;
}

// Evaluates the per-individual objective
//   sum_g [ E_q log p(y^{0:t_g} | f) + E_q log p(T, delta | f, t_g) ] - G sum_j KL_j
// and optionally its gradient w.r.t. the packed local and global parameters.
inline double elbo_grad(const GlobalParams& global, const longitudinal::LocalState& local,
                        const PreparedIndividual& prep, const TrainConfig& cfg, Vec* grad_local,
                        Vec* grad_global) {
  const int d_signals = local.n_signals();
  const int r_shared = local.r_shared;
  const int j_latents = local.n_latents();
  const int m = static_cast<int>(local.blocks[0].m.size());
  const int p_cov = static_cast<int>(global.hazard.gamma.size());
  const int n_grid = static_cast<int>(prep.schedule.size());
  const bool want_local = grad_local != nullptr;
  const bool want_global = grad_global != nullptr;
  const bool want_grad = want_local || want_global;
  const bool with_t2e = cfg.t2e_weight != 0.0 && n_grid > 0;

  // no landmark points: the objective is an empty sum
  if (n_grid == 0) {
    if (want_local) grad_local->setZero(local_dim(j_latents, m, d_signals, r_shared));
    if (want_global) grad_global->setZero(global_dim(d_signals, p_cov, j_latents));
    return 0.0;
  }

  // mapped length-scales and their link sensitivities
  Vec lengthscales(j_latents), dl_dbeta(j_latents), dl_dbeta0(j_latents);
  for (int j = 0; j < j_latents; ++j) {
    lengthscales[j] = kernels::map_lengthscale(global.links[static_cast<std::size_t>(j)], prep.t_max);
    kernels::map_lengthscale_grad(global.links[static_cast<std::size_t>(j)], prep.t_max, &dl_dbeta[j], &dl_dbeta0[j]);
  }

  // ---- forward pass per latent -------------------------------------------
  std::vector<LatentWork> lat(static_cast<std::size_t>(j_latents));
  for (int j = 0; j < j_latents; ++j) {
    auto& lw = lat[static_cast<std::size_t>(j)];
    const auto& block = local.blocks[static_cast<std::size_t>(j)];
    const double l = lengthscales[j];
    const auto chol = kernels::jittered_cholesky(kernels::matern12_gram(block.z, l));
    lw.kzz = kernels::matern12_gram(block.z, l);
    lw.kzz.diagonal().array() += chol.jitter_used;
    lw.lchol = chol.lower;
    lw.kinv_m = lw.lchol.transpose().triangularView<Eigen::Upper>().solve(
        lw.lchol.triangularView<Eigen::Lower>().solve(block.m));
    if (j < r_shared) {
      lw.offset = 0;
      lw.count = static_cast<int>(prep.t_all.size());
    } else {
      lw.offset = prep.sig_offset[static_cast<std::size_t>(j - r_shared)];
      lw.count = prep.sig_count[static_cast<std::size_t>(j - r_shared)];
    }
    if (lw.count > 0) {
      lw.b = kernels::matern12_cross(prep.t_all.segment(lw.offset, lw.count), block.z, l);
      lw.v = lw.lchol.triangularView<Eigen::Lower>().solve(lw.b.transpose());
      lw.w = lw.lchol.transpose().triangularView<Eigen::Upper>().solve(lw.v);
      lw.p = block.s_chol.transpose() * lw.w;
      lw.post_mean = lw.b * lw.kinv_m;
      lw.post_var = (Vec::Ones(lw.count) - lw.v.colwise().squaredNorm().transpose() +
                     lw.p.colwise().squaredNorm().transpose());
    }
    if (want_grad) {
      lw.a_bar = Vec::Zero(lw.count);
      lw.q_bar = Vec::Zero(lw.count);
      lw.k_adj = Mat::Zero(m, m);
      lw.b_adj = Mat::Zero(lw.count, m);
      lw.c_adj = Mat::Zero(m, m);
      lw.s_adj = Mat::Zero(m, m);
      lw.m_adj = Vec::Zero(m);
    }
  }

  // adjoints for the mixing weights and hazard parameters
  Mat w_bar = Mat::Zero(d_signals, r_shared);
  Vec kappa_bar = Vec::Zero(d_signals);
  Vec sigma_bar = Vec::Zero(d_signals);
  Vec alpha_bar = Vec::Zero(d_signals);
  Vec gamma_bar = Vec::Zero(p_cov);
  double a_bar_g = 0.0, b_bar_g = 0.0, c_bar_g = 0.0;

  double value = 0.0;

  // ---- longitudinal expected log-likelihood -------------------------------
  const auto gh = math::gauss_hermite(cfg.gh_nodes);
  const double inv_sqrt_pi = 1.0 / std::sqrt(math::pi);
  for (int dd = 0; dd < d_signals; ++dd) {
    const int off = prep.sig_offset[static_cast<std::size_t>(dd)];
    const int cnt = prep.sig_count[static_cast<std::size_t>(dd)];
    const double sigma = local.weights.noise_scale[dd];
    const int jv = r_shared + dd;
    for (int i = 0; i < cnt; ++i) {
      const double weight = prep.obs_weight[off + i];
      if (weight == 0.0) continue;
      double mu = local.weights.kappa[dd] * lat[static_cast<std::size_t>(jv)].post_mean[i];
      double var = local.weights.kappa[dd] * local.weights.kappa[dd] * lat[static_cast<std::size_t>(jv)].post_var[i];
      for (int r = 0; r < r_shared; ++r) {
        const double wdr = local.weights.w(dd, r);
        mu += wdr * lat[static_cast<std::size_t>(r)].post_mean[off + i];
        var += wdr * wdr * lat[static_cast<std::size_t>(r)].post_var[off + i];
      }
      const double y = prep.y_all[off + i];
      const double var_c = std::max(0.0, var);
      double e_val = 0.0, d_mu = 0.0, d_var = 0.0, d_sigma = 0.0;
      if (cfg.noise_model == NoiseModel::gaussian) {
        // exact: E log N(y | f, sigma^2) under f ~ N(mu, var)
        const double r2 = (y - mu) * (y - mu);
        e_val = -0.5 * std::log(2.0 * math::pi) - std::log(sigma) - (r2 + var_c) / (2.0 * sigma * sigma);
        d_mu = (y - mu) / (sigma * sigma);
        d_var = -0.5 / (sigma * sigma);
        d_sigma = -1.0 / sigma + (r2 + var_c) / (sigma * sigma * sigma);
      } else {
        const double spread = std::sqrt(2.0 * var_c);
        for (int k = 0; k < cfg.gh_nodes; ++k) {
          const double xk = gh.nodes[static_cast<std::size_t>(k)];
          const double wk = gh.weights[static_cast<std::size_t>(k)];
          const auto td = t3_derivs(y, mu + spread * xk, sigma);
          e_val += wk * td.h;
          if (want_grad) {
            d_mu += wk * td.dh_df;
            d_sigma += wk * td.dh_dsigma;
            // derivative of the quadrature sum itself; exact half-Hessian
            // limit when the variance is (numerically) zero
            d_var += (var_c > 1e-18) ? wk * td.dh_df * xk / spread : 0.5 * wk * td.d2h_df2;
          }
        }
        e_val *= inv_sqrt_pi;
        d_mu *= inv_sqrt_pi;
        d_var *= inv_sqrt_pi;
        d_sigma *= inv_sqrt_pi;
      }
      value += weight * e_val;
      if (!want_grad) continue;
      d_mu *= weight;
      d_var *= weight;
      sigma_bar[dd] += weight * d_sigma;
      // distribute over the latent combination
      auto& lv = lat[static_cast<std::size_t>(jv)];
      const double kd = local.weights.kappa[dd];
      kappa_bar[dd] += d_mu * lv.post_mean[i] + d_var * 2.0 * kd * lv.post_var[i];
      lv.a_bar[i] += d_mu * kd;
      lv.q_bar[i] += d_var * kd * kd;
      for (int r = 0; r < r_shared; ++r) {
        auto& lr = lat[static_cast<std::size_t>(r)];
        const double wdr = local.weights.w(dd, r);
        w_bar(dd, r) += d_mu * lr.post_mean[off + i] + d_var * 2.0 * wdr * lr.post_var[off + i];
        lr.a_bar[off + i] += d_mu * wdr;
        lr.q_bar[off + i] += d_var * wdr * wdr;
      }
    }
  }

  // ---- time-to-event expected log-likelihood ------------------------------
  if (with_t2e) {
    for (int g = 0; g < n_grid; ++g) {
      const double t_g = prep.schedule[static_cast<std::size_t>(g)];
      const kernels::HistoryWeight hist{global.hazard.c, t_g};
      // per-latent integrated moments
      std::vector<double> coef(static_cast<std::size_t>(j_latents), 0.0);
      for (int r = 0; r < r_shared; ++r) {
        double acc = 0.0;
        for (int dd = 0; dd < d_signals; ++dd) acc += local.weights.w(dd, r) * global.hazard.alpha[dd];
        coef[static_cast<std::size_t>(r)] = acc;
      }
      for (int dd = 0; dd < d_signals; ++dd)
        coef[static_cast<std::size_t>(r_shared + dd)] = local.weights.kappa[dd] * global.hazard.alpha[dd];

      struct GridLatent {
        std::vector<math::Dual2> kb;
        math::Dual2 i_t;
        Vec kb_v, vkb, wkb, pkb, ysw;
        double u = 0.0, v = 0.0;
      };
      std::vector<GridLatent> gl(static_cast<std::size_t>(j_latents));
      double mu_t = 0.0, var_t = 0.0;
      for (int j = 0; j < j_latents; ++j) {
        if (coef[static_cast<std::size_t>(j)] == 0.0 && !want_grad) continue;
        auto& lw = lat[static_cast<std::size_t>(j)];
        auto& gj = gl[static_cast<std::size_t>(j)];
        const auto& block = local.blocks[static_cast<std::size_t>(j)];
        const double l = lengthscales[j];
        gj.kb.resize(static_cast<std::size_t>(m));
        gj.kb_v.resize(m);
        for (int k = 0; k < m; ++k) {
          gj.kb[static_cast<std::size_t>(k)] = kernels::integrated_cross_cov_dual(hist, l, block.z[k]);
          gj.kb_v[k] = gj.kb[static_cast<std::size_t>(k)].v;
        }
        gj.i_t = kernels::integrated_variance_dual(hist, l);
        gj.vkb = lw.lchol.triangularView<Eigen::Lower>().solve(gj.kb_v);
        gj.wkb = lw.lchol.transpose().triangularView<Eigen::Upper>().solve(gj.vkb);
        gj.pkb = block.s_chol.transpose() * gj.wkb;
        gj.u = gj.kb_v.dot(lw.kinv_m);
        gj.v = gj.i_t.v - gj.vkb.squaredNorm() + gj.pkb.squaredNorm();
        const double cj = coef[static_cast<std::size_t>(j)];
        mu_t += cj * gj.u;
        var_t += cj * cj * gj.v;
      }
      const bool var_clamped = var_t < 0.0;
      const survival::HistoryFeatureDist fd{mu_t, std::max(0.0, var_t)};
      const auto tg = survival::expected_t2e_loglik_grad(global.hazard, prep.x_grid[static_cast<std::size_t>(g)],
                                                         fd, prep.event, t_g, prep.noise);
      value += cfg.t2e_weight * tg.value;
      if (!want_grad) continue;
      const double d_mu = cfg.t2e_weight * tg.d_shift;
      const double d_var = var_clamped ? 0.0 : cfg.t2e_weight * tg.d_var;
      b_bar_g += cfg.t2e_weight * tg.d_shift;
      a_bar_g += cfg.t2e_weight * tg.d_a;
      gamma_bar += cfg.t2e_weight * tg.d_shift * prep.x_grid[static_cast<std::size_t>(g)];
      for (int j = 0; j < j_latents; ++j) {
        auto& lw = lat[static_cast<std::size_t>(j)];
        auto& gj = gl[static_cast<std::size_t>(j)];
        const double cj = coef[static_cast<std::size_t>(j)];
        const double u_bar = d_mu * cj;
        const double v_bar = d_var * cj * cj;
        const double coef_bar = d_mu * gj.u + d_var * 2.0 * cj * gj.v;
        // coefficient chain
        if (j < r_shared) {
          for (int dd = 0; dd < d_signals; ++dd) {
            w_bar(dd, j) += coef_bar * global.hazard.alpha[dd];
            alpha_bar[dd] += coef_bar * local.weights.w(dd, j);
          }
        } else {
          const int dd = j - r_shared;
          kappa_bar[dd] += coef_bar * global.hazard.alpha[dd];
          alpha_bar[dd] += coef_bar * local.weights.kappa[dd];
        }
        if (u_bar == 0.0 && v_bar == 0.0) continue;
        const auto& block = local.blocks[static_cast<std::size_t>(j)];
        gj.ysw = lw.lchol.transpose().triangularView<Eigen::Upper>().solve(
            lw.lchol.triangularView<Eigen::Lower>().solve(block.s_chol * gj.pkb));
        // u = kb' K^{-1} m, v = I_t - kb' K^{-1} kb + kb' K^{-1} S K^{-1} kb
        lw.m_adj += u_bar * gj.wkb;
        Vec kb_bar = u_bar * lw.kinv_m + 2.0 * v_bar * (gj.ysw - gj.wkb);
        lw.k_adj -= u_bar * gj.wkb * lw.kinv_m.transpose();
        lw.k_adj += v_bar * (gj.wkb * gj.wkb.transpose() - gj.ysw * gj.wkb.transpose() -
                             gj.wkb * gj.ysw.transpose());
        lw.s_adj += v_bar * gj.wkb * gj.wkb.transpose();
        c_bar_g += v_bar * gj.i_t.d0;
        lw.l_adj += v_bar * gj.i_t.d1;
        for (int k = 0; k < m; ++k) {
          c_bar_g += kb_bar[k] * gj.kb[static_cast<std::size_t>(k)].d0;
          lw.l_adj += kb_bar[k] * gj.kb[static_cast<std::size_t>(k)].d1;
        }
      }
    }
  }

  // ---- KL terms, counted once per grid point ------------------------------
  const double kl_mult = static_cast<double>(n_grid);
  for (int j = 0; j < j_latents; ++j) {
    auto& lw = lat[static_cast<std::size_t>(j)];
    const auto& block = local.blocks[static_cast<std::size_t>(j)];
    const Mat linv_c = lw.lchol.triangularView<Eigen::Lower>().solve(block.s_chol);
    double logdet_k = 0.0, logdet_s = 0.0;
    for (int i = 0; i < m; ++i) {
      logdet_k += std::log(lw.lchol(i, i));
      logdet_s += std::log(block.s_chol(i, i));
    }
    const double kl = 0.5 * (linv_c.squaredNorm() + block.m.dot(lw.kinv_m) - static_cast<double>(m)) +
                      logdet_k - logdet_s;
    value -= kl_mult * kl;
    if (!want_grad) continue;
    const Mat kinv_c = lw.lchol.transpose().triangularView<Eigen::Upper>().solve(linv_c);
    lw.m_adj -= kl_mult * lw.kinv_m;
    lw.c_adj -= kl_mult * kinv_c;
    for (int i = 0; i < m; ++i) lw.c_adj(i, i) += kl_mult / block.s_chol(i, i);
    const Mat linv = lw.lchol.triangularView<Eigen::Lower>().solve(Mat::Identity(m, m));
    const Mat kinv = linv.transpose() * linv;
    lw.k_adj -= kl_mult * 0.5 * (kinv - kinv_c * kinv_c.transpose() - lw.kinv_m * lw.kinv_m.transpose());
  }

  if (!want_grad) return value;

  // ---- finalize latent adjoints -------------------------------------------
  for (int j = 0; j < j_latents; ++j) {
    auto& lw = lat[static_cast<std::size_t>(j)];
    const auto& block = local.blocks[static_cast<std::size_t>(j)];
    if (lw.count > 0) {
      // post_mean path: a = B K^{-1} m
      const Vec r1 = lw.b.transpose() * lw.a_bar;
      const Vec kinv_r1 = lw.lchol.transpose().triangularView<Eigen::Upper>().solve(
          lw.lchol.triangularView<Eigen::Lower>().solve(r1));
      lw.m_adj += kinv_r1;
      lw.k_adj -= kinv_r1 * lw.kinv_m.transpose();
      lw.b_adj += lw.a_bar * lw.kinv_m.transpose();
      // post_var path: q = 1 - b'K^{-1}b + b'K^{-1}SK^{-1}b
      const Mat wq = lw.w * lw.q_bar.asDiagonal();
      const Mat sw = block.s_chol * lw.p;  // S K^{-1} B'
      const Mat y = lw.lchol.transpose().triangularView<Eigen::Upper>().solve(
          lw.lchol.triangularView<Eigen::Lower>().solve(sw));
      lw.b_adj += 2.0 * ((y - lw.w) * lw.q_bar.asDiagonal()).transpose();
      lw.s_adj += wq * lw.w.transpose();
      lw.k_adj += wq * lw.w.transpose() - (y * lw.q_bar.asDiagonal()) * lw.w.transpose() - wq * y.transpose();
    }
    // symmetric S-adjoint through the Cholesky factor
    lw.c_adj += 2.0 * lw.s_adj * block.s_chol;
    // kernel-matrix adjoints into the length-scale
    const double l = lengthscales[j];
    const double inv2l2 = 0.5 / (l * l);
    for (int pq = 0; pq < m; ++pq)
      for (int qq = 0; qq < m; ++qq) {
        if (pq == qq) continue;
        lw.l_adj += lw.k_adj(pq, qq) * lw.kzz(pq, qq) * std::abs(block.z[pq] - block.z[qq]) * inv2l2;
      }
    if (lw.count > 0) {
      for (int i = 0; i < lw.count; ++i) {
        const double ti = prep.t_all[lw.offset + i];
        for (int k = 0; k < m; ++k)
          lw.l_adj += lw.b_adj(i, k) * lw.b(i, k) * std::abs(ti - block.z[k]) * inv2l2;
      }
    }
  }

  // ---- pack gradients ------------------------------------------------------
  if (want_local) {
    grad_local->setZero(local_dim(j_latents, m, d_signals, r_shared));
    int at = 0;
    for (int j = 0; j < j_latents; ++j) {
      const auto& lw = lat[static_cast<std::size_t>(j)];
      const auto& block = local.blocks[static_cast<std::size_t>(j)];
      for (int i = 0; i < m; ++i) (*grad_local)[at++] = lw.m_adj[i];
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < i; ++k) (*grad_local)[at++] = lw.c_adj(i, k);
      for (int i = 0; i < m; ++i) {
        const double theta = math::softplus_inv(block.s_chol(i, i));
        (*grad_local)[at++] = lw.c_adj(i, i) * math::sigmoid(theta);
      }
    }
    for (int dd = 0; dd < d_signals; ++dd)
      for (int rr = 0; rr < r_shared; ++rr) (*grad_local)[at++] = w_bar(dd, rr);
    for (int dd = 0; dd < d_signals; ++dd) (*grad_local)[at++] = kappa_bar[dd];
    for (int dd = 0; dd < d_signals; ++dd) {
      const double theta = math::softplus_inv(local.weights.noise_scale[dd]);
      (*grad_local)[at++] = sigma_bar[dd] * math::sigmoid(theta);
    }
  }
  if (want_global) {
    grad_global->setZero(global_dim(d_signals, p_cov, j_latents));
    int at = 0;
    for (int i = 0; i < d_signals; ++i) (*grad_global)[at++] = alpha_bar[i];
    for (int i = 0; i < p_cov; ++i) (*grad_global)[at++] = gamma_bar[i];
    (*grad_global)[at++] = a_bar_g / kSlopeScale;
    (*grad_global)[at++] = b_bar_g;
    const double theta_c = math::softplus_inv(global.hazard.c);
    (*grad_global)[at++] = c_bar_g * math::sigmoid(theta_c);
    for (int j = 0; j < j_latents; ++j) {
      (*grad_global)[at++] = lat[static_cast<std::size_t>(j)].l_adj * dl_dbeta[j];
      (*grad_global)[at++] = lat[static_cast<std::size_t>(j)].l_adj * dl_dbeta0[j];
    }
  }
  return value;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// public training surface
// ---------------------------------------------------------------------------

// Fresh local state: zero inducing means, 0.1 I covariance factors, small
// random mixing weights, unit kappa, noise scale from the sample std.
inline longitudinal::LocalState init_local_state(const IndividualRecord& record, const GlobalParams& global,
                                                 const TrainConfig& cfg) {
  longitudinal::LocalState local;
  const int d = record.n_signals();
  local.r_shared = cfg.r_shared;
  local.t_max = record.t_max();
  const int j_latents = cfg.r_shared + d;
  local.lengthscales = Vec::Zero(j_latents);
  local.blocks.resize(static_cast<std::size_t>(j_latents));
  for (int j = 0; j < j_latents; ++j) {
    auto& block = local.blocks[static_cast<std::size_t>(j)];
    block.z = Vec::LinSpaced(cfg.m_inducing, 0.0, local.t_max);
    block.m = Vec::Zero(cfg.m_inducing);
    block.s_chol = Mat::Identity(cfg.m_inducing, cfg.m_inducing) * 0.1;
    local.lengthscales[j] = kernels::map_lengthscale(global.links[static_cast<std::size_t>(j)], local.t_max);
  }
  Rng rng = Rng(cfg.seed).substream("init", static_cast<std::uint64_t>(record.id));
  local.weights.w = Mat::NullaryExpr(d, cfg.r_shared, [&](Eigen::Index, Eigen::Index) { return rng.uniform(-0.1, 0.1); });
  local.weights.kappa = Vec::Ones(d);
  local.weights.noise_scale = Vec::Ones(d);
  for (int dd = 0; dd < d; ++dd) {
    const auto& v = record.signals[static_cast<std::size_t>(dd)].values;
    if (v.size() >= 2) {
      const double mean = v.mean();
      const double sd = std::sqrt((v.array() - mean).square().sum() / static_cast<double>(v.size() - 1));
      local.weights.noise_scale[dd] = std::max(0.05, sd);
    }
  }
  return local;
}

// Default global parameters: zero hazard coefficients, a crude constant-rate
// intercept, a long-range link for the first shared latent, short-range for
// the rest.
inline GlobalParams init_global_params(const std::vector<IndividualRecord>& population,
                                       const std::vector<std::string>& covariate_names, const TrainConfig& cfg) {
  GlobalParams global;
  int d = 0;
  for (const auto& r : population) d = std::max(d, r.n_signals());
  global.r_shared = cfg.r_shared;
  global.hazard.alpha = Vec::Zero(d);
  global.hazard.gamma = Vec::Zero(static_cast<Eigen::Index>(covariate_names.size()));
  global.hazard.a = 0.0;
  global.hazard.c = 0.01;
  double events = 0.5, exposure = 1.0;
  for (const auto& r : population) {
    exposure += r.event.end_time();
    if (r.event.kind != survival::EventRecord::Kind::right_censored) events += 1.0;
  }
  global.hazard.b = std::log(events / exposure);
  global.links.resize(static_cast<std::size_t>(cfg.r_shared + d));
  for (int j = 0; j < cfg.r_shared + d; ++j) {
    global.links[static_cast<std::size_t>(j)] =
        (j == 0) ? kernels::LengthScaleLink{1.0, -12.0} : kernels::LengthScaleLink{1e-5, -5.0};
  }
  return global;
}

// ELBO at a single landmark grid point (Eq.-style assembly used by tests and
// diagnostics). Deterministic given cfg.seed.
inline double elbo_individual(const GlobalParams& global, const longitudinal::LocalState& local,
                              const IndividualRecord& record, double grid_t,
                              const std::vector<std::string>& covariate_names, const TrainConfig& cfg) {
  const auto prep = detail::prepare_individual(record, covariate_names, {grid_t}, cfg);
  return detail::elbo_grad(global, local, prep, cfg, nullptr, nullptr);
}

// Objective summed over a landmark schedule.
inline double objective_individual(const GlobalParams& global, const longitudinal::LocalState& local,
                                   const IndividualRecord& record, const std::vector<double>& schedule,
                                   const std::vector<std::string>& covariate_names, const TrainConfig& cfg) {
  const auto prep = detail::prepare_individual(record, covariate_names, schedule, cfg);
  return detail::elbo_grad(global, local, prep, cfg, nullptr, nullptr);
}

struct LocalFit {
  longitudinal::LocalState state;
  double elbo = 0.0;
  bool converged = false;
  int iters = 0;
};

// Maximizes the per-individual objective over the local parameters with
// L-BFGS, warm-starting from `warm` when provided.
inline LocalFit fit_local(const GlobalParams& global, const IndividualRecord& record,
                          const std::vector<double>& schedule, const std::vector<std::string>& covariate_names,
                          const TrainConfig& cfg, const longitudinal::LocalState* warm = nullptr) {
  const auto prep = detail::prepare_individual(record, covariate_names, schedule, cfg);
  longitudinal::LocalState state = warm ? *warm : init_local_state(record, global, cfg);
  // keep the mapped length-scales current for downstream prediction
  for (int j = 0; j < state.n_latents(); ++j)
    state.lengthscales[j] = kernels::map_lengthscale(global.links[static_cast<std::size_t>(j)], state.t_max);

  Vec x0 = detail::pack_local(state);
  longitudinal::LocalState work = state;
  auto objective = [&](const Vec& x, Vec* grad) -> double {
    detail::unpack_local(x, &work);
    double val;
    try {
      val = detail::elbo_grad(global, work, prep, cfg, grad, nullptr);
    } catch (const ill_conditioned_kernel&) {
      if (grad) grad->setZero(x.size());
      return std::numeric_limits<double>::quiet_NaN();
    }
    if (grad) *grad = -*grad;
    return -val;
  };
  LbfgsOptions opts;
  opts.max_iters = cfg.local_max_iters;
  const auto res = lbfgs_minimize(objective, x0, opts);
  LocalFit fit;
  if (std::isfinite(res.f)) {
    detail::unpack_local(res.x, &state);
    fit.elbo = -res.f;
  } else {
    fit.elbo = std::numeric_limits<double>::quiet_NaN();
  }
  fit.state = state;
  fit.converged = res.converged;
  fit.iters = res.iters;
  return fit;
}

struct FitResult {
  GlobalParams global;
  std::vector<longitudinal::LocalState> locals;
  std::vector<Vec> trajectory;  // packed global parameters per iteration
  int iterations = 0;
  bool stopped_by_tolerance = false;
  int divergent_resets = 0;
};

namespace detail {

// Two-stage warm start for the hazard coefficients: fit every individual's
// longitudinal model alone, summarize each by the posterior mean of the
// weighted signal histories at the final landmark, and maximize the censored
// likelihood of a constant-baseline hazard over (b, alpha) on those fixed
// features. The joint stochastic loop then refines everything.
struct TwoStageInit {
  Vec alpha;
  double b = -8.0;
  std::vector<std::optional<longitudinal::LocalState>> warm_locals;
};

inline TwoStageInit two_stage_init(const std::vector<IndividualRecord>& population,
                                   const std::vector<std::string>& covariate_names, const GlobalParams& global,
                                   const TrainConfig& cfg) {
  const int n = static_cast<int>(population.size());
  const int d_signals = static_cast<int>(global.hazard.alpha.size());
  TwoStageInit init;
  init.warm_locals.resize(static_cast<std::size_t>(n));

  TrainConfig gp_cfg = cfg;
  gp_cfg.t2e_weight = 0.0;
  gp_cfg.local_max_iters = std::min(cfg.local_max_iters, 80);

  struct Row {
    Vec feature;          // per-signal weighted-history posterior means
    survival::EventRecord event;
    double t = 0.0;
  };
  std::vector<std::vector<Row>> rows(static_cast<std::size_t>(n));
  parallel_for(n, cfg.threads, [&](int i) {
    const auto& record = population[static_cast<std::size_t>(i)];
    const auto schedule = grid_schedule(record.event.end_time());
    if (schedule.empty()) return;
    auto fit = fit_local(global, record, {schedule.back()}, covariate_names, gp_cfg, nullptr);
    if (!std::isfinite(fit.elbo)) return;
    init.warm_locals[static_cast<std::size_t>(i)] = fit.state;
    const auto& local = fit.state;
    // one row per landmark so early points carry real exposure variation
    for (double t : schedule) {
      const kernels::HistoryWeight hist{global.hazard.c, t};
      Vec u(local.n_latents());
      for (int j = 0; j < local.n_latents(); ++j) {
        const auto& block = local.blocks[static_cast<std::size_t>(j)];
        Vec kbar(block.z.size());
        for (Eigen::Index k = 0; k < block.z.size(); ++k)
          kbar[k] = kernels::integrated_cross_cov(hist, local.lengthscales[j], block.z[k]);
        const auto chol = kernels::jittered_cholesky(kernels::matern12_gram(block.z, local.lengthscales[j]));
        const Vec w = chol.lower.transpose().triangularView<Eigen::Upper>().solve(
            chol.lower.triangularView<Eigen::Lower>().solve(kbar));
        u[j] = w.dot(block.m);
      }
      Row row;
      row.feature = Vec::Zero(d_signals);
      for (int dd = 0; dd < d_signals; ++dd) {
        double f = local.weights.kappa[dd] * u[local.r_shared + dd];
        for (int r = 0; r < local.r_shared; ++r) f += local.weights.w(dd, r) * u[r];
        row.feature[dd] = f;
      }
      row.event = record.event;
      row.t = t;
      rows[static_cast<std::size_t>(i)].push_back(row);
    }
  });

  // concave-likelihood regression of the event data on the fixed features,
  // constant baseline: log lambda = b + alpha' feature
  auto objective = [&](const Vec& x, Vec* grad) -> double {
    const double b = x[0];
    double value = 0.0;
    grad->setZero(x.size());
    for (const auto& individual_rows : rows) {
      for (const auto& row : individual_rows) {
        const double eta = b + row.feature.dot(x.tail(d_signals));
        const double lam = std::exp(eta);
        const double tau_l = row.event.t_left - row.t;
        // -Lambda(t, T_l) with a = 0
        value += -lam * tau_l;
        double deta = -lam * tau_l;
        if (row.event.kind == survival::EventRecord::Kind::observed) {
          value += eta;
          deta += 1.0;
        } else if (row.event.kind == survival::EventRecord::Kind::interval_censored) {
          const double xi = lam * (row.event.t_right - row.event.t_left);
          value += math::log1mexp(xi);
          deta += xi < 1e-8 ? 1.0 - 0.5 * xi : xi / std::expm1(xi);
        }
        (*grad)[0] += deta;
        grad->tail(d_signals) += deta * row.feature;
      }
    }
    *grad = -*grad;
    return -value;
  };
  Vec x0 = Vec::Zero(1 + d_signals);
  x0[0] = global.hazard.b;
  LbfgsOptions opts;
  opts.max_iters = 200;
  const auto res = lbfgs_minimize(objective, x0, opts);
  if (std::isfinite(res.f)) {
    init.b = res.x[0];
    init.alpha = res.x.tail(d_signals);
  } else {
    init.b = global.hazard.b;
    init.alpha = Vec::Zero(d_signals);
  }
  return init;
}

}  // namespace detail

// Stochastic training loop: each round optimizes the local parameters of a
// random minibatch (in parallel, against a fixed snapshot of the globals) and
// takes one AdaGrad ascent step on the mean per-individual global gradient.
// Stops when the largest relative change across global parameters falls
// below rel_tol or the iteration cap is reached.
inline FitResult fit_global(const std::vector<IndividualRecord>& population,
                            const std::vector<std::string>& covariate_names, const TrainConfig& cfg) {
  if (population.empty()) throw validation_error("fit_global: empty population");
  const int n = static_cast<int>(population.size());
  GlobalParams global = init_global_params(population, covariate_names, cfg);
  std::vector<std::vector<double>> schedules(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    schedules[static_cast<std::size_t>(i)] = grid_schedule(population[static_cast<std::size_t>(i)].event.end_time());

  // two-stage warm start for (alpha, b); its GP-only fits seed the caches
  auto stage1 = detail::two_stage_init(population, covariate_names, global, cfg);
  if (stage1.alpha.size() == global.hazard.alpha.size()) {
    global.hazard.alpha = stage1.alpha;
    global.hazard.b = stage1.b;
  }
  std::vector<std::optional<longitudinal::LocalState>> cache = std::move(stage1.warm_locals);
  Vec theta = detail::pack_global(global);
  Adagrad opt;
  opt.lr = cfg.lr;
  FitResult out;
  out.trajectory.push_back(theta);

  Rng batch_rng = Rng(cfg.seed).substream("batch");
  const int batch_size = std::min(cfg.minibatch, n);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  for (int iter = 0; iter < cfg.max_global_iters; ++iter) {
    // sample a minibatch without replacement
    for (int i = 0; i < batch_size; ++i) {
      const int j = i + static_cast<int>(batch_rng.next_u64() % static_cast<std::uint64_t>(n - i));
      std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    std::vector<Vec> grads(static_cast<std::size_t>(batch_size));
    std::vector<bool> ok(static_cast<std::size_t>(batch_size), false);
    parallel_for(batch_size, cfg.threads, [&](int bi) {
      const int idx = order[static_cast<std::size_t>(bi)];
      const auto& record = population[static_cast<std::size_t>(idx)];
      const auto& schedule = schedules[static_cast<std::size_t>(idx)];
      const auto* warm = cache[static_cast<std::size_t>(idx)] ? &*cache[static_cast<std::size_t>(idx)] : nullptr;
      auto fit = fit_local(global, record, schedule, covariate_names, cfg, warm);
      if (!std::isfinite(fit.elbo)) return;  // leave ok=false, reset below
      cache[static_cast<std::size_t>(idx)] = fit.state;
      const auto prep = detail::prepare_individual(record, covariate_names, schedule, cfg);
      Vec g;
      detail::elbo_grad(global, fit.state, prep, cfg, nullptr, &g);
      if (!g.allFinite()) return;
      grads[static_cast<std::size_t>(bi)] = std::move(g);
      ok[static_cast<std::size_t>(bi)] = true;
    });

    Vec mean_grad = Vec::Zero(theta.size());
    int used = 0;
    for (int bi = 0; bi < batch_size; ++bi) {
      if (ok[static_cast<std::size_t>(bi)]) {
        mean_grad += grads[static_cast<std::size_t>(bi)];
        ++used;
      } else {
        const int idx = order[static_cast<std::size_t>(bi)];
        cache[static_cast<std::size_t>(idx)].reset();
        ++out.divergent_resets;
        std::cerr << "fit_global: resetting diverged individual " << population[static_cast<std::size_t>(idx)].id
                  << " at iteration " << iter << "\n";
      }
    }
    out.iterations = iter + 1;
    if (used == 0) continue;
    mean_grad /= static_cast<double>(used);

    // AdaGrad ascent
    const Vec theta_new = theta + opt.step(mean_grad);
    double rel_change = 0.0;
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      rel_change = std::max(rel_change, std::abs(theta_new[i] - theta[i]) / (std::abs(theta[i]) + 1e-8));
    theta = theta_new;
    detail::unpack_global(theta, &global);
    out.trajectory.push_back(theta);
    if (rel_change < cfg.rel_tol) {
      out.stopped_by_tolerance = true;
      break;
    }
  }

  // final local refresh for the whole population at the final globals
  out.locals.resize(static_cast<std::size_t>(n));
  parallel_for(n, cfg.threads, [&](int i) {
    const auto* warm = cache[static_cast<std::size_t>(i)] ? &*cache[static_cast<std::size_t>(i)] : nullptr;
    auto fit = fit_local(global, population[static_cast<std::size_t>(i)], schedules[static_cast<std::size_t>(i)],
                         covariate_names, cfg, warm);
    if (!std::isfinite(fit.elbo))
      fit = fit_local(global, population[static_cast<std::size_t>(i)], schedules[static_cast<std::size_t>(i)],
                      covariate_names, cfg, nullptr);
    out.locals[static_cast<std::size_t>(i)] = fit.state;
  });
  out.global = global;
  return out;
}

}  // namespace survgp::inference

#endif  // SURVGP_INFERENCE_HPP

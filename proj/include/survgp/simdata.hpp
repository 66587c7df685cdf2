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

#ifndef SURVGP_SIMDATA_HPP
#define SURVGP_SIMDATA_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "survgp/data.hpp"
#include "survgp/inference.hpp"
#include "survgp/kernels.hpp"
#include "survgp/rng.hpp"

// Synthetic populations drawn from the model's own generative process:
// Matern-1/2 latent paths (sampled exactly through the Markov transition),
// linear mixing into signals, Student-t observation noise at Poisson times,
// event times inverted from the integrated hazard, and right/interval
// censoring. Ground truth is kept alongside each record for test use.
namespace survgp::simdata {

struct SimSpec {
  int n_individuals = 60;
  int d_signals = 3;
  int r_shared = 2;
  inference::GlobalParams truth;
  Mat lmc_weights;       // D x R, shared by all individuals
  Vec kappa;             // D
  Vec noise_scale;       // D, Student-t scale
  Vec obs_rate_per_hour; // D
  double duration_min = 4320.0;
  double duration_max = 7200.0;
  double censor_right_frac = 0.2;
  double censor_interval_frac = 0.1;
  int n_covariates = 0;  // static standard-normal covariates
  // observation thinning: a sparsified individual keeps each observation
  // independently with probability sparsify_keep (missing-at-random)
  double sparsify_frac = 0.0;
  double sparsify_keep = 0.3;
  std::uint64_t seed = 0;

  void validate() const {
    if (n_individuals <= 0 || d_signals <= 0 || r_shared < 0) throw validation_error("SimSpec: bad sizes");
    if (censor_right_frac < 0 || censor_interval_frac < 0 ||
        censor_right_frac + censor_interval_frac > 1.0)
      throw validation_error("SimSpec: censoring fractions must be nonnegative and sum to at most 1");
    if ((obs_rate_per_hour.array() <= 0.0).any()) throw validation_error("SimSpec: rates must be positive");
    if (!(duration_min > 0.0 && duration_max >= duration_min)) throw validation_error("SimSpec: bad durations");
  }

  std::vector<std::string> covariate_names() const {
    std::vector<std::string> names;
    for (int i = 0; i < n_covariates; ++i) names.push_back("cov" + std::to_string(i + 1));
    return names;
  }
};

struct GroundTruth {
  Vec fine_times;          // one-minute grid over the full window
  Mat latents_fine;        // (R+D) x n_fine
  std::vector<Vec> signal_at_obs;  // noiseless f_d at that signal's times
  double duration = 0.0;
  double fbar_star = 0.0;  // weighted history feature driving the event draw
  double t_event_true = std::numeric_limits<double>::infinity();
};

struct SimulatedIndividual {
  IndividualRecord record;
  GroundTruth truth;
};

struct SimulatedPopulation {
  SimSpec spec;
  std::vector<SimulatedIndividual> individuals;
  std::vector<std::string> covariate_names;
};

// Exact draw of a unit-variance Matern-1/2 path at sorted times via the
// Ornstein-Uhlenbeck transition f_{k+1} = phi f_k + sqrt(1-phi^2) z.
inline Vec ou_path(const Vec& times, double lengthscale, Rng& rng) {
  Vec f(times.size());
  if (times.size() == 0) return f;
  f[0] = rng.normal();
  for (Eigen::Index i = 1; i < times.size(); ++i) {
    const double phi = std::exp(-0.5 * (times[i] - times[i - 1]) / lengthscale);
    f[i] = phi * f[i - 1] + std::sqrt(std::max(0.0, 1.0 - phi * phi)) * rng.normal();
  }
  return f;
}

// Inverts Lambda(0, T) = E with E ~ Exp(1) under the constant-feature hazard
// lambda(s) = lambda0 exp(a s). Returns +inf when a < 0 and the total hazard
// mass is exhausted before the event.
inline double sample_event_time(const survival::HazardParams& params, const Vec& x, double fbar_star, Rng& rng) {
  const double lam0 = std::exp(params.b + survival::dot_or_zero(params.gamma, x) + fbar_star);
  const double e = rng.exponential();
  if (std::abs(params.a) < 1e-12) return e / lam0;
  const double arg = params.a * e / lam0;
  if (arg <= -1.0) return std::numeric_limits<double>::infinity();
  return std::log1p(arg) / params.a;
}

inline SimulatedIndividual sample_individual(const SimSpec& spec, long long id, const Rng& base) {
  Rng rng = base.substream("simulate", static_cast<std::uint64_t>(id));
  SimulatedIndividual out;
  out.record.id = id;
  const int d = spec.d_signals;
  const int j_latents = spec.r_shared + d;
  const double duration = rng.uniform(spec.duration_min, spec.duration_max);
  out.truth.duration = duration;

  // observation times: homogeneous Poisson per signal
  std::vector<Vec> obs_times(static_cast<std::size_t>(d));
  for (int dd = 0; dd < d; ++dd) {
    const int count = rng.poisson(spec.obs_rate_per_hour[dd] / 60.0 * duration);
    std::vector<double> ts(static_cast<std::size_t>(count));
    for (auto& t : ts) t = rng.uniform(0.0, duration);
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    obs_times[static_cast<std::size_t>(dd)] = Eigen::Map<Vec>(ts.data(), static_cast<Eigen::Index>(ts.size()));
  }

  // union of the one-minute grid and all observation times
  std::vector<double> grid;
  for (double t = 0.0; t <= duration; t += 1.0) grid.push_back(t);
  for (const auto& ts : obs_times)
    for (Eigen::Index i = 0; i < ts.size(); ++i) grid.push_back(ts[i]);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  const Vec union_times = Eigen::Map<Vec>(grid.data(), static_cast<Eigen::Index>(grid.size()));

  // latent paths; length-scales anchored at the full window duration
  Mat latents(j_latents, union_times.size());
  for (int j = 0; j < j_latents; ++j) {
    const double l = kernels::map_lengthscale(spec.truth.links[static_cast<std::size_t>(j)], duration);
    latents.row(j) = ou_path(union_times, l, rng).transpose();
  }

  // covariates, static at time zero
  Vec x(spec.n_covariates);
  for (int i = 0; i < spec.n_covariates; ++i) {
    x[i] = rng.normal();
    out.record.covariates.add("cov" + std::to_string(i + 1), 0.0, x[i]);
  }

  // noiseless signals at the union grid, observations with Student-t noise
  auto signal_row = [&](int dd) {
    Vec f = spec.kappa[dd] * latents.row(spec.r_shared + dd).transpose();
    for (int r = 0; r < spec.r_shared; ++r) f += spec.lmc_weights(dd, r) * latents.row(r).transpose();
    return f;
  };
  std::vector<Vec> signals_union(static_cast<std::size_t>(d));
  for (int dd = 0; dd < d; ++dd) signals_union[static_cast<std::size_t>(dd)] = signal_row(dd);

  out.truth.signal_at_obs.resize(static_cast<std::size_t>(d));
  out.record.signals.resize(static_cast<std::size_t>(d));
  for (int dd = 0; dd < d; ++dd) {
    const auto& ts = obs_times[static_cast<std::size_t>(dd)];
    Vec clean(ts.size()), noisy(ts.size());
    for (Eigen::Index i = 0; i < ts.size(); ++i) {
      const auto it = std::lower_bound(grid.begin(), grid.end(), ts[i]);
      const Eigen::Index gi = static_cast<Eigen::Index>(it - grid.begin());
      clean[i] = signals_union[static_cast<std::size_t>(dd)][gi];
      noisy[i] = clean[i] + spec.noise_scale[dd] * rng.student_t3();
    }
    out.truth.signal_at_obs[static_cast<std::size_t>(dd)] = clean;
    auto& series = out.record.signals[static_cast<std::size_t>(dd)];
    series.signal_id = dd + 1;
    series.times = ts;
    series.values = noisy;
  }

  // Running history feature fbar(s) = alpha' int_0^s rho_c(u;s) f(u) du on
  // the union grid, through the exponential-window recursion
  //   W(s+dt) = e^{-c dt} W(s) + trapezoid increment,  fbar = c' alpha' W.
  const double c_rate = spec.truth.hazard.c;
  const Eigen::Index n_grid = union_times.size();
  Vec fbar_path(n_grid);
  {
    Vec af(n_grid);
    for (Eigen::Index i = 0; i < n_grid; ++i) {
      double acc = 0.0;
      for (int dd = 0; dd < d; ++dd)
        acc += spec.truth.hazard.alpha[dd] * signals_union[static_cast<std::size_t>(dd)][i];
      af[i] = acc;
    }
    double w_acc = 0.0;
    fbar_path[0] = af[0];
    for (Eigen::Index i = 1; i < n_grid; ++i) {
      const double dt = union_times[i] - union_times[i - 1];
      const double decay = std::exp(-c_rate * dt);
      w_acc = decay * w_acc + 0.5 * dt * (decay * af[i - 1] + af[i]);
      const double cprime = c_rate / (-std::expm1(-c_rate * union_times[i]));
      fbar_path[i] = cprime * w_acc;
    }
  }
  out.truth.fbar_star = fbar_path[n_grid - 1];

  // Event time by time-rescaling of lambda(s) = exp(b + a s + gamma'x + fbar(s)):
  // accumulate the integrated hazard until it crosses an Exp(1) draw.
  const double eta0 = spec.truth.hazard.b + survival::dot_or_zero(spec.truth.hazard.gamma, x);
  const double target = rng.exponential();
  double t_true = std::numeric_limits<double>::infinity();
  {
    double cum = 0.0;
    double lam_prev = std::exp(eta0 + fbar_path[0]);
    for (Eigen::Index i = 1; i < n_grid; ++i) {
      const double dt = union_times[i] - union_times[i - 1];
      const double lam = std::exp(eta0 + spec.truth.hazard.a * union_times[i] + fbar_path[i]);
      const double inc = 0.5 * dt * (lam_prev + lam);
      if (cum + inc >= target) {
        t_true = union_times[i - 1] + dt * (target - cum) / std::max(inc, 1e-300);
        break;
      }
      cum += inc;
      lam_prev = lam;
    }
  }
  out.truth.t_event_true = t_true;
  auto& event = out.record.event;
  const double u_censor = rng.uniform();
  const bool event_in_window = t_true <= duration;
  if (u_censor < spec.censor_right_frac) {
    // uniform truncation strictly before the (possibly unobserved) event
    event.kind = survival::EventRecord::Kind::right_censored;
    event.t_left = rng.uniform(0.0, std::min(t_true, duration));
  } else if (u_censor < spec.censor_right_frac + spec.censor_interval_frac && event_in_window) {
    const double width = rng.uniform(60.0, 720.0);
    double left = t_true - rng.uniform() * width;
    left = std::max(0.0, left);
    event.kind = survival::EventRecord::Kind::interval_censored;
    event.t_left = left;
    event.t_right = left + width;
  } else if (event_in_window) {
    event.kind = survival::EventRecord::Kind::observed;
    event.t_event = event.t_left = t_true;
  } else {
    // event-free within the window: administrative right censoring at the end
    event.kind = survival::EventRecord::Kind::right_censored;
    event.t_left = duration;
  }

  // observations end when the record ends
  const double end = event.end_time();
  for (int dd = 0; dd < d; ++dd) {
    auto& series = out.record.signals[static_cast<std::size_t>(dd)];
    Eigen::Index keep = 0;
    while (keep < series.times.size() && series.times[keep] <= end) ++keep;
    series.times = series.times.head(keep).eval();
    series.values = series.values.head(keep).eval();
    out.truth.signal_at_obs[static_cast<std::size_t>(dd)] =
        out.truth.signal_at_obs[static_cast<std::size_t>(dd)].head(keep).eval();
  }

  // missing-at-random thinning for the sparsified share of the population
  if (spec.sparsify_frac > 0.0 && rng.uniform() < spec.sparsify_frac) {
    for (int dd = 0; dd < d; ++dd) {
      auto& series = out.record.signals[static_cast<std::size_t>(dd)];
      auto& clean = out.truth.signal_at_obs[static_cast<std::size_t>(dd)];
      std::vector<Eigen::Index> kept;
      for (Eigen::Index i = 0; i < series.times.size(); ++i)
        if (rng.uniform() < spec.sparsify_keep) kept.push_back(i);
      Vec ts(static_cast<Eigen::Index>(kept.size())), vs(static_cast<Eigen::Index>(kept.size())),
          cs(static_cast<Eigen::Index>(kept.size()));
      for (std::size_t i = 0; i < kept.size(); ++i) {
        ts[static_cast<Eigen::Index>(i)] = series.times[kept[i]];
        vs[static_cast<Eigen::Index>(i)] = series.values[kept[i]];
        cs[static_cast<Eigen::Index>(i)] = clean[kept[i]];
      }
      series.times = ts;
      series.values = vs;
      clean = cs;
    }
  }
  // sidecar latents on the plain one-minute grid only
  const Eigen::Index n_fine = static_cast<Eigen::Index>(std::floor(duration)) + 1;
  out.truth.fine_times = Vec::LinSpaced(n_fine, 0.0, static_cast<double>(n_fine - 1));
  out.truth.latents_fine.resize(j_latents, n_fine);
  Eigen::Index fi = 0;
  for (Eigen::Index gi = 0; gi < union_times.size() && fi < n_fine; ++gi) {
    if (union_times[gi] == out.truth.fine_times[fi]) {
      out.truth.latents_fine.col(fi) = latents.col(gi);
      ++fi;
    }
  }
  return out;
}

inline SimulatedPopulation simulate(const SimSpec& spec) {
  spec.validate();
  SimulatedPopulation pop;
  pop.spec = spec;
  pop.covariate_names = spec.covariate_names();
  const Rng base(spec.seed);
  pop.individuals.reserve(static_cast<std::size_t>(spec.n_individuals));
  for (int i = 0; i < spec.n_individuals; ++i) pop.individuals.push_back(sample_individual(spec, i + 1, base));
  return pop;
}

// Default generative setup used by tests and the CLI when no explicit
// parameters are given: alpha = (+1, -1, 0, 0, ...), moderate baseline risk,
// one long- and one short-range shared latent.
inline SimSpec reference_spec(int n_individuals, int d_signals, int r_shared, std::uint64_t seed) {
  SimSpec spec;
  spec.n_individuals = n_individuals;
  spec.d_signals = d_signals;
  spec.r_shared = r_shared;
  spec.seed = seed;
  spec.truth.r_shared = r_shared;
  spec.truth.hazard.alpha = Vec::Zero(d_signals);
  if (d_signals >= 1) spec.truth.hazard.alpha[0] = 1.0;
  if (d_signals >= 2) spec.truth.hazard.alpha[1] = -1.0;
  spec.truth.hazard.gamma = Vec(0);
  spec.truth.hazard.a = 1e-4;
  spec.truth.hazard.b = -9.2;
  spec.truth.hazard.c = 0.01;
  spec.truth.links.resize(static_cast<std::size_t>(r_shared + d_signals));
  for (int j = 0; j < r_shared + d_signals; ++j)
    spec.truth.links[static_cast<std::size_t>(j)] =
        (j == 0) ? kernels::LengthScaleLink{1.0, -12.0} : kernels::LengthScaleLink{1e-5, -5.0};
  // distinct weight directions per signal keep the alpha coefficients
  // identifiable through the shared latents
  spec.lmc_weights = Mat::Zero(d_signals, r_shared);
  for (int dd = 0; dd < d_signals; ++dd) {
    const double angle = 2.4 * static_cast<double>(dd);
    for (int r = 0; r < r_shared; ++r) {
      if (r == 0)
        spec.lmc_weights(dd, r) = 0.8 * std::cos(angle);
      else if (r == 1)
        spec.lmc_weights(dd, r) = 0.8 * std::sin(angle);
      else
        spec.lmc_weights(dd, r) = 0.2 * std::cos(angle + static_cast<double>(r));
    }
  }
  spec.kappa = Vec::Constant(d_signals, 0.7);
  spec.noise_scale = Vec::Constant(d_signals, 0.3);
  spec.obs_rate_per_hour = Vec::Constant(d_signals, 0.5);
  return spec;
}

}  // namespace survgp::simdata

#endif  // SURVGP_SIMDATA_HPP

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

#ifndef SURVGP_LBFGS_HPP
#define SURVGP_LBFGS_HPP

#include <cmath>
#include <deque>
#include <functional>
#include <limits>

#include "survgp/types.hpp"

namespace survgp {

struct LbfgsOptions {
  int max_iters = 500;
  int memory = 8;
  double gtol = 1e-5;       // max-norm of the gradient
  double ftol = 1e-10;      // relative objective change
  int max_linesearch = 40;
};

struct LbfgsResult {
  Vec x;
  double f = std::numeric_limits<double>::quiet_NaN();
  int iters = 0;
  bool converged = false;
};

// Limited-memory BFGS with Armijo backtracking. The objective returns f and
// fills the gradient; non-finite trial values shrink the step. Every accepted
// step strictly decreases f.
inline LbfgsResult lbfgs_minimize(const std::function<double(const Vec&, Vec*)>& objective, const Vec& x0,
                                  const LbfgsOptions& opts = {}) {
  LbfgsResult res;
  res.x = x0;
  const Eigen::Index n = x0.size();
  Vec grad(n);
  double f = objective(res.x, &grad);
  if (!std::isfinite(f)) {
    res.f = f;
    return res;
  }
  std::deque<Vec> s_hist, y_hist;
  std::deque<double> rho_hist;
  Vec x_new(n), grad_new(n), direction(n), q(n);

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    res.iters = iter;
    if (grad.cwiseAbs().maxCoeff() <= opts.gtol) {
      res.converged = true;
      break;
    }
    // two-loop recursion
    q = -grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t i = s_hist.size(); i-- > 0;) {
      alpha[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alpha[i] * y_hist[i];
    }
    if (!s_hist.empty()) {
      const double gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
      q *= gamma;
    }
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alpha[i] - beta) * s_hist[i];
    }
    direction = q;
    double dir_deriv = grad.dot(direction);
    if (!(dir_deriv < 0.0)) {
      direction = -grad;  // fall back to steepest descent
      dir_deriv = grad.dot(direction);
    }

    double step = (iter == 0 && s_hist.empty()) ? std::min(1.0, 1.0 / std::max(1e-12, grad.cwiseAbs().maxCoeff()))
                                                : 1.0;
    bool accepted = false;
    double f_new = f;
    for (int ls = 0; ls < opts.max_linesearch; ++ls) {
      x_new = res.x + step * direction;
      f_new = objective(x_new, &grad_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * step * dir_deriv) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Vec s = x_new - res.x;
    const Vec y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opts.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double f_change = std::abs(f - f_new) / std::max(1.0, std::abs(f));
    res.x = x_new;
    grad = grad_new;
    f = f_new;
    if (f_change <= opts.ftol) {
      res.converged = true;
      break;
    }
  }
  res.f = f;
  return res;
}

}  // namespace survgp

#endif  // SURVGP_LBFGS_HPP

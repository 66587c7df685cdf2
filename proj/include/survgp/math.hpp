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

#ifndef SURVGP_MATH_HPP
#define SURVGP_MATH_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace survgp::math {

inline constexpr double pi = 3.14159265358979323846;

// softplus(x) = log(1 + e^x), linear for large x to avoid overflow
inline double softplus(double x) {
  if (x > 30.0) return x;
  if (x < -30.0) return std::exp(x);
  return std::log1p(std::exp(x));
}

inline double softplus_inv(double y) {
  if (y > 30.0) return y;
  return std::log(std::expm1(y));
}

inline double sigmoid(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 - e^{-x}) for x > 0, stable in both regimes
inline double log1mexp(double x) {
  if (x <= 0.0) return -std::numeric_limits<double>::infinity();
  if (x <= 0.6931471805599453) return std::log(-std::expm1(-x));
  return std::log1p(-std::exp(-x));
}

// (1 - e^{-x}) / x, with series for small |x|; equals 1 at x = 0
inline double one_mexp_over(double x) {
  if (std::abs(x) < 1e-5) return 1.0 - x / 2.0 + x * x / 6.0;
  return -std::expm1(-x) / x;
}

// (e^{ax} - 1) / a, the integral of e^{as} over [0, x]; limit x as a -> 0
inline double expm1_over(double a, double x) {
  const double ax = a * x;
  if (std::abs(ax) < 1e-12) return x * (1.0 + 0.5 * ax);
  return std::expm1(ax) / a;
}

// d/da of expm1_over(a, x) = (a x e^{ax} - (e^{ax} - 1)) / a^2
inline double expm1_over_da(double a, double x) {
  const double ax = a * x;
  if (std::abs(ax) < 1e-4) return x * x * (0.5 + ax / 3.0 + ax * ax / 8.0);
  return (x * std::exp(ax) - std::expm1(ax) / a) / a;
}

// standard normal pdf / cdf
inline double norm_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * pi);
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Inverse standard normal CDF, Wichura's AS241 (PPND16), ~1e-16 relative.
inline double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("norm_quantile: p must be in (0,1)");
  const double q = p - 0.5;
  double r;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    return q *
           (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
                4.5921953931549871457e+4) *
                   r +
               1.3731693765509461125e+4) *
                  r +
              1.9715909503065514427e+3) *
                 r +
             1.3314166789178437745e+2) *
                r +
            3.3871328727963666080e+0) /
           (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
                2.1213794301586595867e+4) *
                   r +
               5.3941960214247511077e+3) *
                  r +
              6.8718700749205790830e+2) *
                 r +
             4.2313330701600911252e+1) *
                r +
            1.0);
  }
  r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double v;
  if (r <= 5.0) {
    r -= 1.6;
    v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
             1.27045825245236838258e+0) *
                r +
            3.64784832476320460504e+0) *
               r +
           5.76949722146069140550e+0) *
              r +
          4.63033784615654529590e+0) *
             r +
         1.42343711074968357734e+0) /
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
             1.48103976427480074590e-1) *
                r +
            6.89767334985100004550e-1) *
               r +
           1.67638483018380384940e+0) *
              r +
          2.05319162663775882187e+0) *
             r +
         1.0);
  } else {
    r -= 5.0;
    v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
             2.65321895265761230930e-2) *
                r +
            2.96560571828504891230e-1) *
               r +
           1.78482653991729133580e+0) *
              r +
          5.46378491116411436990e+0) *
             r +
         6.65790464350110377720e+0) /
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
             7.86869131145613259100e-4) *
                r +
            1.48753612908506148525e-2) *
               r +
           1.36929880922735805310e-1) *
              r +
          5.99832206555887937690e-1) *
             r +
         1.0);
  }
  return (q < 0.0) ? -v : v;
}

struct GaussHermite {
  std::vector<double> nodes;    // physicists' convention, roots of H_n
  std::vector<double> weights;  // sum to sqrt(pi)
};

// Golub-Welsch-free computation via Newton iteration on the Hermite recurrence
// (the classic gauher routine). Accurate to near machine precision for n <= 128.
inline GaussHermite gauss_hermite(int n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: n must be positive");
  GaussHermite gh;
  gh.nodes.assign(static_cast<std::size_t>(n), 0.0);
  gh.weights.assign(static_cast<std::size_t>(n), 0.0);
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  const int m = (n + 1) / 2;
  double z = 0.0;
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * gh.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * gh.nodes[1];
    } else {
      z = 2.0 * z - gh.nodes[static_cast<std::size_t>(i) - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1.0)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    gh.nodes[static_cast<std::size_t>(i)] = z;
    gh.nodes[static_cast<std::size_t>(n) - 1 - i] = -z;
    gh.weights[static_cast<std::size_t>(i)] = 2.0 / (pp * pp);
    gh.weights[static_cast<std::size_t>(n) - 1 - i] = gh.weights[static_cast<std::size_t>(i)];
  }
  // nodes come out descending; flip to ascending
  std::vector<double> xs(gh.nodes.rbegin(), gh.nodes.rend());
  std::vector<double> ws(gh.weights.rbegin(), gh.weights.rend());
  gh.nodes = std::move(xs);
  gh.weights = std::move(ws);
  return gh;
}

// Two-variable forward-mode dual: value plus partials w.r.t. two independents.
// Used to differentiate the time-integrated kernel forms w.r.t. (c, l).
struct Dual2 {
  double v = 0.0;
  double d0 = 0.0;
  double d1 = 0.0;

  Dual2() = default;
  Dual2(double value) : v(value) {}
  Dual2(double value, double g0, double g1) : v(value), d0(g0), d1(g1) {}
};

inline Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d0 + b.d0, a.d1 + b.d1}; }
inline Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d0 - b.d0, a.d1 - b.d1}; }
inline Dual2 operator-(const Dual2& a) { return {-a.v, -a.d0, -a.d1}; }
inline Dual2 operator*(const Dual2& a, const Dual2& b) {
  return {a.v * b.v, a.d0 * b.v + a.v * b.d0, a.d1 * b.v + a.v * b.d1};
}
inline Dual2 operator/(const Dual2& a, const Dual2& b) {
  const double inv = 1.0 / b.v;
  const double q = a.v * inv;
  return {q, (a.d0 - q * b.d0) * inv, (a.d1 - q * b.d1) * inv};
}
inline Dual2 exp(const Dual2& a) {
  const double e = std::exp(a.v);
  return {e, e * a.d0, e * a.d1};
}
inline Dual2 expm1(const Dual2& a) {
  const double e = std::expm1(a.v);
  const double de = std::exp(a.v);
  return {e, de * a.d0, de * a.d1};
}
inline double value(const Dual2& a) { return a.v; }
inline double value(double a) { return a; }

// overloads so templated kernel code works for plain double
inline double exp_s(double x) { return std::exp(x); }
inline Dual2 exp_s(const Dual2& x) { return exp(x); }
inline double expm1_s(double x) { return std::expm1(x); }
inline Dual2 expm1_s(const Dual2& x) { return expm1(x); }

// (1 - e^{-x})/x with series near 0, scalar-generic
inline double one_mexp_over_s(double x) { return one_mexp_over(x); }
inline Dual2 one_mexp_over_s(const Dual2& x) {
  if (std::abs(x.v) < 1e-5) {
    // 1 - x/2 + x^2/6 - x^3/24
    const double dv = -0.5 + x.v / 3.0 - x.v * x.v / 8.0;
    return {1.0 - x.v / 2.0 + x.v * x.v / 6.0 - x.v * x.v * x.v / 24.0, dv * x.d0, dv * x.d1};
  }
  const double f = -std::expm1(-x.v) / x.v;
  const double df = (std::exp(-x.v) - f) / x.v;  // d/dx [(1-e^{-x})/x]
  return {f, df * x.d0, df * x.d1};
}

}  // namespace survgp::math

#endif  // SURVGP_MATH_HPP

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

#ifndef SURVGP_RNG_HPP
#define SURVGP_RNG_HPP

#include <cmath>
#include <cstdint>
#include <string_view>

namespace survgp {

// Deterministic generator with named substreams. All sampling in the library
// goes through this type so that a single seed reproduces byte-identical
// output regardless of the standard library in use (std distributions are
// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix(seed ^ 0x9e3779b97f4a7c15ull)) {
    next();  // decorrelate trivially different seeds
  }

  // Derive an independent substream from a label and an index, e.g.
  // rng.substream("simulate", individual_id).
  Rng substream(std::string_view label, std::uint64_t index = 0) const {
    std::uint64_t h = state_;
    for (char ch : label) h = splitmix(h ^ static_cast<std::uint64_t>(static_cast<unsigned char>(ch)));
    h = splitmix(h ^ (index * 0xbf58476d1ce4e5b9ull + 0x94d049bb133111ebull));
    return Rng(h, Tag{});
  }

  std::uint64_t next_u64() { return next(); }

  // uniform on [0, 1)
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // uniform on (0, 1), safe for logs
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller without the cached spare so call sequence stays simple
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  double exponential() { return -std::log(uniform_pos()); }

  // non-standardized Student-t with 3 degrees of freedom and unit scale,
  // sampled exactly as normal / sqrt(chi^2_3 / 3)
  double student_t3() {
    const double z = normal();
    const double a = normal();
    const double b = normal();
    const double c = normal();
    return z / std::sqrt((a * a + b * b + c * c) / 3.0);
  }

  int poisson(double mean) {
    // inversion for small means, normal approx never needed at our rates
    if (mean <= 0.0) return 0;
    const double limit = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform_pos();
    } while (p > limit);
    return k - 1;
  }

 private:
  struct Tag {};
  Rng(std::uint64_t raw, Tag) : state_(raw) {}

  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  // canonical splitmix64 step: Weyl increment then mix, period 2^64
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
  }

  std::uint64_t state_;
};

}  // namespace survgp

#endif  // SURVGP_RNG_HPP

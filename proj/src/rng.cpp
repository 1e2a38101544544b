// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/rng.hpp"

#include <cmath>

#include "aim/error.hpp"

namespace aim {

int64_t Rng::uniform_int(int64_t lo, int64_t hi) {
  if (lo > hi) throw Error("uniform_int: empty range");
  uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<int64_t>(next_u64());  // full 64-bit range
  uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return lo + static_cast<int64_t>(x % span);
}

double Rng::normal() {
  // Box-Muller; discard the sine branch so each call consumes exactly two
  // uniforms regardless of caller interleaving.
  double u1, u2;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

double Rng::lognormal(double mu, double sigma) {
  return std::exp(mu + sigma * normal());
}

int64_t Rng::poisson(double mean) {
  if (mean < 0) throw Error("poisson: negative mean");
  if (mean == 0) return 0;
  if (mean < 64.0) {
    double limit = std::exp(-mean);
    double prod = uniform();
    int64_t k = 0;
    while (prod > limit) {
      prod *= uniform();
      ++k;
    }
    return k;
  }
  // Normal approximation with continuity correction; fine at this scale for
  // synthetic traffic.
  double x = std::floor(mean + std::sqrt(mean) * normal() + 0.5);
  return x < 0 ? 0 : static_cast<int64_t>(x);
}

double Rng::gamma(double shape) {
  if (shape <= 0) throw Error("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back.
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  // Marsaglia-Tsang squeeze.
  double d = shape - 1.0 / 3.0;
  double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0) continue;
    v = v * v * v;
    double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double Rng::beta(double a, double b) {
  double x = gamma(a);
  double y = gamma(b);
  return x / (x + y);
}

int64_t Rng::zero_truncated_geometric(double q) {
  if (q < 0 || q >= 1) throw Error("zero_truncated_geometric: q must be in [0,1)");
  if (q == 0) return 1;
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return 1 + static_cast<int64_t>(std::floor(std::log(u) / std::log(q)));
}

}  // namespace aim

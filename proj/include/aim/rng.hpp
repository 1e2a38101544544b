// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

namespace aim {

// mt19937_64 plus hand-rolled samplers. The standard pins the engine but not
// the distributions, so all sampling lives here: identical seeds produce
// identical streams on every platform and toolchain.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive, by rejection.
  int64_t uniform_int(int64_t lo, int64_t hi);

  // Standard normal via Box-Muller (no cached spare: one draw, two uniforms).
  double normal();
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  double lognormal(double mu, double sigma);

  // Knuth product method below the cutoff, normal approximation above.
  int64_t poisson(double mean);

  double gamma(double shape);
  double beta(double a, double b);

  // Zero-truncated geometric: P(K=k) = (1-q) q^(k-1), k >= 1.
  // P(K >= 2) = q.
  int64_t zero_truncated_geometric(double q);

  double bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aim

// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

// Serial reference vs OpenMP kernels, plus the exact solver on a
// representative cell. Run with --benchmark_min_time=... as usual.

#include <benchmark/benchmark.h>

#include <cmath>

#include "aim/attribution.hpp"
#include "aim/baseline_model.hpp"
#include "aim/parallel.hpp"
#include "aim/rng.hpp"
#include "aim/simulator.hpp"

namespace {

using namespace aim;

std::vector<LabeledRow> bench_rows(size_t n) {
  Rng rng(1);
  std::vector<LabeledRow> rows;
  rows.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    LabeledRow r;
    r.age_days = 1 + static_cast<int>(rng.uniform_int(0, 27));
    r.activity = rng.lognormal(0.4, 0.8);
    r.promo_intensity = rng.beta(2, 5);
    r.consumed = rng.uniform() < 0.2;
    rows.push_back(std::move(r));
  }
  return rows;
}

const std::array<double, 4> kCoef = {-1.4, 0.3, -0.2, 1.1};

void BM_GlmGradientSerial(benchmark::State& state) {
  auto rows = bench_rows(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    auto acc = glm_kernel::accumulate_serial(rows, kCoef);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GlmGradientSerial)->Arg(100000);

void BM_GlmGradientParallel(benchmark::State& state) {
  auto rows = bench_rows(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    auto acc = glm_kernel::accumulate_parallel(rows, kCoef);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GlmGradientParallel)->Arg(100000);

void BM_ScoringSerial(benchmark::State& state) {
  auto rows = bench_rows(static_cast<size_t>(state.range(0)));
  BaselineModel model;
  model.coef = kCoef;
  for (auto _ : state) {
    benchmark::DoNotOptimize(glm_kernel::mean_prediction_serial(model, rows));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoringSerial)->Arg(100000);

void BM_ScoringParallel(benchmark::State& state) {
  auto rows = bench_rows(static_cast<size_t>(state.range(0)));
  BaselineModel model;
  model.coef = kCoef;
  for (auto _ : state) {
    benchmark::DoNotOptimize(glm_kernel::mean_prediction_parallel(model, rows));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoringParallel)->Arg(100000);

void BM_SolveExactCell(benchmark::State& state) {
  AttributionSimConfig cfg;
  cfg.n_subscribers = 10000;
  cfg.n_contents = 1250;
  cfg.n_groups = 125;
  cfg.rng_seed = 42;
  auto sim = simulate_attribution(cfg);
  const auto& inst = sim.instances[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_exact(inst, 0.2));
  }
}
BENCHMARK(BM_SolveExactCell);

void BM_RankGreedyCell(benchmark::State& state) {
  AttributionSimConfig cfg;
  cfg.n_subscribers = 10000;
  cfg.n_contents = 1250;
  cfg.n_groups = 125;
  cfg.rng_seed = 42;
  auto sim = simulate_attribution(cfg);
  const auto& inst = sim.instances[0];
  for (auto _ : state) {
    benchmark::DoNotOptimize(rank_greedy(inst, 0.2));
  }
}
BENCHMARK(BM_RankGreedyCell);

}  // namespace

BENCHMARK_MAIN();

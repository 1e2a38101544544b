// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aim/records.hpp"

namespace aim {

enum class ModelKind { kGlm, kBinned };

ModelKind model_kind_from_string(const std::string& s);
std::string to_string(ModelKind k);

// Bucket edges for the binned estimator. A value lands in the first bucket
// whose edge exceeds it; bucket count = edges + 1, so age 0 always maps to
// the lowest age bucket.
struct BinConfig {
  std::vector<double> age_edges = {1.5, 3.5, 7.5, 14.5, 28.5, 56.5};
  std::vector<double> activity_edges = {0.5, 1.5, 3.5, 7.5, 15.5};
  std::vector<double> promo_edges = {0.05, 0.25, 0.5, 0.75};
};

struct FitOptions {
  double l2_penalty = 1e-6;  // applies to weights, not the intercept
  int max_iterations = 500;
  double gradient_tol = 1e-8;
  BinConfig bins;
};

// Consumption probability for a non-incremental subscriber as a function of
// (subscription age, activity, promotion). The GLM is a logistic regression
// on [log1p(age), log1p(activity), promo]; the binned variant keeps
// per-cell empirical rates and is the diagnostic fallback.
struct BaselineModel {
  ModelKind kind = ModelKind::kGlm;

  // glm: intercept + weights for log1p(age), log1p(activity), promo
  std::array<double, 4> coef = {0, 0, 0, 0};

  // binned
  BinConfig bins;
  std::vector<double> cell_rate;
  std::vector<int64_t> cell_count;
  double global_rate = 0.0;

  double predict(double age_days, double activity,
                 double promo_intensity) const;
};

struct TrainingReport {
  size_t n_rows = 0;
  double log_loss = 0.0;  // mean negative log-likelihood at the fit
  int iterations = 0;
  bool converged = false;
  bool degenerate = false;        // all labels identical; constant model
  int min_age_days = 0;           // youngest training subscription
  bool age_extrapolation = false;  // predictions at age 0 extrapolate
};

// Fits on pre-launch rows only; any row with age_days == 0 is rejected as a
// post-launch leak. GLM: penalized Bernoulli likelihood maximized by
// full-batch gradient ascent with backtracking line search, fixed iteration
// schedule, deterministic for identical inputs. Binned: per-cell empirical
// rates, zero-count cells fall back to the global mean.
std::pair<BaselineModel, TrainingReport> fit_baseline(
    std::span<const LabeledRow> rows, ModelKind kind,
    const FitOptions& options = {});

// p in [1e-6, 1 - 1e-6] always.
double predict_p(const BaselineModel& model, double age_days, double activity,
                 double promo_intensity);

// Mean prediction over the post-launch cohort's observed covariates: the
// counterfactual consumption rate the control model implies for the
// treatment cohort's covariate mix. Throws on empty input.
double adjusted_mean_rate(const BaselineModel& model,
                          std::span<const LabeledRow> post_rows);

std::string model_to_json(const BaselineModel& model,
                          const TrainingReport& report);
std::pair<BaselineModel, TrainingReport> model_from_json(
    const std::string& text);
void save_model(const BaselineModel& model, const TrainingReport& report,
                const std::string& path);
std::pair<BaselineModel, TrainingReport> load_model(const std::string& path);

namespace glm_kernel {

struct Accum {
  double log_lik = 0.0;
  std::array<double, 4> grad = {0, 0, 0, 0};
};

// Serial reference implementation.
Accum accumulate_serial(std::span<const LabeledRow> rows,
                        const std::array<double, 4>& coef);
// Blocked OpenMP version; bitwise-identical to the serial reference for any
// thread count.
Accum accumulate_parallel(std::span<const LabeledRow> rows,
                          const std::array<double, 4>& coef);

double mean_prediction_serial(const BaselineModel& model,
                              std::span<const LabeledRow> rows);
double mean_prediction_parallel(const BaselineModel& model,
                                std::span<const LabeledRow> rows);

}  // namespace glm_kernel

}  // namespace aim

// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "aim/baseline_model.hpp"
#include "aim/records.hpp"

namespace aim {

// Baseline rates at or above 1 - kDenominatorGuard make the incrementality
// quotient meaningless; such requests fail loudly.
inline constexpr double kDenominatorGuard = 1e-3;

struct IncrementalEstimate {
  double n_incremental = 0.0;  // clamped into [0, n_consumers]
  double raw = 0.0;            // unclamped quotient
  bool clamped = false;
};

// (S - N * p) / (1 - p): incremental signups recovered from observed
// signups, observed consumers and the counterfactual consumption rate.
IncrementalEstimate estimate_incremental(double n_signups, double n_consumers,
                                         double baseline_rate);

// (p_consume - p_hat) / (1 - p_hat), clamped to [0,1]: probability that a
// consumer with baseline rate p_hat joined because of the content.
// Non-increasing in p_hat.
double incremental_propensity(double p_consume, double p_hat);

struct DailyEstimate {
  std::string content_id;
  Date date;
  std::string group;
  int64_t n_signups = 0;
  int64_t n_consumers = 0;
  double baseline_rate = 0.0;
  double n_incremental = 0.0;
  bool clamped = false;
};

struct LaunchImpactSeries {
  std::string content_id;
  std::string group;
  std::vector<DailyEstimate> daily;   // ordered by date
  double total_incremental = 0.0;     // sum of clamped daily values
  double total_unclamped = 0.0;       // sum of raw quotients

  void recompute_totals();
};

// Runs the incrementality equation for every post-launch day: N_t from the
// day's post slice, S_jt from consumption labels, the baseline rate from the
// control-trained model scored at that day's covariates. `group` restricts
// members; nullopt pools everyone. Empty-control and unstable-denominator
// failures are tagged with the offending day.
LaunchImpactSeries estimate_launch_impact(
    const Dataset& ds, const ContentLaunch& launch, const BaselineModel& model,
    const std::optional<std::string>& group = std::nullopt);

// impact.csv:
// content_id,group,date,n_signups,n_consumers,baseline_rate,n_incremental,clamped
void write_impact_csv(const std::vector<LaunchImpactSeries>& series,
                      const std::string& path);
std::vector<LaunchImpactSeries> read_impact_csv(const std::string& path);

// JSON summary with per-launch totals.
void write_impact_summary(const std::vector<LaunchImpactSeries>& series,
                          const std::string& path);

}  // namespace aim

// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "aim/attribution.hpp"
#include "aim/estimator.hpp"
#include "aim/records.hpp"

namespace aim {

// Daily count series, dates ascending and unique.
struct DailySeries {
  std::vector<Date> dates;
  std::vector<double> values;

  void validate() const;
};

// Total signups per day over the dataset's full date range.
DailySeries aggregate_signups(const Dataset& ds);

// Day-of-week factors times a smooth trend (centered moving average).
// The template is what a regular, launch-free signup series should look
// like; distance from it measures how much transient structure remains.
inline constexpr int kTemplateWindow = 28;

std::vector<double> seasonal_template(const DailySeries& series,
                                      int ma_window = kTemplateWindow);

// RMSE of (series - its own template).
double regularity_score(const DailySeries& series,
                        int ma_window = kTemplateWindow);

struct ResidualReport {
  DailySeries residual;       // aggregate minus estimated content-driven
  double regularity_score = 0.0;  // on the residual
  double baseline_score = 0.0;    // same metric, nothing removed
};

// Removing good estimates should leave a series closer to its seasonal
// template than the raw aggregate. Requires at least two template windows
// of data. Impact dates must exist in the aggregate series.
ResidualReport residual_regularity(
    const DailySeries& aggregate,
    const std::vector<LaunchImpactSeries>& impacts);

struct MultiAssignmentReport {
  double overall_rate = 0.0;
  int64_t multi_count = 0;
  int64_t assigned_subscribers = 0;
  // (key, multi rate among that key's assigned subscribers), sorted by rate
  // descending then key.
  std::vector<std::pair<std::string, double>> by_content;
  std::vector<std::pair<std::string, double>> by_date;
  std::vector<std::pair<std::string, double>> by_group;
};

MultiAssignmentReport multiple_assignment_diagnostic(
    const std::vector<std::pair<const AttributionInstance*, const Assignment*>>&
        solved);

struct SpikeReport {
  double capture = 0.0;  // estimated / excess, clamped to [0,2]
  double estimate_total = 0.0;
  double excess_total = 0.0;
  bool undefined_spike = false;  // non-positive excess
};

// Excess = aggregate minus a template fitted with the launch window masked
// out; capture compares the model's estimates against that excess.
SpikeReport spike_capture(const DailySeries& aggregate,
                          const LaunchImpactSeries& impact,
                          const ContentLaunch& launch);

struct ExperimentReport {
  double discrepancy_abs = 0.0;  // (T - C) - lift * treated
  double discrepancy_rel = 0.0;  // relative to lift * treated
  double expected = 0.0;         // lift * treated
};

ExperimentReport experiment_consistency(double treatment_estimate,
                                        double control_estimate,
                                        double experiment_lift,
                                        double treatment_size);

}  // namespace aim

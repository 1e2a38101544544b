// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/pipeline.hpp"

#include "aim/cohorts.hpp"
#include "aim/error.hpp"

namespace aim {

std::vector<LabeledRow> pooled_pre_rows(
    const Dataset& ds, const std::vector<ContentLaunch>& launches) {
  std::vector<LabeledRow> rows;
  for (const auto& launch : launches) {
    for (const auto& slice : build_cohorts(ds, launch)) {
      if (slice.kind != CohortKind::kPreLaunch) continue;
      auto slice_rows = labeled_rows(ds, slice, launch);
      rows.insert(rows.end(), std::make_move_iterator(slice_rows.begin()),
                  std::make_move_iterator(slice_rows.end()));
    }
  }
  return rows;
}

EstimationResult run_estimation(const Dataset& ds,
                                const std::vector<ContentLaunch>& launches,
                                ModelKind kind, const FitOptions& options,
                                const std::optional<BaselineModel>& model) {
  if (launches.empty()) throw ConfigError("run_estimation: no launches");

  EstimationResult result;
  if (model.has_value()) {
    result.model = *model;
  } else {
    auto rows = pooled_pre_rows(ds, launches);
    auto [fitted, report] = fit_baseline(rows, kind, options);
    result.model = std::move(fitted);
    result.report = report;
  }

  for (const auto& launch : launches) {
    for (const auto& group : ds.groups()) {
      result.series.push_back(
          estimate_launch_impact(ds, launch, result.model, group));
    }
  }
  return result;
}

}  // namespace aim

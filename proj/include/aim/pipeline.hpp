// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <vector>

#include "aim/baseline_model.hpp"
#include "aim/estimator.hpp"
#include "aim/records.hpp"

namespace aim {

// Pre-launch training rows pooled across every launch (the control pool the
// baseline model is fitted on).
std::vector<LabeledRow> pooled_pre_rows(const Dataset& ds,
                                        const std::vector<ContentLaunch>& launches);

struct EstimationResult {
  BaselineModel model;
  TrainingReport report;
  std::vector<LaunchImpactSeries> series;  // one per launch x group
};

// fit + estimate for every launch and group. When `model` is provided the
// fit step is skipped.
EstimationResult run_estimation(
    const Dataset& ds, const std::vector<ContentLaunch>& launches,
    ModelKind kind, const FitOptions& options = {},
    const std::optional<BaselineModel>& model = std::nullopt);

}  // namespace aim

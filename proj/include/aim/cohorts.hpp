// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "aim/records.hpp"

namespace aim {

// The first day the launch content could be consumed by this subscriber:
// launch day for pre-launch signups, signup day for post-launch signups.
Date availability_date(Date signup_date, const ContentLaunch& launch);

// True iff the subscriber's best completion of the launch content within
// label_window_days of availability reaches the completion threshold.
// Pure function of the event log and the launch config; absent events mean
// false.
bool consumption_label(const Dataset& ds, uint32_t subscriber_row,
                       const ContentLaunch& launch);
bool consumption_label(const Dataset& ds, const std::string& subscriber_id,
                       const ContentLaunch& launch);

// One slice per calendar date: pre-launch dates in
// [launch - gap - T0, launch - gap), post-launch dates in
// [launch, launch + post_window]. Dates with no signups yield empty slices.
// Signups in the gap (and outside both windows) appear in no slice.
// Throws EmptyControlError when the whole pre window has no signups.
std::vector<CohortSlice> build_cohorts(const Dataset& ds,
                                       const ContentLaunch& launch);

// Label + covariates for every member of the slice. promo_intensity
// defaults to 0 when the pair has no promotion record.
std::vector<LabeledRow> labeled_rows(const Dataset& ds,
                                     const CohortSlice& slice,
                                     const ContentLaunch& launch);

}  // namespace aim

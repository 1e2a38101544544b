// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/cohorts.hpp"

#include <algorithm>

#include "aim/error.hpp"

namespace aim {

Date availability_date(Date signup_date, const ContentLaunch& launch) {
  return signup_date < launch.launch_date ? launch.launch_date : signup_date;
}

bool consumption_label(const Dataset& ds, uint32_t subscriber_row,
                       const ContentLaunch& launch) {
  const Date avail =
      availability_date(ds.signups[subscriber_row].signup_date, launch);
  double best = -1.0;
  for (uint32_t e : ds.events_by_row[subscriber_row]) {
    const auto& ev = ds.consumption[e];
    if (ev.content_id != launch.content_id) continue;
    int offset = ev.event_date - avail;
    if (offset < 0 || offset > launch.label_window_days) continue;
    best = std::max(best, ev.completion_fraction);
  }
  return best >= launch.completion_threshold;
}

bool consumption_label(const Dataset& ds, const std::string& subscriber_id,
                       const ContentLaunch& launch) {
  return consumption_label(ds, ds.require_row(subscriber_id), launch);
}

std::vector<CohortSlice> build_cohorts(const Dataset& ds,
                                       const ContentLaunch& launch) {
  launch.validate();
  std::vector<CohortSlice> slices;
  slices.reserve(static_cast<size_t>(launch.pre_window_days) +
                 launch.post_window_days + 1);

  auto members_on = [&ds](Date d) -> std::vector<uint32_t> {
    auto it = ds.rows_by_date.find(d);
    return it == ds.rows_by_date.end() ? std::vector<uint32_t>{} : it->second;
  };

  size_t pre_members = 0;
  for (Date d = launch.pre_begin(); d < launch.pre_end(); ++d) {
    CohortSlice slice;
    slice.content_id = launch.content_id;
    slice.signup_date = d;
    slice.kind = CohortKind::kPreLaunch;
    slice.member_rows = members_on(d);
    pre_members += slice.member_rows.size();
    slices.push_back(std::move(slice));
  }
  if (pre_members == 0) {
    throw EmptyControlError("launch " + launch.content_id +
                            ": no signups in pre-launch window [" +
                            format_date(launch.pre_begin()) + ", " +
                            format_date(launch.pre_end()) + ")");
  }

  for (Date d = launch.launch_date; d <= launch.post_end(); ++d) {
    CohortSlice slice;
    slice.content_id = launch.content_id;
    slice.signup_date = d;
    slice.kind = CohortKind::kPostLaunch;
    slice.member_rows = members_on(d);
    slices.push_back(std::move(slice));
  }
  return slices;
}

std::vector<LabeledRow> labeled_rows(const Dataset& ds,
                                     const CohortSlice& slice,
                                     const ContentLaunch& launch) {
  std::vector<LabeledRow> rows;
  rows.reserve(slice.member_rows.size());
  for (uint32_t r : slice.member_rows) {
    const auto& s = ds.signups[r];
    LabeledRow row;
    row.subscriber_row = r;
    row.subscriber_id = s.subscriber_id;
    row.consumed = consumption_label(ds, r, launch);
    row.age_days = slice.kind == CohortKind::kPreLaunch
                       ? launch.launch_date - s.signup_date
                       : 0;
    row.activity = s.activity;
    row.promo_intensity = ds.promo_intensity(r, launch.content_id);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace aim

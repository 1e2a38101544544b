// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "aim/date.hpp"

namespace aim {

struct SignupRecord {
  std::string subscriber_id;
  Date signup_date;
  std::string group;  // free-form segmentation key; empty = ungrouped
  double activity = 0.0;

  bool operator==(const SignupRecord&) const = default;
};

struct ConsumptionRecord {
  std::string subscriber_id;
  std::string content_id;
  Date event_date;
  double completion_fraction = 0.0;

  bool operator==(const ConsumptionRecord&) const = default;
};

struct PromotionRecord {
  std::string subscriber_id;
  std::string content_id;
  double promo_intensity = 0.0;

  bool operator==(const PromotionRecord&) const = default;
};

// A piece of content plus the analysis windows used everywhere downstream.
// The pre-launch cohort covers signup dates in
//   [launch - pre_gap_days - pre_window_days, launch - pre_gap_days)
// and the post-launch cohort covers [launch, launch + post_window_days].
struct ContentLaunch {
  std::string content_id;
  Date launch_date;
  int pre_window_days = 28;
  int pre_gap_days = 3;
  int post_window_days = 28;
  double completion_threshold = 0.7;
  int label_window_days = 7;

  Date pre_begin() const {
    return launch_date - pre_gap_days - pre_window_days;
  }
  Date pre_end() const { return launch_date - pre_gap_days; }  // exclusive
  Date post_end() const { return launch_date + post_window_days; }  // inclusive

  void validate() const;

  bool operator==(const ContentLaunch&) const = default;
};

enum class CohortKind { kPreLaunch, kPostLaunch };

struct CohortSlice {
  std::string content_id;
  Date signup_date;
  CohortKind kind = CohortKind::kPreLaunch;
  std::vector<uint32_t> member_rows;  // indices into Dataset::signups
};

// One training/scoring row: the consumption label for (member, launch)
// together with the observable covariates at the time the content became
// available to that member.
struct LabeledRow {
  uint32_t subscriber_row = 0;
  std::string subscriber_id;
  bool consumed = false;
  int age_days = 0;  // 0 for post-launch signups
  double activity = 0.0;
  double promo_intensity = 0.0;
};

// Immutable after finalize(); all derived indexes are read-only and the
// whole structure is safe to share across threads.
struct Dataset {
  std::vector<SignupRecord> signups;
  std::vector<ConsumptionRecord> consumption;
  std::vector<PromotionRecord> promotions;

  // Derived (finalize()):
  std::unordered_map<std::string, uint32_t> row_by_subscriber;
  std::map<Date, std::vector<uint32_t>> rows_by_date;
  std::vector<std::vector<uint32_t>> events_by_row;  // -> consumption indices
  std::vector<std::vector<uint32_t>> promos_by_row;  // -> promotion indices

  // Validates referential integrity and builds the indexes above.
  // `source` tags error messages (typically a file name).
  void finalize(const std::string& source = "dataset");

  uint32_t require_row(const std::string& subscriber_id) const;

  // 0.0 when no promotion record exists for the pair.
  double promo_intensity(uint32_t row, const std::string& content_id) const;

  // Distinct groups present, sorted; {""} when ungrouped.
  std::vector<std::string> groups() const;

  bool same_records(const Dataset& other) const {
    return signups == other.signups && consumption == other.consumption &&
           promotions == other.promotions;
  }
};

}  // namespace aim

// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/records.hpp"

#include <algorithm>
#include <set>

#include "aim/error.hpp"

namespace aim {

void ContentLaunch::validate() const {
  if (content_id.empty()) throw ConfigError("launch: empty content_id");
  if (pre_window_days < 1) {
    throw ConfigError("launch " + content_id + ": pre_window_days must be >= 1");
  }
  if (pre_gap_days < 0) {
    throw ConfigError("launch " + content_id + ": pre_gap_days must be >= 0");
  }
  if (post_window_days < 1) {
    throw ConfigError("launch " + content_id +
                      ": post_window_days must be >= 1");
  }
  if (!(completion_threshold > 0.0) || completion_threshold > 1.0) {
    throw ConfigError("launch " + content_id +
                      ": completion_threshold must be in (0,1]");
  }
  if (label_window_days < 1) {
    throw ConfigError("launch " + content_id +
                      ": label_window_days must be >= 1");
  }
}

void Dataset::finalize(const std::string& source) {
  row_by_subscriber.clear();
  rows_by_date.clear();
  events_by_row.assign(signups.size(), {});
  promos_by_row.assign(signups.size(), {});

  row_by_subscriber.reserve(signups.size() * 2);
  for (uint32_t i = 0; i < signups.size(); ++i) {
    const auto& s = signups[i];
    if (s.activity < 0) {
      throw IntegrityError(source + ": subscriber " + s.subscriber_id +
                           " has negative activity");
    }
    auto [it, inserted] = row_by_subscriber.emplace(s.subscriber_id, i);
    if (!inserted) {
      throw IntegrityError(source + ": duplicate subscriber_id " +
                           s.subscriber_id);
    }
    rows_by_date[s.signup_date].push_back(i);
  }

  for (uint32_t e = 0; e < consumption.size(); ++e) {
    const auto& c = consumption[e];
    auto it = row_by_subscriber.find(c.subscriber_id);
    if (it == row_by_subscriber.end()) {
      throw IntegrityError(source + ": consumption references unknown subscriber " +
                           c.subscriber_id);
    }
    if (c.event_date < signups[it->second].signup_date) {
      throw IntegrityError(source + ": consumption for " + c.subscriber_id +
                           " predates signup");
    }
    events_by_row[it->second].push_back(e);
  }

  for (uint32_t p = 0; p < promotions.size(); ++p) {
    const auto& pr = promotions[p];
    auto it = row_by_subscriber.find(pr.subscriber_id);
    if (it == row_by_subscriber.end()) {
      throw IntegrityError(source + ": promotion references unknown subscriber " +
                           pr.subscriber_id);
    }
    promos_by_row[it->second].push_back(p);
  }
}

uint32_t Dataset::require_row(const std::string& subscriber_id) const {
  auto it = row_by_subscriber.find(subscriber_id);
  if (it == row_by_subscriber.end()) {
    throw IntegrityError("unknown subscriber " + subscriber_id);
  }
  return it->second;
}

double Dataset::promo_intensity(uint32_t row,
                                const std::string& content_id) const {
  for (uint32_t p : promos_by_row[row]) {
    if (promotions[p].content_id == content_id) {
      return promotions[p].promo_intensity;
    }
  }
  return 0.0;
}

std::vector<std::string> Dataset::groups() const {
  std::set<std::string> uniq;
  for (const auto& s : signups) uniq.insert(s.group);
  if (uniq.empty()) uniq.insert("");
  return {uniq.begin(), uniq.end()};
}

}  // namespace aim

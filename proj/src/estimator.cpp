// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "aim/cohorts.hpp"
#include "aim/csv.hpp"
#include "aim/error.hpp"
#include "aim/parallel.hpp"

namespace aim {

IncrementalEstimate estimate_incremental(double n_signups, double n_consumers,
                                         double baseline_rate) {
  if (n_signups < 0 || n_consumers < 0 || n_consumers > n_signups) {
    throw Error("estimate_incremental: need 0 <= consumers <= signups");
  }
  if (baseline_rate < 0) {
    throw Error("estimate_incremental: negative baseline rate");
  }
  if (baseline_rate >= 1.0 - kDenominatorGuard) {
    throw UnstableDenominatorError(
        "estimate_incremental: baseline rate " +
        csv::format_double(baseline_rate) + " too close to 1");
  }
  IncrementalEstimate est;
  est.raw = (n_consumers - n_signups * baseline_rate) / (1.0 - baseline_rate);
  est.n_incremental = std::clamp(est.raw, 0.0, n_consumers);
  est.clamped = est.n_incremental != est.raw;
  return est;
}

double incremental_propensity(double p_consume, double p_hat) {
  if (p_hat < 0 || p_consume < 0 || p_consume > 1) {
    throw Error("incremental_propensity: probabilities outside [0,1]");
  }
  if (p_hat >= 1.0 - kDenominatorGuard) {
    throw UnstableDenominatorError(
        "incremental_propensity: baseline probability " +
        csv::format_double(p_hat) + " too close to 1");
  }
  double v = (p_consume - p_hat) / (1.0 - p_hat);
  return std::clamp(v, 0.0, 1.0);
}

void LaunchImpactSeries::recompute_totals() {
  total_incremental = 0.0;
  total_unclamped = 0.0;
  for (const auto& d : daily) total_incremental += d.n_incremental;
  // total_unclamped is tracked during estimation; when rebuilt from CSV the
  // raw quotient is no longer available, so fall back to the clamped sum.
}

LaunchImpactSeries estimate_launch_impact(
    const Dataset& ds, const ContentLaunch& launch, const BaselineModel& model,
    const std::optional<std::string>& group) {
  auto slices = build_cohorts(ds, launch);

  std::vector<const CohortSlice*> post;
  for (const auto& s : slices) {
    if (s.kind == CohortKind::kPostLaunch) post.push_back(&s);
  }

  LaunchImpactSeries series;
  series.content_id = launch.content_id;
  series.group = group.value_or("");
  series.daily.resize(post.size());

  std::vector<std::string> day_errors(post.size());
  std::vector<double> raws(post.size(), 0.0);

  // Days are independent; estimate them in parallel and assemble in order.
  par::parallel_for(post.size(), [&](size_t i) {
    const CohortSlice& slice = *post[i];
    DailyEstimate& day = series.daily[i];
    day.content_id = launch.content_id;
    day.date = slice.signup_date;
    day.group = series.group;

    std::vector<LabeledRow> rows = labeled_rows(ds, slice, launch);
    if (group.has_value()) {
      std::erase_if(rows, [&](const LabeledRow& r) {
        return ds.signups[r.subscriber_row].group != *group;
      });
    }
    day.n_signups = static_cast<int64_t>(rows.size());
    if (rows.empty()) return;  // zero-signup day contributes nothing

    for (const auto& r : rows) {
      if (r.consumed) ++day.n_consumers;
    }
    try {
      day.baseline_rate = adjusted_mean_rate(model, rows);
      IncrementalEstimate est = estimate_incremental(
          static_cast<double>(day.n_signups),
          static_cast<double>(day.n_consumers), day.baseline_rate);
      day.n_incremental = est.n_incremental;
      day.clamped = est.clamped;
      raws[i] = est.raw;
    } catch (const Error& e) {
      day_errors[i] = e.what();
    }
  });

  for (size_t i = 0; i < post.size(); ++i) {
    if (!day_errors[i].empty()) {
      throw UnstableDenominatorError("launch " + launch.content_id + " day " +
                                     format_date(series.daily[i].date) + ": " +
                                     day_errors[i]);
    }
  }

  series.recompute_totals();
  series.total_unclamped = 0.0;
  for (double r : raws) series.total_unclamped += r;
  return series;
}

void write_impact_csv(const std::vector<LaunchImpactSeries>& series,
                      const std::string& path) {
  csv::Writer out(path);
  out.write_row({"content_id", "group", "date", "n_signups", "n_consumers",
                 "baseline_rate", "n_incremental", "clamped"});
  for (const auto& s : series) {
    for (const auto& d : s.daily) {
      out.write_row({d.content_id, d.group, format_date(d.date),
                     std::to_string(d.n_signups), std::to_string(d.n_consumers),
                     csv::format_double(d.baseline_rate),
                     csv::format_double(d.n_incremental),
                     d.clamped ? "true" : "false"});
    }
  }
  out.close();
}

std::vector<LaunchImpactSeries> read_impact_csv(const std::string& path) {
  csv::Reader in(path,
                 {"content_id", "group", "date", "n_signups", "n_consumers",
                  "baseline_rate", "n_incremental", "clamped"});
  std::map<std::pair<std::string, std::string>, LaunchImpactSeries> by_key;
  std::vector<std::string> f;
  while (in.next_row(f)) {
    DailyEstimate d;
    d.content_id = f[0];
    d.group = f[1];
    d.date = parse_date(f[2]);
    d.n_signups = std::stoll(f[3]);
    d.n_consumers = std::stoll(f[4]);
    d.baseline_rate = csv::parse_double(f[5], path, in.line_no());
    d.n_incremental = csv::parse_double(f[6], path, in.line_no());
    if (f[7] != "true" && f[7] != "false") {
      throw ParseError(path + ":" + std::to_string(in.line_no()) +
                       ": clamped must be true|false");
    }
    d.clamped = f[7] == "true";
    auto& s = by_key[{d.content_id, d.group}];
    s.content_id = d.content_id;
    s.group = d.group;
    s.daily.push_back(std::move(d));
  }
  std::vector<LaunchImpactSeries> series;
  for (auto& [key, s] : by_key) {
    std::sort(s.daily.begin(), s.daily.end(),
              [](const DailyEstimate& a, const DailyEstimate& b) {
                return a.date < b.date;
              });
    s.recompute_totals();
    s.total_unclamped = s.total_incremental;
    series.push_back(std::move(s));
  }
  return series;
}

void write_impact_summary(const std::vector<LaunchImpactSeries>& series,
                          const std::string& path) {
  nlohmann::json launches = nlohmann::json::array();
  for (const auto& s : series) {
    int64_t clamped_days = 0;
    for (const auto& d : s.daily) clamped_days += d.clamped ? 1 : 0;
    launches.push_back({{"content_id", s.content_id},
                        {"group", s.group},
                        {"days", s.daily.size()},
                        {"total_incremental", s.total_incremental},
                        {"total_unclamped", s.total_unclamped},
                        {"clamped_days", clamped_days}});
  }
  nlohmann::json j{{"launches", launches}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace aim

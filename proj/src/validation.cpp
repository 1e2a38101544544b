// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "aim/error.hpp"

namespace aim {

void DailySeries::validate() const {
  if (dates.size() != values.size()) {
    throw Error("daily series: dates/values length mismatch");
  }
  for (size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw Error("daily series: dates must be strictly ascending");
    }
  }
}

DailySeries aggregate_signups(const Dataset& ds) {
  DailySeries s;
  if (ds.rows_by_date.empty()) return s;
  Date first = ds.rows_by_date.begin()->first;
  Date last = ds.rows_by_date.rbegin()->first;
  for (Date d = first; d <= last; ++d) {
    auto it = ds.rows_by_date.find(d);
    s.dates.push_back(d);
    s.values.push_back(
        it == ds.rows_by_date.end() ? 0.0 : static_cast<double>(it->second.size()));
  }
  return s;
}

std::vector<double> seasonal_template(const DailySeries& series,
                                      int ma_window) {
  series.validate();
  const size_t n = series.values.size();
  const int half = ma_window / 2;

  std::vector<double> trend(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    size_t lo = i >= static_cast<size_t>(half) ? i - half : 0;
    size_t hi = std::min(n - 1, i + static_cast<size_t>(half));
    double sum = 0.0;
    for (size_t k = lo; k <= hi; ++k) sum += series.values[k];
    trend[i] = sum / static_cast<double>(hi - lo + 1);
  }

  double factor_sum[7] = {0, 0, 0, 0, 0, 0, 0};
  int64_t factor_n[7] = {0, 0, 0, 0, 0, 0, 0};
  for (size_t i = 0; i < n; ++i) {
    if (trend[i] <= 1e-9) continue;
    int d = weekday(series.dates[i]);
    factor_sum[d] += series.values[i] / trend[i];
    ++factor_n[d];
  }
  double factor[7];
  for (int d = 0; d < 7; ++d) {
    factor[d] = factor_n[d] > 0 ? factor_sum[d] / static_cast<double>(factor_n[d])
                                : 1.0;
  }

  std::vector<double> tmpl(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    tmpl[i] = trend[i] * factor[weekday(series.dates[i])];
  }
  return tmpl;
}

double regularity_score(const DailySeries& series, int ma_window) {
  std::vector<double> tmpl = seasonal_template(series, ma_window);
  double sq = 0.0;
  for (size_t i = 0; i < series.values.size(); ++i) {
    double d = series.values[i] - tmpl[i];
    sq += d * d;
  }
  return std::sqrt(sq / static_cast<double>(series.values.size()));
}

ResidualReport residual_regularity(
    const DailySeries& aggregate,
    const std::vector<LaunchImpactSeries>& impacts) {
  aggregate.validate();
  if (aggregate.dates.size() < 2 * static_cast<size_t>(kTemplateWindow)) {
    throw InsufficientDataError(
        "residual_regularity: need at least " +
        std::to_string(2 * kTemplateWindow) + " days, got " +
        std::to_string(aggregate.dates.size()));
  }

  std::map<int32_t, size_t> index;
  for (size_t i = 0; i < aggregate.dates.size(); ++i) {
    index[aggregate.dates[i].days] = i;
  }

  ResidualReport report;
  report.residual = aggregate;
  for (const auto& series : impacts) {
    for (const auto& d : series.daily) {
      auto it = index.find(d.date.days);
      if (it == index.end()) {
        throw Error("residual_regularity: impact date " + format_date(d.date) +
                    " outside the aggregate series");
      }
      report.residual.values[it->second] -= d.n_incremental;
    }
  }

  report.regularity_score = regularity_score(report.residual);
  report.baseline_score = regularity_score(aggregate);
  return report;
}

MultiAssignmentReport multiple_assignment_diagnostic(
    const std::vector<std::pair<const AttributionInstance*, const Assignment*>>&
        solved) {
  MultiAssignmentReport report;

  struct Tally {
    std::set<std::string> assigned;
    std::set<std::string> multi;
  };
  std::map<std::string, Tally> by_content, by_date, by_group;
  int64_t multi_total = 0;
  int64_t assigned_total = 0;

  for (const auto& [inst, assignment] : solved) {
    std::set<std::string> multi(assignment->multi_assigned.begin(),
                                assignment->multi_assigned.end());
    std::set<std::string> subs;
    for (const auto& [sub, content] : assignment->assigned) {
      subs.insert(sub);
      auto add = [&](std::map<std::string, Tally>& m, const std::string& key) {
        Tally& t = m[key];
        t.assigned.insert(sub);
        if (multi.count(sub)) t.multi.insert(sub);
      };
      add(by_content, content);
      add(by_date, format_date(inst->date));
      add(by_group, inst->group);
    }
    multi_total += static_cast<int64_t>(multi.size());
    assigned_total += static_cast<int64_t>(subs.size());
  }

  report.multi_count = multi_total;
  report.assigned_subscribers = assigned_total;
  report.overall_rate =
      assigned_total > 0
          ? static_cast<double>(multi_total) / static_cast<double>(assigned_total)
          : 0.0;

  auto flatten = [](const std::map<std::string, Tally>& m) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& [key, t] : m) {
      double rate = t.assigned.empty()
                        ? 0.0
                        : static_cast<double>(t.multi.size()) /
                              static_cast<double>(t.assigned.size());
      out.emplace_back(key, rate);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    return out;
  };
  report.by_content = flatten(by_content);
  report.by_date = flatten(by_date);
  report.by_group = flatten(by_group);
  return report;
}

SpikeReport spike_capture(const DailySeries& aggregate,
                          const LaunchImpactSeries& impact,
                          const ContentLaunch& launch) {
  aggregate.validate();
  if (aggregate.dates.empty()) {
    throw InsufficientDataError("spike_capture: empty series");
  }
  if (launch.launch_date < aggregate.dates.front() ||
      launch.launch_date > aggregate.dates.back()) {
    throw Error("spike_capture: launch outside the aggregate series");
  }

  const Date win_lo = launch.launch_date;
  const Date win_hi = launch.post_end();

  // Mask the launch window with a linear bridge between its edges, so the
  // spike cannot inflate its own counterfactual template. Edge levels are
  // two-week means; single days are too noisy to anchor the bridge.
  DailySeries masked = aggregate;
  std::map<int32_t, size_t> index;
  for (size_t i = 0; i < aggregate.dates.size(); ++i) {
    index[aggregate.dates[i].days] = i;
  }
  auto edge_mean = [&](Date from, Date to, double fallback) {
    double sum = 0.0;
    int n = 0;
    for (Date d = from; d <= to; ++d) {
      auto it = index.find(d.days);
      if (it == index.end()) continue;
      sum += aggregate.values[it->second];
      ++n;
    }
    return n > 0 ? sum / n : fallback;
  };
  double left = edge_mean(win_lo - 14, win_lo - 1, aggregate.values.front());
  double right = edge_mean(win_hi + 1, win_hi + 14, left);
  int span = win_hi - win_lo + 2;
  for (Date d = win_lo; d <= win_hi; ++d) {
    auto it = index.find(d.days);
    if (it == index.end()) continue;
    double t = static_cast<double>(d - win_lo + 1) / static_cast<double>(span);
    masked.values[it->second] = left + (right - left) * t;
  }

  std::vector<double> tmpl = seasonal_template(masked);

  SpikeReport report;
  for (Date d = win_lo; d <= win_hi; ++d) {
    auto it = index.find(d.days);
    if (it == index.end()) continue;
    report.excess_total += aggregate.values[it->second] - tmpl[it->second];
  }
  for (const auto& day : impact.daily) {
    if (day.date >= win_lo && day.date <= win_hi &&
        index.count(day.date.days)) {
      report.estimate_total += day.n_incremental;
    }
  }

  if (report.excess_total <= 0.0) {
    report.undefined_spike = true;
    report.capture = 0.0;
    return report;
  }
  report.capture =
      std::clamp(report.estimate_total / report.excess_total, 0.0, 2.0);
  return report;
}

ExperimentReport experiment_consistency(double treatment_estimate,
                                        double control_estimate,
                                        double experiment_lift,
                                        double treatment_size) {
  if (treatment_size == 0.0) {
    throw Error("experiment_consistency: zero treatment size");
  }
  ExperimentReport report;
  report.expected = experiment_lift * treatment_size;
  report.discrepancy_abs =
      (treatment_estimate - control_estimate) - report.expected;
  report.discrepancy_rel = report.expected != 0.0
                               ? report.discrepancy_abs / report.expected
                               : std::numeric_limits<double>::infinity();
  return report;
}

}  // namespace aim

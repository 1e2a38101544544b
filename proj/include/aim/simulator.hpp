// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "aim/attribution.hpp"
#include "aim/records.hpp"

namespace aim {

// One launch inside a scenario: windows, the true per-day incremental
// signup schedule, and the generating consumption model for everyone else.
struct LaunchScenario {
  ContentLaunch launch;
  // coefficient order: intercept, log1p(age), log1p(activity), promo
  std::array<double, 4> baseline_coef = {0, 0, 0, 0};
  std::vector<int64_t> incremental_schedule;  // day 0 = launch day
  std::map<std::string, std::vector<int64_t>> group_schedules;
};

struct GroupSpec {
  std::string name;
  double weight = 1.0;
};

struct ShockSpec {
  Date start;
  Date end;  // inclusive
  double multiplier = 1.0;
};

struct ScenarioConfig {
  int days = 70;
  Date base_date;  // day 0
  int64_t base_signups_per_day = 1000;
  std::array<double, 7> dow_multipliers = {1, 1, 1, 1, 1, 1, 1};  // Sun..Sat
  double annual_amplitude = 0.0;
  bool poisson_noise = true;
  std::vector<GroupSpec> groups;  // empty = single ungrouped population
  std::vector<LaunchScenario> launches;
  std::vector<ShockSpec> shocks;
  double activity_mu = 0.4;
  double activity_sigma = 0.8;
  double promo_beta_a = 2.0;
  double promo_beta_b = 5.0;
  double noise_event_rate = 0.05;
  double incremental_activity_scale = 1.0;
  uint64_t rng_seed = 1;

  void validate() const;
};

struct DailyTruth {
  Date date;
  std::string group;
  int64_t count = 0;
  std::vector<std::string> subscriber_ids;
};

struct GroundTruth {
  // per content: realized incremental signups
  std::map<std::string, std::vector<DailyTruth>> incremental;
  std::map<std::string, std::array<double, 4>> baseline_coef;
  // day -> signups generated from the seasonal catalog process
  std::map<int32_t, int64_t> catalog_daily;

  double total(const std::string& content_id,
               const std::string& group = "") const;
  // per-day incremental count for one content (all groups pooled)
  std::map<int32_t, double> daily_series(const std::string& content_id) const;
};

struct SimulationResult {
  Dataset dataset;
  std::vector<ContentLaunch> launches;
  GroundTruth truth;
};

// Draws daily signup counts (seasonality x shocks, Poisson around the mean
// unless disabled), covariates, scheduled incremental subscribers who always
// consume their content within the label window, and baseline consumption
// from each launch's generating model. Byte-reproducible from rng_seed.
SimulationResult simulate(const ScenarioConfig& config);

// Fig-5-style assignment workload: subscribers on one signup day spread
// across groups, per-pair consumption probabilities uniform on (0,1),
// content-count distribution zero-truncated geometric.
struct AttributionSimConfig {
  int64_t n_subscribers = 10000;
  int64_t n_contents = 1250;
  int n_groups = 125;
  int hot_per_group = 8;       // group-local catalog slice
  double hot_fraction = 0.8;   // draws landing in the local slice
  double multi_prob = 0.6;     // P(consume >= 2 contents)
  double incremental_prob = 0.35;
  Date date;
  uint64_t rng_seed = 1;

  void validate() const;
};

struct AttributionSim {
  std::vector<AttributionInstance> instances;  // one per group
  std::set<std::pair<std::string, std::string>> incremental_pairs;
  double multi_consumer_fraction = 0.0;
  int64_t distinct_contents = 0;
};

AttributionSim simulate_attribution(const AttributionSimConfig& config);

// Scenario/attribution configs are JSON documents ("type" selects which).
ScenarioConfig scenario_from_json_file(const std::string& path);
AttributionSimConfig attribution_config_from_json_file(const std::string& path);
bool is_attribution_config(const std::string& path);

void write_ground_truth(const GroundTruth& truth, const std::string& path);
GroundTruth read_ground_truth(const std::string& path);

void write_attribution_truth(const AttributionSim& sim,
                             const std::string& path);

}  // namespace aim

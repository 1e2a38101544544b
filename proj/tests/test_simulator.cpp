// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "aim/cohorts.hpp"
#include "aim/dataset_io.hpp"
#include "aim/error.hpp"
#include "aim/simulator.hpp"
#include "helpers.hpp"

using namespace aim;
using namespace aim::test;

namespace {

ScenarioConfig small_toy(uint64_t seed) {
  ScenarioConfig cfg;
  cfg.days = 30;
  cfg.base_date = parse_date("2024-01-01");
  cfg.base_signups_per_day = 300;
  cfg.rng_seed = seed;
  LaunchScenario l;
  l.launch = basic_launch("album_a", parse_date("2024-01-15"), 7, 2, 10);
  l.baseline_coef = {std::log(0.2 / 0.8), 0, 0, 0};
  l.incremental_schedule = {100, 60, 30, 10};
  cfg.launches.push_back(l);
  return cfg;
}

}  // namespace

TEST_CASE("same seed gives byte-identical output files") {
  auto a = simulate(small_toy(7));
  auto b = simulate(small_toy(7));
  CHECK(a.dataset.same_records(b.dataset));

  auto dir_a = scratch_dir("sim_det_a");
  auto dir_b = scratch_dir("sim_det_b");
  write_dataset(a.dataset, dir_a);
  write_dataset(b.dataset, dir_b);
  for (const char* f : {"/signups.csv", "/consumption.csv", "/promotion.csv"}) {
    CHECK(read_file(dir_a + f) == read_file(dir_b + f));
  }

  auto c = simulate(small_toy(8));
  CHECK_FALSE(c.dataset.same_records(a.dataset));
}

TEST_CASE("counting identity: signups = catalog + scheduled incrementals") {
  const ScenarioConfig cfg = small_toy(3);
  auto sim = simulate(cfg);
  const auto& cfg_launch = cfg.launches[0];
  for (const auto& [day, catalog] : sim.truth.catalog_daily) {
    int64_t incremental = 0;
    for (const auto& [content, dailies] : sim.truth.incremental) {
      for (const auto& d : dailies) {
        if (d.date.days == day) incremental += d.count;
      }
    }
    auto it = sim.dataset.rows_by_date.find(Date{day});
    int64_t total = it == sim.dataset.rows_by_date.end()
                        ? 0
                        : static_cast<int64_t>(it->second.size());
    CHECK(total == catalog + incremental);
  }
  // Scheduled totals are realized exactly.
  int64_t want = 0;
  for (int64_t v : cfg_launch.incremental_schedule) want += v;
  CHECK(sim.truth.total("album_a") == static_cast<double>(want));
}

TEST_CASE("every ground-truth incremental subscriber carries a true label") {
  auto sim = simulate(small_toy(11));
  const auto& launch = sim.launches[0];
  for (const auto& d : sim.truth.incremental.at("album_a")) {
    for (const auto& id : d.subscriber_ids) {
      CHECK(consumption_label(sim.dataset, id, launch));
    }
  }
}

TEST_CASE("toy scenario: launch-day consumers near 500 per thousand") {
  ScenarioConfig cfg = small_toy(5);
  cfg.base_signups_per_day = 1000;
  cfg.launches[0].incremental_schedule = {375};
  auto sim = simulate(cfg);
  const auto& launch = sim.launches[0];

  int64_t n = 0, consumers = 0;
  for (uint32_t row : sim.dataset.rows_by_date.at(launch.launch_date)) {
    ++n;
    if (consumption_label(sim.dataset, row, launch)) ++consumers;
  }
  // ~1375 signups: 375 incremental + ~20% of the rest.
  double expect = 375.0 + 0.2 * static_cast<double>(n - 375);
  double se = std::sqrt(static_cast<double>(n - 375) * 0.2 * 0.8);
  CHECK(std::abs(static_cast<double>(consumers) - expect) < 4 * se);
}

TEST_CASE("null scenario: consumption matches the configured baseline") {
  ScenarioConfig cfg = small_toy(13);
  cfg.launches[0].incremental_schedule = {};
  auto sim = simulate(cfg);
  const auto& launch = sim.launches[0];
  CHECK(sim.truth.total("album_a") == 0.0);

  int64_t n = 0, consumers = 0;
  for (Date d = launch.launch_date; d <= launch.post_end(); ++d) {
    auto it = sim.dataset.rows_by_date.find(d);
    if (it == sim.dataset.rows_by_date.end()) continue;
    for (uint32_t row : it->second) {
      ++n;
      if (consumption_label(sim.dataset, row, launch)) ++consumers;
    }
  }
  double rate = static_cast<double>(consumers) / static_cast<double>(n);
  double se = std::sqrt(0.2 * 0.8 / static_cast<double>(n));
  CHECK(std::abs(rate - 0.2) < 4 * se);
}

TEST_CASE("deterministic counts disable the Poisson draw") {
  ScenarioConfig cfg = small_toy(17);
  cfg.poisson_noise = false;
  cfg.launches.clear();
  auto sim = simulate(cfg);
  for (const auto& [day, rows] : sim.dataset.rows_by_date) {
    CHECK(rows.size() == 300);
  }
}

TEST_CASE("group schedules land in their group") {
  ScenarioConfig cfg = small_toy(19);
  cfg.groups = {{"treat", 1.0}, {"ctrl", 1.0}};
  cfg.launches[0].incremental_schedule = {};
  cfg.launches[0].group_schedules["treat"] = {50, 25};
  auto sim = simulate(cfg);
  CHECK(sim.truth.total("album_a", "treat") == 75.0);
  CHECK(sim.truth.total("album_a", "ctrl") == 0.0);
  for (const auto& d : sim.truth.incremental.at("album_a")) {
    for (const auto& id : d.subscriber_ids) {
      CHECK(sim.dataset.signups[sim.dataset.require_row(id)].group == "treat");
    }
  }
}

TEST_CASE("ground truth serialization round-trips") {
  auto sim = simulate(small_toy(23));
  auto dir = scratch_dir("sim_truth");
  write_ground_truth(sim.truth, dir + "/ground_truth.json");
  auto back = read_ground_truth(dir + "/ground_truth.json");
  CHECK(back.total("album_a") == sim.truth.total("album_a"));
  CHECK(back.catalog_daily == sim.truth.catalog_daily);
  REQUIRE(back.incremental.count("album_a"));
  CHECK(back.incremental.at("album_a").size() ==
        sim.truth.incremental.at("album_a").size());
}

TEST_CASE("attribution simulation hits the multi-consumption target") {
  AttributionSimConfig cfg;
  cfg.rng_seed = 21;
  auto sim = simulate_attribution(cfg);

  CHECK(sim.multi_consumer_fraction > 0.55);
  CHECK(sim.multi_consumer_fraction < 0.65);
  CHECK(sim.distinct_contents >= 1000);
  CHECK(sim.instances.size() == 125);

  int64_t subscribers = 0;
  for (const auto& inst : sim.instances) {
    subscribers += static_cast<int64_t>(inst.n_subscribers());
    inst.validate();  // quota feasibility: never exceeds candidates
  }
  CHECK(subscribers == cfg.n_subscribers);
}

TEST_CASE("attribution simulation is seed-deterministic") {
  AttributionSimConfig cfg;
  cfg.n_subscribers = 500;
  cfg.n_groups = 10;
  cfg.n_contents = 100;
  cfg.hot_per_group = 8;
  cfg.rng_seed = 5;
  auto a = simulate_attribution(cfg);
  auto b = simulate_attribution(cfg);
  REQUIRE(a.instances.size() == b.instances.size());
  for (size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(a.instances[i].quotas == b.instances[i].quotas);
    REQUIRE(a.instances[i].candidates.size() == b.instances[i].candidates.size());
    for (size_t k = 0; k < a.instances[i].candidates.size(); ++k) {
      CHECK(a.instances[i].candidates[k].affinity ==
            b.instances[i].candidates[k].affinity);
    }
  }
  CHECK(a.incremental_pairs == b.incremental_pairs);
}

TEST_CASE("scenario config validation") {
  ScenarioConfig cfg = small_toy(1);
  cfg.days = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = small_toy(1);
  cfg.dow_multipliers[3] = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  cfg = small_toy(1);
  cfg.launches[0].incremental_schedule.assign(40, 1);  // past post window
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

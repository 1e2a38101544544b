// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aim/error.hpp"
#include "aim/rng.hpp"

namespace aim {

namespace {

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

std::string subscriber_name(int64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "s%07lld", static_cast<long long>(n));
  return buf;
}

}  // namespace

void ScenarioConfig::validate() const {
  if (days < 1) throw ConfigError("scenario: days must be >= 1");
  if (base_signups_per_day < 0) {
    throw ConfigError("scenario: base_signups_per_day must be >= 0");
  }
  for (double m : dow_multipliers) {
    if (!(m > 0)) throw ConfigError("scenario: dow multipliers must be > 0");
  }
  if (annual_amplitude < 0 || annual_amplitude >= 1) {
    throw ConfigError("scenario: annual_amplitude must be in [0,1)");
  }
  double weight_sum = 0;
  for (const auto& g : groups) {
    if (!(g.weight > 0)) throw ConfigError("scenario: group weights must be > 0");
    weight_sum += g.weight;
  }
  if (!groups.empty() && weight_sum <= 0) {
    throw ConfigError("scenario: group weights must sum > 0");
  }
  for (const auto& s : shocks) {
    if (!(s.multiplier > 0)) {
      throw ConfigError("scenario: shock multipliers must be > 0");
    }
    if (s.end < s.start) throw ConfigError("scenario: shock end before start");
  }
  for (const auto& l : launches) {
    l.launch.validate();
    auto check_schedule = [&](const std::vector<int64_t>& sched) {
      if (static_cast<int>(sched.size()) > l.launch.post_window_days + 1) {
        throw ConfigError("scenario: launch " + l.launch.content_id +
                          ": schedule extends past the post window");
      }
      for (int64_t v : sched) {
        if (v < 0) throw ConfigError("scenario: schedules must be >= 0");
      }
    };
    check_schedule(l.incremental_schedule);
    for (const auto& [g, sched] : l.group_schedules) check_schedule(sched);
  }
  if (activity_sigma < 0) throw ConfigError("scenario: activity_sigma < 0");
  if (promo_beta_a <= 0 || promo_beta_b <= 0) {
    throw ConfigError("scenario: promo beta parameters must be > 0");
  }
  if (noise_event_rate < 0 || noise_event_rate > 1) {
    throw ConfigError("scenario: noise_event_rate must be in [0,1]");
  }
  if (incremental_activity_scale <= 0) {
    throw ConfigError("scenario: incremental_activity_scale must be > 0");
  }
}

double GroundTruth::total(const std::string& content_id,
                          const std::string& group) const {
  auto it = incremental.find(content_id);
  if (it == incremental.end()) return 0.0;
  double sum = 0.0;
  for (const auto& d : it->second) {
    if (group.empty() || d.group == group) sum += static_cast<double>(d.count);
  }
  return sum;
}

std::map<int32_t, double> GroundTruth::daily_series(
    const std::string& content_id) const {
  std::map<int32_t, double> out;
  auto it = incremental.find(content_id);
  if (it == incremental.end()) return out;
  for (const auto& d : it->second) {
    out[d.date.days] += static_cast<double>(d.count);
  }
  return out;
}

SimulationResult simulate(const ScenarioConfig& config) {
  config.validate();
  Rng rng(config.rng_seed);

  std::vector<GroupSpec> groups = config.groups;
  if (groups.empty()) groups.push_back({"", 1.0});
  double weight_sum = 0;
  for (const auto& g : groups) weight_sum += g.weight;

  auto pick_group = [&]() -> size_t {
    if (groups.size() == 1) return 0;
    double u = rng.uniform() * weight_sum;
    double acc = 0;
    for (size_t g = 0; g < groups.size(); ++g) {
      acc += groups[g].weight;
      if (u < acc) return g;
    }
    return groups.size() - 1;
  };

  SimulationResult result;
  GroundTruth& truth = result.truth;
  Dataset& ds = result.dataset;
  for (const auto& l : config.launches) {
    result.launches.push_back(l.launch);
    truth.baseline_coef[l.launch.content_id] = l.baseline_coef;
  }

  // (content, day-of-truth entry) accumulator
  std::map<std::string, std::map<std::pair<int32_t, std::string>, DailyTruth>>
      truth_acc;

  int64_t next_id = 0;

  struct PendingSub {
    std::string group;
    const LaunchScenario* incremental_for = nullptr;
  };

  for (int t = 0; t < config.days; ++t) {
    Date date = config.base_date + t;
    double mult = config.dow_multipliers[static_cast<size_t>(weekday(date))];
    mult *= 1.0 + config.annual_amplitude *
                      std::sin(2.0 * 3.141592653589793 * t / 365.25);
    for (const auto& s : config.shocks) {
      if (date >= s.start && date <= s.end) mult *= s.multiplier;
    }
    double mean = static_cast<double>(config.base_signups_per_day) * mult;
    int64_t catalog_n = config.poisson_noise
                            ? rng.poisson(mean)
                            : static_cast<int64_t>(std::llround(mean));
    truth.catalog_daily[date.days] = catalog_n;

    std::vector<PendingSub> pending;
    pending.reserve(static_cast<size_t>(catalog_n));
    for (int64_t k = 0; k < catalog_n; ++k) {
      pending.push_back({groups[pick_group()].name, nullptr});
    }
    for (const auto& l : config.launches) {
      int offset = date - l.launch.launch_date;
      auto scheduled = [&](const std::vector<int64_t>& sched) -> int64_t {
        if (offset < 0 || offset >= static_cast<int>(sched.size())) return 0;
        return sched[static_cast<size_t>(offset)];
      };
      int64_t base_n = scheduled(l.incremental_schedule);
      for (int64_t k = 0; k < base_n; ++k) {
        pending.push_back({groups[pick_group()].name, &l});
      }
      for (const auto& [gname, sched] : l.group_schedules) {
        int64_t n = scheduled(sched);
        for (int64_t k = 0; k < n; ++k) pending.push_back({gname, &l});
      }
    }

    for (const auto& p : pending) {
      SignupRecord rec;
      rec.subscriber_id = subscriber_name(next_id++);
      rec.signup_date = date;
      rec.group = p.group;
      rec.activity = rng.lognormal(config.activity_mu, config.activity_sigma);
      if (p.incremental_for != nullptr) {
        rec.activity *= config.incremental_activity_scale;
      }

      if (p.incremental_for != nullptr) {
        const auto& l = *p.incremental_for;
        auto& day_truth = truth_acc[l.launch.content_id]
                                   [{date.days, p.group}];
        day_truth.date = date;
        day_truth.group = p.group;
        ++day_truth.count;
        day_truth.subscriber_ids.push_back(rec.subscriber_id);
      }

      // Per launch: promotion snapshot, then consumption. Incremental
      // subscribers always consume their own content quickly; everything
      // else follows the generating model.
      for (const auto& l : config.launches) {
        const ContentLaunch& launch = l.launch;
        if (date < launch.pre_begin() || date > launch.post_end()) continue;

        double promo = rng.beta(config.promo_beta_a, config.promo_beta_b);
        ds.promotions.push_back(
            {rec.subscriber_id, launch.content_id, promo});

        Date avail = date < launch.launch_date ? launch.launch_date : date;
        if (p.incremental_for == &l) {
          int span = std::min(2, launch.label_window_days);
          Date event = date + static_cast<int>(rng.uniform_int(0, span));
          double completion =
              rng.uniform(launch.completion_threshold, 1.0);
          ds.consumption.push_back(
              {rec.subscriber_id, launch.content_id, event, completion});
          continue;
        }

        int age = avail - date;
        double z = l.baseline_coef[0] +
                   l.baseline_coef[1] * std::log1p(static_cast<double>(age)) +
                   l.baseline_coef[2] * std::log1p(rec.activity) +
                   l.baseline_coef[3] * promo;
        double p_consume = logistic(z);
        double u = rng.uniform();
        if (u < p_consume) {
          Date event =
              avail + static_cast<int>(rng.uniform_int(0, launch.label_window_days));
          double completion = rng.uniform(launch.completion_threshold, 1.0);
          ds.consumption.push_back(
              {rec.subscriber_id, launch.content_id, event, completion});
        } else if (rng.uniform() < config.noise_event_rate) {
          // Sub-threshold browsing noise; never flips the label.
          Date event =
              avail + static_cast<int>(rng.uniform_int(0, launch.label_window_days));
          double completion =
              rng.uniform(0.0, launch.completion_threshold * 0.999);
          ds.consumption.push_back(
              {rec.subscriber_id, launch.content_id, event, completion});
        }
      }

      ds.signups.push_back(std::move(rec));
    }
  }

  for (auto& [content, days] : truth_acc) {
    auto& list = truth.incremental[content];
    for (auto& [key, daily] : days) list.push_back(std::move(daily));
  }

  ds.finalize("simulated");
  return result;
}

void AttributionSimConfig::validate() const {
  if (n_subscribers < 1) throw ConfigError("attribution sim: n_subscribers");
  if (n_contents < 1) throw ConfigError("attribution sim: n_contents");
  if (n_groups < 1 || n_groups > n_contents) {
    throw ConfigError("attribution sim: n_groups must be in [1, n_contents]");
  }
  if (hot_per_group < 1 ||
      static_cast<int64_t>(hot_per_group) * n_groups > n_contents) {
    throw ConfigError(
        "attribution sim: hot_per_group * n_groups must fit in n_contents");
  }
  if (hot_fraction < 0 || hot_fraction > 1) {
    throw ConfigError("attribution sim: hot_fraction must be in [0,1]");
  }
  if (multi_prob < 0 || multi_prob >= 1) {
    throw ConfigError("attribution sim: multi_prob must be in [0,1)");
  }
  if (incremental_prob < 0 || incremental_prob > 1) {
    throw ConfigError("attribution sim: incremental_prob must be in [0,1]");
  }
}

AttributionSim simulate_attribution(const AttributionSimConfig& config) {
  config.validate();
  Rng rng(config.rng_seed);

  auto content_name = [](int64_t c) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "c%05lld", static_cast<long long>(c));
    return std::string(buf);
  };
  auto group_name = [](int g) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "g%03d", g);
    return std::string(buf);
  };
  auto user_name = [](int64_t u) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "u%06lld", static_cast<long long>(u));
    return std::string(buf);
  };

  AttributionSim sim;
  sim.instances.resize(static_cast<size_t>(config.n_groups));
  for (int g = 0; g < config.n_groups; ++g) {
    sim.instances[static_cast<size_t>(g)].date = config.date;
    sim.instances[static_cast<size_t>(g)].group = group_name(g);
  }

  std::set<int64_t> seen_contents;
  int64_t multi_consumers = 0;

  for (int64_t i = 0; i < config.n_subscribers; ++i) {
    int g = static_cast<int>(i % config.n_groups);
    AttributionInstance& inst = sim.instances[static_cast<size_t>(g)];
    int64_t hot_base = static_cast<int64_t>(g) * config.hot_per_group;

    int64_t want = rng.zero_truncated_geometric(config.multi_prob);
    std::vector<int64_t> consumed;
    for (int attempt = 0; attempt < 100 * want &&
                          static_cast<int64_t>(consumed.size()) < want;
         ++attempt) {
      int64_t c;
      if (rng.uniform() < config.hot_fraction) {
        c = hot_base + rng.uniform_int(0, config.hot_per_group - 1);
      } else {
        c = rng.uniform_int(0, config.n_contents - 1);
      }
      if (std::find(consumed.begin(), consumed.end(), c) == consumed.end()) {
        consumed.push_back(c);
      }
    }
    if (static_cast<int64_t>(consumed.size()) >= 2) ++multi_consumers;

    std::string sub = user_name(i);
    double min_p = 2.0;
    int64_t min_content = -1;
    std::vector<double> probs(consumed.size());
    for (size_t k = 0; k < consumed.size(); ++k) {
      probs[k] = rng.uniform();
      if (probs[k] < min_p ||
          (probs[k] == min_p && consumed[k] < min_content)) {
        min_p = probs[k];
        min_content = consumed[k];
      }
      seen_contents.insert(consumed[k]);
    }

    bool incremental = rng.uniform() < config.incremental_prob;
    for (size_t k = 0; k < consumed.size(); ++k) {
      CandidatePair pair;
      pair.subscriber_id = sub;
      pair.content_id = content_name(consumed[k]);
      pair.affinity = 1.0 - probs[k];
      pair.order_rank = static_cast<int>(k) + 1;
      inst.candidates.push_back(std::move(pair));
    }
    if (incremental && min_content >= 0) {
      std::string cid = content_name(min_content);
      sim.incremental_pairs.insert({sub, cid});
      ++inst.quotas[cid];
    }
  }

  for (auto& inst : sim.instances) {
    std::sort(inst.candidates.begin(), inst.candidates.end(),
              [](const CandidatePair& a, const CandidatePair& b) {
                return std::tie(a.subscriber_id, a.content_id) <
                       std::tie(b.subscriber_id, b.content_id);
              });
    for (const auto& c : inst.candidates) {
      if (!inst.quotas.count(c.content_id)) inst.quotas[c.content_id] = 0;
    }
    inst.validate();
  }

  sim.multi_consumer_fraction = static_cast<double>(multi_consumers) /
                                static_cast<double>(config.n_subscribers);
  sim.distinct_contents = static_cast<int64_t>(seen_contents.size());
  return sim;
}

namespace {

using nlohmann::json;

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return j;
}

}  // namespace

bool is_attribution_config(const std::string& path) {
  json j = load_json(path);
  return j.value("type", "scenario") == "attribution";
}

ScenarioConfig scenario_from_json_file(const std::string& path) {
  json j = load_json(path);
  ScenarioConfig cfg;
  try {
    if (j.value("type", "scenario") != "scenario") {
      throw ConfigError(path + ": not a scenario config");
    }
    cfg.days = j.at("days").get<int>();
    cfg.base_date = parse_date(j.at("base_date").get<std::string>());
    cfg.base_signups_per_day = j.at("base_signups_per_day").get<int64_t>();
    if (j.contains("day_of_week_multipliers")) {
      auto v = j["day_of_week_multipliers"].get<std::vector<double>>();
      if (v.size() != 7) {
        throw ConfigError(path + ": day_of_week_multipliers needs 7 values");
      }
      std::copy(v.begin(), v.end(), cfg.dow_multipliers.begin());
    }
    cfg.annual_amplitude = j.value("annual_amplitude", 0.0);
    cfg.poisson_noise = j.value("poisson_noise", true);
    if (j.contains("groups")) {
      for (const auto& g : j["groups"]) {
        cfg.groups.push_back(
            {g.at("name").get<std::string>(), g.value("weight", 1.0)});
      }
    }
    if (j.contains("activity_lognormal")) {
      cfg.activity_mu = j["activity_lognormal"].value("mu", cfg.activity_mu);
      cfg.activity_sigma =
          j["activity_lognormal"].value("sigma", cfg.activity_sigma);
    }
    if (j.contains("promo_beta")) {
      cfg.promo_beta_a = j["promo_beta"].value("a", cfg.promo_beta_a);
      cfg.promo_beta_b = j["promo_beta"].value("b", cfg.promo_beta_b);
    }
    cfg.noise_event_rate = j.value("noise_event_rate", cfg.noise_event_rate);
    cfg.incremental_activity_scale =
        j.value("incremental_activity_scale", cfg.incremental_activity_scale);
    if (j.contains("shocks")) {
      for (const auto& s : j["shocks"]) {
        cfg.shocks.push_back({parse_date(s.at("start").get<std::string>()),
                              parse_date(s.at("end").get<std::string>()),
                              s.at("multiplier").get<double>()});
      }
    }
    for (const auto& l : j.value("launches", json::array())) {
      LaunchScenario ls;
      ls.launch.content_id = l.at("content_id").get<std::string>();
      ls.launch.launch_date = parse_date(l.at("launch_date").get<std::string>());
      ls.launch.pre_window_days =
          l.value("pre_window_days", ls.launch.pre_window_days);
      ls.launch.pre_gap_days = l.value("pre_gap_days", ls.launch.pre_gap_days);
      ls.launch.post_window_days =
          l.value("post_window_days", ls.launch.post_window_days);
      ls.launch.completion_threshold =
          l.value("completion_threshold", ls.launch.completion_threshold);
      ls.launch.label_window_days =
          l.value("label_window_days", ls.launch.label_window_days);
      auto coef = l.at("baseline_coef").get<std::vector<double>>();
      if (coef.size() != 4) {
        throw ConfigError(path + ": baseline_coef needs 4 values");
      }
      std::copy(coef.begin(), coef.end(), ls.baseline_coef.begin());
      ls.incremental_schedule =
          l.value("incremental_schedule", std::vector<int64_t>{});
      if (l.contains("group_schedules")) {
        for (const auto& [g, sched] : l["group_schedules"].items()) {
          ls.group_schedules[g] = sched.get<std::vector<int64_t>>();
        }
      }
      cfg.launches.push_back(std::move(ls));
    }
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

AttributionSimConfig attribution_config_from_json_file(
    const std::string& path) {
  json j = load_json(path);
  AttributionSimConfig cfg;
  try {
    if (j.value("type", "") != "attribution") {
      throw ConfigError(path + ": not an attribution config");
    }
    cfg.n_subscribers = j.value("n_subscribers", cfg.n_subscribers);
    cfg.n_contents = j.value("n_contents", cfg.n_contents);
    cfg.n_groups = j.value("n_groups", cfg.n_groups);
    cfg.hot_per_group = j.value("hot_per_group", cfg.hot_per_group);
    cfg.hot_fraction = j.value("hot_fraction", cfg.hot_fraction);
    cfg.multi_prob = j.value("multi_prob", cfg.multi_prob);
    cfg.incremental_prob = j.value("incremental_prob", cfg.incremental_prob);
    if (j.contains("date")) {
      cfg.date = parse_date(j["date"].get<std::string>());
    }
    cfg.rng_seed = j.value("rng_seed", cfg.rng_seed);
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  cfg.validate();
  return cfg;
}

void write_ground_truth(const GroundTruth& truth, const std::string& path) {
  json contents = json::object();
  for (const auto& [cid, daily] : truth.incremental) {
    json days = json::array();
    for (const auto& d : daily) {
      days.push_back({{"date", format_date(d.date)},
                      {"group", d.group},
                      {"count", d.count},
                      {"subscriber_ids", d.subscriber_ids}});
    }
    json entry{{"daily", days}};
    auto coef = truth.baseline_coef.find(cid);
    if (coef != truth.baseline_coef.end()) {
      entry["baseline_coef"] = coef->second;
    }
    contents[cid] = entry;
  }
  json catalog = json::object();
  for (const auto& [day, n] : truth.catalog_daily) {
    catalog[format_date(Date{day})] = n;
  }
  json j{{"type", "scenario"},
         {"contents", contents},
         {"catalog_daily", catalog}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

GroundTruth read_ground_truth(const std::string& path) {
  json j = load_json(path);
  GroundTruth truth;
  try {
    for (const auto& [cid, entry] : j.at("contents").items()) {
      std::vector<DailyTruth>& daily = truth.incremental[cid];
      for (const auto& d : entry.at("daily")) {
        DailyTruth dt;
        dt.date = parse_date(d.at("date").get<std::string>());
        dt.group = d.at("group").get<std::string>();
        dt.count = d.at("count").get<int64_t>();
        dt.subscriber_ids =
            d.at("subscriber_ids").get<std::vector<std::string>>();
        daily.push_back(std::move(dt));
      }
      if (entry.contains("baseline_coef")) {
        auto coef = entry["baseline_coef"].get<std::vector<double>>();
        std::array<double, 4> arr{};
        std::copy_n(coef.begin(), std::min<size_t>(4, coef.size()), arr.begin());
        truth.baseline_coef[cid] = arr;
      }
    }
    const json catalog = j.value("catalog_daily", json::object());
    for (const auto& [date, n] : catalog.items()) {
      truth.catalog_daily[parse_date(date).days] = n.get<int64_t>();
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return truth;
}

void write_attribution_truth(const AttributionSim& sim,
                             const std::string& path) {
  json pairs = json::array();
  for (const auto& [sub, content] : sim.incremental_pairs) {
    pairs.push_back(json::array({sub, content}));
  }
  json j{{"type", "attribution"},
         {"incremental_pairs", pairs},
         {"multi_consumer_fraction", sim.multi_consumer_fraction},
         {"distinct_contents", sim.distinct_contents}};
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

}  // namespace aim

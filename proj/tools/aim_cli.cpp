// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: simulate -> fit -> estimate -> attribute ->
// validate, driven by a JSON run config with flag overrides. Exit codes:
// 0 success, 1 computational failure, 2 usage or config error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aim/attribution.hpp"
#include "aim/baseline_model.hpp"
#include "aim/cohorts.hpp"
#include "aim/dataset_io.hpp"
#include "aim/error.hpp"
#include "aim/estimator.hpp"
#include "aim/log.hpp"
#include "aim/parallel.hpp"
#include "aim/pipeline.hpp"
#include "aim/simulator.hpp"
#include "aim/validation.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunConfig {
  std::string signups;
  std::string consumption;
  std::string promotion;
  std::string launches;
  std::string out_dir = ".";
  std::string model_file;
  std::string impact_file;
  aim::ModelKind model_kind = aim::ModelKind::kGlm;
  aim::FitOptions fit;
  std::string solver = "exact";
  double lambda = 0.0;
  std::optional<double> decay_gamma;
  int64_t node_budget = 200000;
  std::vector<double> lambda_grid = {0.0, 0.1, 1.0, 10.0};
  int threads = 0;
  uint64_t seed = 1;
  json raw;  // fingerprinted into reports

  struct Experiment {
    std::string treatment_group;
    std::string control_group;
    std::string content_id;
    double lift = 0.0;
    double treatment_size = 0.0;
  };
  std::optional<Experiment> experiment;
};

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw aim::ConfigError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw aim::ConfigError(path + ": " + e.what());
  }
  RunConfig cfg;
  cfg.raw = j;
  try {
    cfg.signups = j.value("signups", "");
    cfg.consumption = j.value("consumption", "");
    cfg.promotion = j.value("promotion", "");
    cfg.launches = j.value("launches", "");
    cfg.out_dir = j.value("out_dir", cfg.out_dir);
    cfg.model_file = j.value("model_file", "");
    cfg.impact_file = j.value("impact_file", "");
    if (j.contains("model")) {
      const auto& m = j["model"];
      cfg.model_kind =
          aim::model_kind_from_string(m.value("kind", std::string("glm")));
      cfg.fit.l2_penalty = m.value("l2_penalty", cfg.fit.l2_penalty);
      cfg.fit.max_iterations = m.value("max_iterations", cfg.fit.max_iterations);
      cfg.fit.gradient_tol = m.value("gradient_tol", cfg.fit.gradient_tol);
      if (m.contains("bins")) {
        const auto& b = m["bins"];
        cfg.fit.bins.age_edges =
            b.value("age_edges", cfg.fit.bins.age_edges);
        cfg.fit.bins.activity_edges =
            b.value("activity_edges", cfg.fit.bins.activity_edges);
        cfg.fit.bins.promo_edges =
            b.value("promo_edges", cfg.fit.bins.promo_edges);
      }
    }
    cfg.solver = j.value("solver", cfg.solver);
    cfg.lambda = j.value("lambda", cfg.lambda);
    if (j.contains("decay_gamma") && !j["decay_gamma"].is_null()) {
      cfg.decay_gamma = j["decay_gamma"].get<double>();
    }
    cfg.node_budget = j.value("node_budget", cfg.node_budget);
    if (j.contains("lambda_grid")) {
      cfg.lambda_grid = j["lambda_grid"].get<std::vector<double>>();
    }
    cfg.threads = j.value("threads", cfg.threads);
    cfg.seed = j.value("seed", cfg.seed);
    if (j.contains("experiment")) {
      const auto& e = j["experiment"];
      RunConfig::Experiment ex;
      ex.treatment_group = e.at("treatment_group").get<std::string>();
      ex.control_group = e.at("control_group").get<std::string>();
      ex.content_id = e.at("content_id").get<std::string>();
      ex.lift = e.at("lift").get<double>();
      ex.treatment_size = e.at("treatment_size").get<double>();
      cfg.experiment = ex;
    }
  } catch (const json::exception& e) {
    throw aim::ConfigError(path + ": " + e.what());
  }
  return cfg;
}

std::string fingerprint(const json& j) {
  std::string s = j.dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) {
    throw aim::ConfigError("config: missing path for " + what);
  }
  if (!fs::exists(path)) {
    throw aim::ConfigError(what + " file not found: " + path);
  }
}

aim::Dataset load_config_dataset(const RunConfig& cfg) {
  require_file(cfg.signups, "signups");
  require_file(cfg.consumption, "consumption");
  std::string promo = cfg.promotion;
  if (!promo.empty() && !fs::exists(promo)) {
    aim::log::warn("promotion file " + promo +
                   " not found; proceeding with promo_intensity = 0");
    promo.clear();
  }
  return aim::load_dataset(cfg.signups, cfg.consumption, promo);
}

std::vector<aim::ContentLaunch> load_config_launches(const RunConfig& cfg) {
  require_file(cfg.launches, "launches");
  return aim::load_launches(cfg.launches);
}

// Model: reuse model_file when present, else fit from the control pool.
std::pair<aim::BaselineModel, aim::TrainingReport> obtain_model(
    const RunConfig& cfg, const aim::Dataset& ds,
    const std::vector<aim::ContentLaunch>& launches) {
  if (!cfg.model_file.empty() && fs::exists(cfg.model_file)) {
    aim::log::info("loading model from " + cfg.model_file);
    return aim::load_model(cfg.model_file);
  }
  auto rows = aim::pooled_pre_rows(ds, launches);
  aim::log::info("fitting " + aim::to_string(cfg.model_kind) + " model on " +
                 std::to_string(rows.size()) + " control rows");
  return aim::fit_baseline(rows, cfg.model_kind, cfg.fit);
}

std::vector<aim::LaunchImpactSeries> obtain_series(
    const RunConfig& cfg, const aim::Dataset& ds,
    const std::vector<aim::ContentLaunch>& launches,
    const aim::BaselineModel& model) {
  if (!cfg.impact_file.empty() && fs::exists(cfg.impact_file)) {
    aim::log::info("loading impact series from " + cfg.impact_file);
    return aim::read_impact_csv(cfg.impact_file);
  }
  std::vector<aim::LaunchImpactSeries> series;
  for (const auto& launch : launches) {
    for (const auto& group : ds.groups()) {
      series.push_back(aim::estimate_launch_impact(ds, launch, model, group));
    }
  }
  return series;
}

std::string out_path(const RunConfig& cfg, const std::string& name) {
  fs::create_directories(cfg.out_dir);
  return (fs::path(cfg.out_dir) / name).string();
}

// ---------------------------------------------------------------------------

int cmd_simulate(const std::string& scenario_path,
                 std::optional<uint64_t> seed_override,
                 const std::string& out_dir) {
  require_file(scenario_path, "scenario");
  fs::create_directories(out_dir);
  auto join = [&](const char* name) {
    return (fs::path(out_dir) / name).string();
  };

  if (aim::is_attribution_config(scenario_path)) {
    auto cfg = aim::attribution_config_from_json_file(scenario_path);
    if (seed_override) cfg.rng_seed = *seed_override;
    auto sim = aim::simulate_attribution(cfg);
    aim::write_attribution_truth(sim, join("ground_truth.json"));
    aim::log::info("attribution instance: " +
                   std::to_string(sim.instances.size()) + " groups, " +
                   std::to_string(sim.distinct_contents) + " contents");
    return 0;
  }

  auto cfg = aim::scenario_from_json_file(scenario_path);
  if (seed_override) cfg.rng_seed = *seed_override;
  auto sim = aim::simulate(cfg);
  aim::write_dataset(sim.dataset, out_dir);
  aim::write_launches(sim.launches, join("launches.json"));
  aim::write_ground_truth(sim.truth, join("ground_truth.json"));
  aim::log::info("simulated " + std::to_string(sim.dataset.signups.size()) +
                 " signups, " + std::to_string(sim.dataset.consumption.size()) +
                 " events");
  return 0;
}

int cmd_fit(const RunConfig& cfg) {
  auto ds = load_config_dataset(cfg);
  auto launches = load_config_launches(cfg);
  auto rows = aim::pooled_pre_rows(ds, launches);
  auto [model, report] = aim::fit_baseline(rows, cfg.model_kind, cfg.fit);
  aim::save_model(model, report, out_path(cfg, "model.json"));
  aim::log::info("fit: " + std::to_string(report.n_rows) + " rows, log_loss " +
                 std::to_string(report.log_loss) + ", " +
                 (report.converged ? "converged" : "not converged"));
  return 0;
}

int cmd_estimate(const RunConfig& cfg) {
  auto ds = load_config_dataset(cfg);
  auto launches = load_config_launches(cfg);
  auto [model, report] = obtain_model(cfg, ds, launches);

  std::vector<aim::LaunchImpactSeries> series;
  for (const auto& launch : launches) {
    for (const auto& group : ds.groups()) {
      series.push_back(aim::estimate_launch_impact(ds, launch, model, group));
    }
  }
  aim::write_impact_csv(series, out_path(cfg, "impact.csv"));
  aim::write_impact_summary(series, out_path(cfg, "impact_summary.json"));
  if (cfg.model_file.empty() || !fs::exists(cfg.model_file)) {
    aim::save_model(model, report, out_path(cfg, "model.json"));
  }
  for (const auto& s : series) {
    aim::log::info("impact " + s.content_id +
                   (s.group.empty() ? "" : " [" + s.group + "]") + ": " +
                   std::to_string(s.total_incremental));
  }
  return 0;
}

std::vector<std::pair<const aim::AttributionInstance*, const aim::Assignment*>>
solve_instances(const std::vector<aim::AttributionInstance>& instances,
                std::vector<aim::Assignment>& storage, const RunConfig& cfg) {
  storage.resize(instances.size());
  aim::SolveOptions options;
  options.node_budget = cfg.node_budget;
  aim::par::parallel_for(instances.size(), [&](size_t i) {
    storage[i] = cfg.solver == "greedy"
                     ? aim::rank_greedy(instances[i], cfg.lambda)
                     : aim::solve_exact(instances[i], cfg.lambda, options);
  });
  std::vector<std::pair<const aim::AttributionInstance*, const aim::Assignment*>>
      solved;
  for (size_t i = 0; i < instances.size(); ++i) {
    solved.emplace_back(&instances[i], &storage[i]);
  }
  return solved;
}

int cmd_attribute(const RunConfig& cfg) {
  if (cfg.solver != "greedy" && cfg.solver != "exact") {
    throw aim::ConfigError("solver must be greedy|exact, got " + cfg.solver);
  }
  auto ds = load_config_dataset(cfg);
  auto launches = load_config_launches(cfg);
  auto [model, report] = obtain_model(cfg, ds, launches);
  auto series = obtain_series(cfg, ds, launches, model);

  auto instances = aim::build_instances(ds, launches, series, model);
  if (cfg.decay_gamma) {
    for (auto& inst : instances) {
      inst = aim::apply_order_decay(inst, *cfg.decay_gamma);
    }
  }
  std::vector<aim::Assignment> storage;
  auto solved = solve_instances(instances, storage, cfg);
  aim::write_attribution_csv(solved, out_path(cfg, "attribution.csv"));

  int64_t assigned = 0, multi = 0;
  for (const auto& a : storage) {
    assigned += static_cast<int64_t>(a.assigned.size());
    multi += static_cast<int64_t>(a.multi_assigned.size());
  }
  aim::log::info("attribution: " + std::to_string(assigned) + " pairs, " +
                 std::to_string(multi) + " multi-assigned subscribers");
  return 0;
}

int cmd_pareto(const RunConfig* cfg_opt, const std::string& scenario_path,
               std::optional<uint64_t> seed_override,
               const std::vector<double>& lambdas, const std::string& out_dir,
               std::optional<double> decay_gamma, int64_t node_budget) {
  std::vector<aim::AttributionInstance> instances;
  if (!scenario_path.empty()) {
    require_file(scenario_path, "scenario");
    auto cfg = aim::attribution_config_from_json_file(scenario_path);
    if (seed_override) cfg.rng_seed = *seed_override;
    instances = aim::simulate_attribution(cfg).instances;
  } else if (cfg_opt != nullptr) {
    auto ds = load_config_dataset(*cfg_opt);
    auto launches = load_config_launches(*cfg_opt);
    auto [model, report] = obtain_model(*cfg_opt, ds, launches);
    auto series = obtain_series(*cfg_opt, ds, launches, model);
    instances = aim::build_instances(ds, launches, series, model);
  } else {
    throw aim::ConfigError("pareto: need --config or --scenario");
  }
  if (decay_gamma) {
    for (auto& inst : instances) {
      inst = aim::apply_order_decay(inst, *decay_gamma);
    }
  }

  aim::SolveOptions options;
  options.node_budget = node_budget;
  auto points = aim::pareto_sweep(instances, lambdas, options);
  fs::create_directories(out_dir);
  aim::write_pareto_csv(points, (fs::path(out_dir) / "pareto.csv").string());
  for (const auto& p : points) {
    aim::log::info("lambda " + std::to_string(p.lambda) + ": multi_rate " +
                   std::to_string(p.multi_rate) + ", mean_affinity " +
                   std::to_string(p.mean_affinity));
  }
  return 0;
}

int cmd_validate(const RunConfig& cfg) {
  auto ds = load_config_dataset(cfg);
  auto launches = load_config_launches(cfg);
  auto [model, report] = obtain_model(cfg, ds, launches);
  auto series = obtain_series(cfg, ds, launches, model);

  json out;
  out["config_fingerprint"] = fingerprint(cfg.raw);

  auto aggregate = aim::aggregate_signups(ds);
  try {
    auto residual = aim::residual_regularity(aggregate, series);
    out["residual_regularity"] = {
        {"regularity_score", residual.regularity_score},
        {"baseline_score", residual.baseline_score},
        {"improved", residual.regularity_score < residual.baseline_score}};
  } catch (const aim::InsufficientDataError& e) {
    out["residual_regularity"] = {{"error", e.what()}};
  }

  json spikes = json::array();
  for (const auto& launch : launches) {
    // Pool groups for the aggregate-level spike check.
    aim::LaunchImpactSeries pooled;
    pooled.content_id = launch.content_id;
    std::map<int32_t, double> daily;
    for (const auto& s : series) {
      if (s.content_id != launch.content_id) continue;
      for (const auto& d : s.daily) daily[d.date.days] += d.n_incremental;
    }
    for (const auto& [day, v] : daily) {
      aim::DailyEstimate d;
      d.content_id = launch.content_id;
      d.date = aim::Date{day};
      d.n_incremental = v;
      pooled.daily.push_back(d);
    }
    pooled.recompute_totals();
    auto spike = aim::spike_capture(aggregate, pooled, launch);
    spikes.push_back({{"content_id", launch.content_id},
                      {"capture", spike.capture},
                      {"estimate_total", spike.estimate_total},
                      {"excess_total", spike.excess_total},
                      {"undefined_spike", spike.undefined_spike},
                      {"total_estimate", pooled.total_incremental}});
  }
  out["spike_capture"] = spikes;

  {
    auto instances = aim::build_instances(ds, launches, series, model);
    std::vector<aim::Assignment> storage;
    auto solved = solve_instances(instances, storage, cfg);
    auto multi = aim::multiple_assignment_diagnostic(solved);
    json by_content = json::array();
    for (const auto& [key, rate] : multi.by_content) {
      by_content.push_back({{"content_id", key}, {"multi_rate", rate}});
    }
    json by_group = json::array();
    for (const auto& [key, rate] : multi.by_group) {
      by_group.push_back({{"group", key}, {"multi_rate", rate}});
    }
    out["multiple_assignment"] = {
        {"overall_rate", multi.overall_rate},
        {"multi_count", multi.multi_count},
        {"assigned_subscribers", multi.assigned_subscribers},
        {"by_content", by_content},
        {"by_group", by_group}};
  }

  if (cfg.experiment) {
    const auto& ex = *cfg.experiment;
    double treatment = 0.0, control = 0.0;
    for (const auto& s : series) {
      if (s.content_id != ex.content_id) continue;
      if (s.group == ex.treatment_group) treatment = s.total_incremental;
      if (s.group == ex.control_group) control = s.total_incremental;
    }
    auto rep = aim::experiment_consistency(treatment, control, ex.lift,
                                           ex.treatment_size);
    out["experiment_consistency"] = {
        {"treatment_estimate", treatment},
        {"control_estimate", control},
        {"expected", rep.expected},
        {"discrepancy_abs", rep.discrepancy_abs},
        {"discrepancy_rel", rep.discrepancy_rel}};
  }

  std::ofstream file(out_path(cfg, "validation_report.json"), std::ios::trunc);
  if (!file) throw aim::Error("cannot write validation_report.json");
  file << out.dump(2) << "\n";
  aim::log::info("validation report written");
  return 0;
}

std::vector<double> parse_lambda_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw aim::ConfigError("bad lambda value '" + item + "'");
    }
  }
  if (out.empty()) throw aim::ConfigError("empty lambda list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acquisition impact model pipeline"};
  app.require_subcommand(1);

  std::string config_path, scenario_path, out_dir, model_kind, solver,
      lambdas_text;
  std::optional<uint64_t> seed;
  std::optional<double> lambda_flag, decay_gamma;
  std::optional<int64_t> node_budget;
  int threads = 0;

  auto add_common = [&](CLI::App* cmd, bool config_required) {
    auto* opt = cmd->add_option("--config", config_path, "run config JSON");
    if (config_required) opt->required();
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--threads", threads, "worker threads (0 = default)");
  };

  auto* sim = app.add_subcommand("simulate", "generate a synthetic event log");
  sim->add_option("--scenario", scenario_path, "scenario JSON")->required();
  sim->add_option("--seed", seed, "RNG seed override");
  sim->add_option("--out", out_dir, "output directory")->required();
  sim->add_option("--threads", threads, "worker threads (0 = default)");

  auto* fit = app.add_subcommand("fit", "fit the baseline consumption model");
  add_common(fit, true);
  fit->add_option("--model", model_kind, "glm|binned");

  auto* est = app.add_subcommand("estimate", "estimate launch impact series");
  add_common(est, true);
  est->add_option("--model", model_kind, "glm|binned");

  auto* attr = app.add_subcommand("attribute", "assign subscribers to launches");
  add_common(attr, true);
  attr->add_option("--model", model_kind, "glm|binned");
  attr->add_option("--solver", solver, "greedy|exact");
  attr->add_option("--lambda", lambda_flag, "affinity weight");
  attr->add_option("--decay-gamma", decay_gamma, "consumption-order decay");
  attr->add_option("--node-budget", node_budget, "branch-and-bound node cap");

  auto* pareto = app.add_subcommand("pareto", "lambda trade-off sweep");
  add_common(pareto, false);
  pareto->add_option("--scenario", scenario_path,
                     "attribution scenario JSON (instead of --config)");
  pareto->add_option("--seed", seed, "RNG seed override for --scenario");
  pareto->add_option("--lambdas", lambdas_text, "comma-separated lambda grid");
  pareto->add_option("--decay-gamma", decay_gamma, "consumption-order decay");
  pareto->add_option("--node-budget", node_budget, "branch-and-bound node cap");

  auto* val = app.add_subcommand("validate", "diagnostics over estimates");
  add_common(val, true);
  val->add_option("--model", model_kind, "glm|binned");
  val->add_option("--solver", solver, "greedy|exact");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) {
      aim::par::set_threads(threads);
      return cmd_simulate(scenario_path, seed, out_dir);
    }

    RunConfig cfg;
    bool have_config = !config_path.empty();
    if (have_config) cfg = load_run_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (!model_kind.empty()) {
      cfg.model_kind = aim::model_kind_from_string(model_kind);
    }
    if (!solver.empty()) cfg.solver = solver;
    if (lambda_flag) cfg.lambda = *lambda_flag;
    if (decay_gamma) cfg.decay_gamma = decay_gamma;
    if (node_budget) cfg.node_budget = *node_budget;
    if (seed) cfg.seed = *seed;
    if (threads != 0) cfg.threads = threads;
    aim::par::set_threads(cfg.threads);

    if (fit->parsed()) return cmd_fit(cfg);
    if (est->parsed()) return cmd_estimate(cfg);
    if (attr->parsed()) return cmd_attribute(cfg);
    if (pareto->parsed()) {
      std::vector<double> grid =
          lambdas_text.empty() ? cfg.lambda_grid : parse_lambda_list(lambdas_text);
      return cmd_pareto(have_config ? &cfg : nullptr, scenario_path, seed,
                        grid, cfg.out_dir,
                        cfg.decay_gamma ? cfg.decay_gamma : decay_gamma,
                        cfg.node_budget);
    }
    if (val->parsed()) return cmd_validate(cfg);
    return 2;
  } catch (const aim::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const aim::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const aim::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

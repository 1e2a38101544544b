// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/baseline_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aim/error.hpp"
#include "aim/parallel.hpp"

namespace aim {

namespace {

constexpr double kProbEps = 1e-6;

double clamp_prob(double p) {
  return std::clamp(p, kProbEps, 1.0 - kProbEps);
}

double logistic(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
double softplus(double x) {
  if (x > 0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

void features(const LabeledRow& row, std::array<double, 4>& f) {
  f[0] = 1.0;
  f[1] = std::log1p(static_cast<double>(row.age_days));
  f[2] = std::log1p(row.activity);
  f[3] = row.promo_intensity;
}

double linear_term(const std::array<double, 4>& coef,
                   const std::array<double, 4>& f) {
  return coef[0] * f[0] + coef[1] * f[1] + coef[2] * f[2] + coef[3] * f[3];
}

size_t bucket(double v, const std::vector<double>& edges) {
  return static_cast<size_t>(
      std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
}

struct CellIndex {
  size_t n_age, n_act, n_promo;

  explicit CellIndex(const BinConfig& bins)
      : n_age(bins.age_edges.size() + 1),
        n_act(bins.activity_edges.size() + 1),
        n_promo(bins.promo_edges.size() + 1) {}

  size_t total() const { return n_age * n_act * n_promo; }

  size_t at(const BinConfig& bins, double age, double activity,
            double promo) const {
    size_t a = bucket(age, bins.age_edges);
    size_t b = bucket(activity, bins.activity_edges);
    size_t c = bucket(promo, bins.promo_edges);
    return (a * n_act + b) * n_promo + c;
  }
};

}  // namespace

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "glm") return ModelKind::kGlm;
  if (s == "binned") return ModelKind::kBinned;
  throw ConfigError("unknown model kind '" + s + "' (want glm|binned)");
}

std::string to_string(ModelKind k) {
  return k == ModelKind::kGlm ? "glm" : "binned";
}

double BaselineModel::predict(double age_days, double activity,
                              double promo_intensity) const {
  if (kind == ModelKind::kGlm) {
    double z = coef[0] + coef[1] * std::log1p(age_days) +
               coef[2] * std::log1p(activity) + coef[3] * promo_intensity;
    return clamp_prob(logistic(z));
  }
  CellIndex idx(bins);
  size_t cell = idx.at(bins, age_days, activity, promo_intensity);
  double rate = cell_count[cell] > 0 ? cell_rate[cell] : global_rate;
  return clamp_prob(rate);
}

double predict_p(const BaselineModel& model, double age_days, double activity,
                 double promo_intensity) {
  return model.predict(age_days, activity, promo_intensity);
}

namespace glm_kernel {

namespace {

void accumulate_range(std::span<const LabeledRow> rows, size_t begin,
                      size_t end, const std::array<double, 4>& coef,
                      Accum& acc) {
  for (size_t i = begin; i < end; ++i) {
    std::array<double, 4> f;
    features(rows[i], f);
    double z = linear_term(coef, f);
    double p = logistic(z);
    double y = rows[i].consumed ? 1.0 : 0.0;
    acc.log_lik += y * z - softplus(z);
    double resid = y - p;
    for (int k = 0; k < 4; ++k) acc.grad[k] += resid * f[k];
  }
}

}  // namespace

Accum accumulate_serial(std::span<const LabeledRow> rows,
                        const std::array<double, 4>& coef) {
  // Blocked like the parallel path so both sum in the same order.
  Accum total;
  size_t n = rows.size();
  for (size_t b = 0; b < n; b += par::kDefaultBlock) {
    Accum part;
    accumulate_range(rows, b, std::min(n, b + par::kDefaultBlock), coef, part);
    total.log_lik += part.log_lik;
    for (int k = 0; k < 4; ++k) total.grad[k] += part.grad[k];
  }
  return total;
}

Accum accumulate_parallel(std::span<const LabeledRow> rows,
                          const std::array<double, 4>& coef) {
  return par::blocked_reduce<Accum>(
      rows.size(), Accum{},
      [&](size_t begin, size_t end, Accum& acc) {
        accumulate_range(rows, begin, end, coef, acc);
      },
      [](Accum& into, const Accum& from) {
        into.log_lik += from.log_lik;
        for (int k = 0; k < 4; ++k) into.grad[k] += from.grad[k];
      });
}

double mean_prediction_serial(const BaselineModel& model,
                              std::span<const LabeledRow> rows) {
  double total = 0.0;
  size_t n = rows.size();
  for (size_t b = 0; b < n; b += par::kDefaultBlock) {
    double part = 0.0;
    size_t end = std::min(n, b + par::kDefaultBlock);
    for (size_t i = b; i < end; ++i) {
      part += model.predict(rows[i].age_days, rows[i].activity,
                            rows[i].promo_intensity);
    }
    total += part;
  }
  return total / static_cast<double>(n);
}

double mean_prediction_parallel(const BaselineModel& model,
                                std::span<const LabeledRow> rows) {
  double total = par::blocked_reduce<double>(
      rows.size(), 0.0,
      [&](size_t begin, size_t end, double& acc) {
        for (size_t i = begin; i < end; ++i) {
          acc += model.predict(rows[i].age_days, rows[i].activity,
                               rows[i].promo_intensity);
        }
      },
      [](double& into, const double& from) { into += from; });
  return total / static_cast<double>(rows.size());
}

}  // namespace glm_kernel

namespace {

// Penalized mean log-likelihood; the intercept carries no penalty so the
// fitted model stays calibrated on its training set.
double penalized_objective(double mean_ll, const std::array<double, 4>& coef,
                           double l2) {
  double pen = 0.0;
  for (int k = 1; k < 4; ++k) pen += coef[k] * coef[k];
  return mean_ll - 0.5 * l2 * pen;
}

std::pair<BaselineModel, TrainingReport> fit_glm(
    std::span<const LabeledRow> rows, const FitOptions& opt,
    TrainingReport report) {
  const double n = static_cast<double>(rows.size());
  std::array<double, 4> coef = {0, 0, 0, 0};

  auto eval = [&](const std::array<double, 4>& c) {
    glm_kernel::Accum acc = glm_kernel::accumulate_parallel(rows, c);
    acc.log_lik /= n;
    for (int k = 0; k < 4; ++k) acc.grad[k] /= n;
    for (int k = 1; k < 4; ++k) acc.grad[k] -= opt.l2_penalty * c[k];
    return acc;
  };

  glm_kernel::Accum cur = eval(coef);
  double obj = penalized_objective(cur.log_lik, coef, opt.l2_penalty);
  int iter = 0;
  bool converged = false;
  for (; iter < opt.max_iterations; ++iter) {
    double gnorm = 0.0;
    for (double g : cur.grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (gnorm < opt.gradient_tol) {
      converged = true;
      break;
    }
    // Backtracking line search on the ascent direction (the gradient).
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      std::array<double, 4> trial;
      for (int k = 0; k < 4; ++k) trial[k] = coef[k] + step * cur.grad[k];
      glm_kernel::Accum t = eval(trial);
      double trial_obj =
          penalized_objective(t.log_lik, trial, opt.l2_penalty);
      if (trial_obj >= obj + 1e-4 * step * gnorm * gnorm) {
        coef = trial;
        cur = t;
        obj = trial_obj;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // flat to machine precision
  }

  BaselineModel model;
  model.kind = ModelKind::kGlm;
  model.coef = coef;

  report.iterations = iter;
  report.converged = converged;
  report.log_loss = -cur.log_lik;
  return {std::move(model), report};
}

std::pair<BaselineModel, TrainingReport> fit_binned(
    std::span<const LabeledRow> rows, const FitOptions& opt,
    TrainingReport report) {
  BaselineModel model;
  model.kind = ModelKind::kBinned;
  model.bins = opt.bins;
  CellIndex idx(model.bins);
  model.cell_rate.assign(idx.total(), 0.0);
  model.cell_count.assign(idx.total(), 0);

  double positives = 0.0;
  std::vector<double> cell_pos(idx.total(), 0.0);
  for (const auto& row : rows) {
    size_t cell =
        idx.at(model.bins, row.age_days, row.activity, row.promo_intensity);
    ++model.cell_count[cell];
    if (row.consumed) {
      cell_pos[cell] += 1.0;
      positives += 1.0;
    }
  }
  model.global_rate = positives / static_cast<double>(rows.size());
  for (size_t c = 0; c < idx.total(); ++c) {
    if (model.cell_count[c] > 0) {
      model.cell_rate[c] = cell_pos[c] / static_cast<double>(model.cell_count[c]);
    }
  }

  double ll = 0.0;
  for (const auto& row : rows) {
    double p = model.predict(row.age_days, row.activity, row.promo_intensity);
    ll += row.consumed ? std::log(p) : std::log1p(-p);
  }
  report.log_loss = -ll / static_cast<double>(rows.size());
  report.iterations = 1;
  report.converged = true;
  return {std::move(model), report};
}

}  // namespace

std::pair<BaselineModel, TrainingReport> fit_baseline(
    std::span<const LabeledRow> rows, ModelKind kind,
    const FitOptions& options) {
  if (rows.empty()) throw Error("fit_baseline: empty training set");

  size_t positives = 0;
  int min_age = rows[0].age_days;
  for (const auto& row : rows) {
    if (row.age_days == 0) {
      throw Error("fit_baseline: row for subscriber " + row.subscriber_id +
                  " has age_days = 0; training rows must be pre-launch");
    }
    if (row.consumed) ++positives;
    min_age = std::min(min_age, row.age_days);
  }

  TrainingReport report;
  report.n_rows = rows.size();
  report.min_age_days = min_age;
  report.age_extrapolation = min_age > 0;  // target cohorts have age 0

  if (positives == 0 || positives == rows.size()) {
    // Degenerate labels: constant model at the (clamped) empirical rate.
    double rate =
        clamp_prob(static_cast<double>(positives) / static_cast<double>(rows.size()));
    BaselineModel model;
    model.kind = ModelKind::kGlm;
    model.coef = {std::log(rate / (1.0 - rate)), 0.0, 0.0, 0.0};
    report.converged = true;
    report.degenerate = true;
    report.log_loss =
        -(rate * std::log(rate) + (1.0 - rate) * std::log1p(-rate));
    return {std::move(model), report};
  }

  return kind == ModelKind::kGlm ? fit_glm(rows, options, report)
                                 : fit_binned(rows, options, report);
}

double adjusted_mean_rate(const BaselineModel& model,
                          std::span<const LabeledRow> post_rows) {
  if (post_rows.empty()) {
    throw Error("adjusted_mean_rate: empty cohort");
  }
  return glm_kernel::mean_prediction_parallel(model, post_rows);
}

namespace {

using nlohmann::json;

json feature_spec_json() {
  return json::array({json{{"name", "age_days"}, {"transform", "log1p"}},
                      json{{"name", "activity"}, {"transform", "log1p"}},
                      json{{"name", "promo_intensity"}, {"transform", "identity"}}});
}

json report_to_json(const TrainingReport& r) {
  return json{{"n_rows", r.n_rows},
              {"log_loss", r.log_loss},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"degenerate", r.degenerate},
              {"min_age_days", r.min_age_days},
              {"age_extrapolation", r.age_extrapolation}};
}

TrainingReport report_from_json(const json& j) {
  TrainingReport r;
  r.n_rows = j.at("n_rows").get<size_t>();
  r.log_loss = j.at("log_loss").get<double>();
  r.iterations = j.at("iterations").get<int>();
  r.converged = j.at("converged").get<bool>();
  r.degenerate = j.at("degenerate").get<bool>();
  r.min_age_days = j.at("min_age_days").get<int>();
  r.age_extrapolation = j.at("age_extrapolation").get<bool>();
  return r;
}

}  // namespace

std::string model_to_json(const BaselineModel& model,
                          const TrainingReport& report) {
  json j;
  j["kind"] = to_string(model.kind);
  j["feature_spec"] = feature_spec_json();
  if (model.kind == ModelKind::kGlm) {
    j["coefficients"] = {{"intercept", model.coef[0]},
                         {"weights", {model.coef[1], model.coef[2], model.coef[3]}}};
  } else {
    j["bins"] = {{"age_edges", model.bins.age_edges},
                 {"activity_edges", model.bins.activity_edges},
                 {"promo_edges", model.bins.promo_edges}};
    j["cells"] = {{"rates", model.cell_rate}, {"counts", model.cell_count}};
    j["global_rate"] = model.global_rate;
  }
  j["training"] = report_to_json(report);
  return j.dump(2) + "\n";
}

std::pair<BaselineModel, TrainingReport> model_from_json(
    const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what());
  }
  BaselineModel model;
  TrainingReport report;
  try {
    model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    if (model.kind == ModelKind::kGlm) {
      const auto& c = j.at("coefficients");
      model.coef[0] = c.at("intercept").get<double>();
      auto w = c.at("weights").get<std::vector<double>>();
      if (w.size() != 3) throw ParseError("model json: expected 3 weights");
      model.coef[1] = w[0];
      model.coef[2] = w[1];
      model.coef[3] = w[2];
    } else {
      const auto& b = j.at("bins");
      model.bins.age_edges = b.at("age_edges").get<std::vector<double>>();
      model.bins.activity_edges =
          b.at("activity_edges").get<std::vector<double>>();
      model.bins.promo_edges = b.at("promo_edges").get<std::vector<double>>();
      model.cell_rate = j.at("cells").at("rates").get<std::vector<double>>();
      model.cell_count = j.at("cells").at("counts").get<std::vector<int64_t>>();
      model.global_rate = j.at("global_rate").get<double>();
      CellIndex idx(model.bins);
      if (model.cell_rate.size() != idx.total() ||
          model.cell_count.size() != idx.total()) {
        throw ParseError("model json: cell grid size mismatch");
      }
    }
    report = report_from_json(j.at("training"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("model json: ") + e.what());
  }
  return {std::move(model), report};
}

void save_model(const BaselineModel& model, const TrainingReport& report,
                const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << model_to_json(model, report);
}

std::pair<BaselineModel, TrainingReport> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace aim

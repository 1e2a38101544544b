// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aim/baseline_model.hpp"
#include "aim/estimator.hpp"
#include "aim/records.hpp"

namespace aim {

// One candidate edge: the subscriber consumed this content upon signing up.
struct CandidatePair {
  std::string subscriber_id;
  std::string content_id;
  double affinity = 0.0;  // 1 - p_hat: ranking score for being incremental
  int order_rank = 1;     // consumption order within the subscriber's day
};

// The assignment problem for one (signup day, group) cell. Quotas are the
// rounded daily incremental estimates; candidates never span days, so cells
// are independent.
struct AttributionInstance {
  Date date;
  std::string group;
  std::vector<CandidatePair> candidates;  // sorted by (subscriber, content)
  std::map<std::string, int64_t> quotas;  // per content

  void validate() const;  // quota feasibility + affinity bounds
  size_t n_subscribers() const;
};

struct Assignment {
  std::vector<std::pair<std::string, std::string>> assigned;  // sorted pairs
  std::vector<std::string> multi_assigned;  // subscribers with >= 2 contents
  double objective = 0.0;      // sum(y) - lambda * sum(affinity * x)
  double mean_affinity = 0.0;  // over assigned pairs; 0 when none
  double multi_rate = 0.0;     // multi / distinct assigned subscribers
  double lambda = 0.0;
};

struct SolveOptions {
  int64_t node_budget = 200000;
};

struct SolveStats {
  int64_t nodes = 0;
  int64_t lp_iterations = 0;
  double root_bound = 0.0;
  double best_bound = 0.0;
  bool optimal = true;
  double gap = 0.0;
  // max over accepted incumbents of (node LP bound - incumbent objective);
  // a sound search keeps this below 1e-9.
  double max_bound_violation = 0.0;
};

struct ParetoPoint {
  double lambda = 0.0;
  double multi_rate = 0.0;
  double mean_affinity = 0.0;
  int64_t multi_count = 0;
};

// Independent top-quota-by-affinity selection per content, ties broken by
// subscriber_id ascending. Ignores cross-content collisions. `lambda` only
// prices the reported objective.
Assignment rank_greedy(const AttributionInstance& instance,
                       double lambda = 0.0);

// Global optimum of the multi-attribution program by branch-and-bound over
// the LP relaxation. Deterministic: most-fractional branching with
// lexicographic ties, best-bound node order with FIFO ties. Throws
// InfeasibleError when a quota exceeds its candidate count.
Assignment solve_exact(const AttributionInstance& instance, double lambda,
                       const SolveOptions& options = {},
                       SolveStats* stats = nullptr);

// Exhaustive oracle: enumerates per-content candidate combinations.
// Requires at most 25 candidate pairs; returns the lexicographically
// smallest optimal assignment.
Assignment brute_force(const AttributionInstance& instance, double lambda);

// Multiplies each affinity by gamma^(order_rank - 1): contents consumed
// sooner after signup keep more of their score.
AttributionInstance apply_order_decay(const AttributionInstance& instance,
                                      double gamma);

// Per-(day, group) instances from solved impact series. Quotas round
// half-up, capped at the candidate count.
std::vector<AttributionInstance> build_instances(
    const Dataset& ds, const std::vector<ContentLaunch>& launches,
    const std::vector<LaunchImpactSeries>& series, const BaselineModel& model);

// Solves each instance per lambda (exact solver, greedy warm start) and
// aggregates the trade-off curve. Instances own disjoint subscriber sets.
std::vector<ParetoPoint> pareto_sweep(
    const std::vector<AttributionInstance>& instances,
    const std::vector<double>& lambda_grid, const SolveOptions& options = {});

// attribution.csv: subscriber_id,content_id,date,group,affinity,multi_assigned
void write_attribution_csv(
    const std::vector<std::pair<const AttributionInstance*, const Assignment*>>&
        solved,
    const std::string& path);

// pareto.csv: lambda,multi_rate,mean_affinity
void write_pareto_csv(const std::vector<ParetoPoint>& points,
                      const std::string& path);

// Throws if quota equality or y-consistency is violated; used by tests and
// asserted after every solve.
void check_assignment(const AttributionInstance& instance,
                      const Assignment& assignment);

}  // namespace aim

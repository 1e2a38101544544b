// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include "aim/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aim/error.hpp"

namespace aim::lp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kFeasTol = 1e-7;

enum class VarState : uint8_t { kAtLower, kAtUpper, kBasic };

struct Tableau {
  int m = 0;        // rows
  int n_total = 0;  // structurals + slacks + artificials
  std::vector<double> tab;    // m x n_total, current B^-1 A
  std::vector<double> basic_val;
  std::vector<int> basis;     // column basic in each row
  std::vector<VarState> state;
  std::vector<double> lb, ub, val;  // val meaningful for nonbasic columns
  std::vector<double> reduced;      // reduced costs for the active phase
  int64_t iterations = 0;

  double* row(int i) { return tab.data() + static_cast<size_t>(i) * n_total; }
  const double* row(int i) const {
    return tab.data() + static_cast<size_t>(i) * n_total;
  }
};

// Rebuilds reduced costs d = c - c_B B^-1 A for the given phase costs.
void price_all(Tableau& t, const std::vector<double>& cost) {
  t.reduced = cost;
  for (int i = 0; i < t.m; ++i) {
    double cb = cost[static_cast<size_t>(t.basis[i])];
    if (cb == 0.0) continue;
    const double* r = t.row(i);
    for (int j = 0; j < t.n_total; ++j) t.reduced[j] -= cb * r[j];
  }
}

// One simplex phase minimizing `cost`. Returns false on iteration limit.
bool run_phase(Tableau& t, const std::vector<double>& cost,
               int64_t iter_limit) {
  price_all(t, cost);
  int64_t stall_switch = iter_limit / 2;  // switch to Bland past this
  for (int64_t it = 0; it < iter_limit; ++it) {
    ++t.iterations;
    bool bland = it >= stall_switch;

    // Pricing.
    int enter = -1;
    double best = kCostTol;
    for (int j = 0; j < t.n_total; ++j) {
      if (t.state[j] == VarState::kBasic) continue;
      if (t.ub[j] - t.lb[j] <= kPivotTol) continue;  // fixed
      double d = t.reduced[j];
      double viol = t.state[j] == VarState::kAtLower ? -d : d;
      if (viol > best) {
        enter = j;
        if (bland) break;
        best = viol;
      }
    }
    if (enter < 0) return true;  // optimal for this phase

    double dir = t.state[enter] == VarState::kAtLower ? 1.0 : -1.0;

    // Ratio test. Movement t >= 0 of the entering variable changes basic i
    // by -dir * tab[i][enter] * t.
    double limit = t.ub[enter] - t.lb[enter];  // bound flip distance
    int leave_row = -1;
    bool leave_at_upper = false;
    for (int i = 0; i < t.m; ++i) {
      double a = dir * t.row(i)[enter];
      if (a > kPivotTol) {
        int b = t.basis[i];
        double room = t.basic_val[i] - t.lb[b];
        double ratio = room / a;
        if (ratio < limit) {
          limit = std::max(ratio, 0.0);
          leave_row = i;
          leave_at_upper = false;
        }
      } else if (a < -kPivotTol) {
        int b = t.basis[i];
        if (t.ub[b] >= kInfinity) continue;
        double room = t.ub[b] - t.basic_val[i];
        double ratio = room / (-a);
        if (ratio < limit) {
          limit = std::max(ratio, 0.0);
          leave_row = i;
          leave_at_upper = true;
        }
      }
    }

    if (limit >= kInfinity) return false;  // unbounded direction

    // Apply movement to basic values.
    if (limit > 0) {
      for (int i = 0; i < t.m; ++i) {
        double a = dir * t.row(i)[enter];
        if (a != 0.0) t.basic_val[i] -= a * limit;
      }
    }

    if (leave_row < 0) {
      // Bound flip: entering moves to its other bound, basis unchanged.
      t.state[enter] = t.state[enter] == VarState::kAtLower
                           ? VarState::kAtUpper
                           : VarState::kAtLower;
      t.val[enter] =
          t.state[enter] == VarState::kAtLower ? t.lb[enter] : t.ub[enter];
      continue;
    }

    // Pivot: entering becomes basic in leave_row.
    int leave = t.basis[leave_row];
    double enter_val =
        (dir > 0 ? t.lb[enter] : t.ub[enter]) + dir * limit;

    double* pr = t.row(leave_row);
    double piv = pr[enter];
    if (std::abs(piv) <= kPivotTol) {
      throw Error("lp: numerically singular pivot");
    }
    double inv = 1.0 / piv;
    for (int j = 0; j < t.n_total; ++j) pr[j] *= inv;
    pr[enter] = 1.0;  // exact

    for (int i = 0; i < t.m; ++i) {
      if (i == leave_row) continue;
      double f = t.row(i)[enter];
      if (f == 0.0) continue;
      double* ri = t.row(i);
      for (int j = 0; j < t.n_total; ++j) ri[j] -= f * pr[j];
      ri[enter] = 0.0;
    }
    {
      double f = t.reduced[enter];
      if (f != 0.0) {
        for (int j = 0; j < t.n_total; ++j) t.reduced[j] -= f * pr[j];
        t.reduced[enter] = 0.0;
      }
    }

    t.basis[leave_row] = enter;
    t.state[enter] = VarState::kBasic;
    t.basic_val[leave_row] = enter_val;
    t.state[leave] =
        leave_at_upper ? VarState::kAtUpper : VarState::kAtLower;
    t.val[leave] = leave_at_upper ? t.ub[leave] : t.lb[leave];
  }
  return false;
}

}  // namespace

int Problem::add_row(std::vector<double> coeffs, Sense sense, double b) {
  rows.push_back(std::move(coeffs));
  senses.push_back(sense);
  rhs.push_back(b);
  return static_cast<int>(rows.size()) - 1;
}

Solution solve(const Problem& problem) {
  const int n = problem.n_vars;
  const int m = static_cast<int>(problem.rows.size());

  // Normalize: >= rows negated to <=; equalities kept.
  // Columns: [structurals][slacks for <= rows][artificials as needed].
  std::vector<int> slack_col(m, -1);
  int n_slacks = 0;
  for (int i = 0; i < m; ++i) {
    if (problem.senses[i] != Sense::kEq) slack_col[i] = n_slacks++;
  }

  Tableau t;
  t.m = m;

  // First pass: count artificials, so column layout is known up front.
  // Structurals start at lower bound (bounds are finite below by contract).
  std::vector<double> init_residual(m);
  for (int i = 0; i < m; ++i) {
    double sign = problem.senses[i] == Sense::kGe ? -1.0 : 1.0;
    double r = sign * problem.rhs[i];
    for (int j = 0; j < n; ++j) {
      r -= sign * problem.rows[i][j] * problem.lower[j];
    }
    init_residual[i] = r;
  }
  std::vector<int> art_col(m, -1);
  int n_arts = 0;
  for (int i = 0; i < m; ++i) {
    bool feasible_slack =
        problem.senses[i] != Sense::kEq && init_residual[i] >= 0.0;
    if (!feasible_slack) art_col[i] = n_arts++;
  }

  t.n_total = n + n_slacks + n_arts;
  t.tab.assign(static_cast<size_t>(m) * t.n_total, 0.0);
  t.lb.assign(t.n_total, 0.0);
  t.ub.assign(t.n_total, kInfinity);
  t.val.assign(t.n_total, 0.0);
  t.state.assign(t.n_total, VarState::kAtLower);
  t.basis.assign(m, -1);
  t.basic_val.assign(m, 0.0);

  for (int j = 0; j < n; ++j) {
    t.lb[j] = problem.lower[j];
    t.ub[j] = problem.upper[j];
    t.val[j] = t.lb[j];
    if (!(t.lb[j] > -kInfinity)) throw Error("lp: lower bound must be finite");
  }

  for (int i = 0; i < m; ++i) {
    double sign = problem.senses[i] == Sense::kGe ? -1.0 : 1.0;
    double* r = t.row(i);
    for (int j = 0; j < n; ++j) r[j] = sign * problem.rows[i][j];
    if (slack_col[i] >= 0) r[n + slack_col[i]] = 1.0;
    if (art_col[i] >= 0) {
      // Negate the row when the residual is negative so the basic
      // (artificial) column carries +1: the tableau must stay B^-1 A.
      if (init_residual[i] < 0.0) {
        for (int j = 0; j < t.n_total; ++j) r[j] = -r[j];
      }
      int col = n + n_slacks + art_col[i];
      r[col] = 1.0;
      t.basis[i] = col;
      t.basic_val[i] = std::abs(init_residual[i]);
      t.state[col] = VarState::kBasic;
    } else {
      int col = n + slack_col[i];
      t.basis[i] = col;
      t.basic_val[i] = init_residual[i];
      t.state[col] = VarState::kBasic;
    }
  }

  Solution sol;
  const int64_t iter_limit =
      200LL * (m + t.n_total) + 20000;

  if (n_arts > 0) {
    std::vector<double> phase1(t.n_total, 0.0);
    for (int i = 0; i < m; ++i) {
      if (art_col[i] >= 0) phase1[static_cast<size_t>(n + n_slacks + art_col[i])] = 1.0;
    }
    if (!run_phase(t, phase1, iter_limit)) {
      sol.status = Status::kIterLimit;
      sol.iterations = t.iterations;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i) {
      int b = t.basis[i];
      if (b >= n + n_slacks) infeas += t.basic_val[i];
    }
    for (int j = n + n_slacks; j < t.n_total; ++j) {
      if (t.state[j] != VarState::kBasic) infeas += t.val[j];
    }
    if (infeas > kFeasTol) {
      sol.status = Status::kInfeasible;
      sol.iterations = t.iterations;
      return sol;
    }
    // Freeze artificials at zero for phase 2.
    for (int j = n + n_slacks; j < t.n_total; ++j) {
      t.lb[j] = 0.0;
      t.ub[j] = 0.0;
      if (t.state[j] != VarState::kBasic) t.val[j] = 0.0;
    }
  }

  std::vector<double> phase2(t.n_total, 0.0);
  for (int j = 0; j < n; ++j) phase2[j] = problem.objective[j];
  if (!run_phase(t, phase2, iter_limit)) {
    // Distinguish unbounded from stalling: with all structurals bounded this
    // only fires for unbounded slack directions, which our models never
    // produce; report iteration limit either way.
    sol.status = Status::kIterLimit;
    sol.iterations = t.iterations;
    return sol;
  }

  sol.x.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    sol.x[j] = t.state[j] == VarState::kBasic ? 0.0 : t.val[j];
  }
  for (int i = 0; i < m; ++i) {
    if (t.basis[i] < n) sol.x[static_cast<size_t>(t.basis[i])] = t.basic_val[i];
  }
  for (int j = 0; j < n; ++j) {
    sol.x[j] = std::clamp(sol.x[j], problem.lower[j], problem.upper[j]);
  }
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += problem.objective[j] * sol.x[j];
  sol.status = Status::kOptimal;
  sol.iterations = t.iterations;
  return sol;
}

}  // namespace aim::lp

// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

namespace aim::lp {

enum class Sense { kLe, kGe, kEq };

// min c.x  s.t.  rows (<=, >=, =) rhs,  lower <= x <= upper.
// Dense row storage; sized for a few hundred rows/columns.
struct Problem {
  int n_vars = 0;
  std::vector<double> objective;
  std::vector<double> lower;
  std::vector<double> upper;  // kInfinity for unbounded above
  std::vector<std::vector<double>> rows;
  std::vector<Sense> senses;
  std::vector<double> rhs;

  int add_row(std::vector<double> coeffs, Sense sense, double b);
};

inline constexpr double kInfinity = 1e30;

enum class Status { kOptimal, kInfeasible, kIterLimit, kUnbounded };

struct Solution {
  Status status = Status::kIterLimit;
  double objective = 0.0;
  std::vector<double> x;
  int64_t iterations = 0;
};

// Bounded-variable primal simplex on a dense tableau, two-phase start.
// Fully deterministic: Dantzig pricing with index tie-breaks, Bland's rule
// fallback against cycling.
Solution solve(const Problem& problem);

}  // namespace aim::lp

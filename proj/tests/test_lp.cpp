// SPDX-FileCopyrightText: Copyright (c) 2026 AIM contributors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "aim/lp.hpp"

using namespace aim::lp;

namespace {

Problem make(int n, std::vector<double> obj) {
  Problem p;
  p.n_vars = n;
  p.objective = std::move(obj);
  p.lower.assign(n, 0.0);
  p.upper.assign(n, 1.0);
  return p;
}

}  // namespace

TEST_CASE("simple box maximum") {
  Problem p = make(2, {-1.0, -1.0});
  p.add_row({1.0, 1.0}, Sense::kLe, 1.0);
  auto sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.objective == doctest::Approx(-1.0));
  CHECK(sol.x[0] + sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("equality row forces the level set") {
  Problem p = make(2, {1.0, 0.0});
  p.add_row({1.0, 1.0}, Sense::kEq, 1.5);
  auto sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(0.5));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("greater-equal rows") {
  Problem p = make(1, {1.0});
  p.add_row({1.0}, Sense::kGe, 0.3);
  auto sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(0.3));
}

TEST_CASE("infeasible equality is detected") {
  Problem p = make(2, {0.0, 0.0});
  p.add_row({1.0, 1.0}, Sense::kEq, 3.0);
  auto sol = solve(p);
  CHECK(sol.status == Status::kInfeasible);
}

TEST_CASE("conflicting inequalities are infeasible") {
  Problem p = make(1, {0.0});
  p.add_row({1.0}, Sense::kGe, 0.8);
  p.add_row({1.0}, Sense::kLe, 0.2);
  auto sol = solve(p);
  CHECK(sol.status == Status::kInfeasible);
}

TEST_CASE("bound flips: optimum in the interior of no constraint") {
  Problem p = make(2, {-2.0, -1.0});
  p.add_row({1.0, -1.0}, Sense::kGe, 0.0);  // x >= y
  auto sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[1] == doctest::Approx(1.0));
}

TEST_CASE("transportation-style instance") {
  // Two supplies (1 each), three demands via shared pool:
  // min cost matching with quota sum = 2.
  // Variables x0..x5 = edges (s0->d0..d2, s1->d0..d2).
  Problem p = make(6, {1.0, 2.0, 3.0, 2.5, 0.5, 1.5});
  p.add_row({1, 1, 1, 0, 0, 0}, Sense::kLe, 1.0);  // supply s0
  p.add_row({0, 0, 0, 1, 1, 1}, Sense::kLe, 1.0);  // supply s1
  p.add_row({1, 0, 0, 1, 0, 0}, Sense::kLe, 1.0);  // demand caps
  p.add_row({0, 1, 0, 0, 1, 0}, Sense::kLe, 1.0);
  p.add_row({0, 0, 1, 0, 0, 1}, Sense::kLe, 1.0);
  p.add_row({1, 1, 1, 1, 1, 1}, Sense::kEq, 2.0);  // ship two units
  auto sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  // Cheapest pair: x0 (1.0) + x4 (0.5).
  CHECK(sol.objective == doctest::Approx(1.5));
  CHECK(sol.x[0] == doctest::Approx(1.0));
  CHECK(sol.x[4] == doctest::Approx(1.0));
}

TEST_CASE("objective matches a hand-computed vertex on a dense instance") {
  // min -3x0 - 2x1 - 4x2 st x0+x1+x2 <= 2, x0 - x2 >= -0.5, x1 + x2 = 1.2
  Problem p = make(3, {-3.0, -2.0, -4.0});
  p.add_row({1, 1, 1}, Sense::kLe, 2.0);
  p.add_row({1, 0, -1}, Sense::kGe, -0.5);
  p.add_row({0, 1, 1}, Sense::kEq, 1.2);
  auto sol = solve(p);
  REQUIRE(sol.status == Status::kOptimal);
  // x2 limited by x0 >= x2 - 0.5 and x0+x1+x2 <= 2: best is x2 = 1,
  // x1 = 0.2, x0 = 0.8 -> obj = -2.4 - 0.4 - 4 = -6.8.
  CHECK(sol.objective == doctest::Approx(-6.8));
}

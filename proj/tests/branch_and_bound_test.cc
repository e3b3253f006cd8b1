// Copyright 2026 The gepec Authors.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gepec/branch_and_bound.hpp"

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gepec/simplex.hpp"

namespace gepec::lp {
namespace {

using R = Relation;

// max sum v_i h_i s.t. sum w_i h_i <= cap, as a minimization.
MilpModel knapsack(const std::vector<double>& value,
                   const std::vector<double>& weight, double cap) {
  MilpModel m;
  std::vector<Term> row;
  for (size_t i = 0; i < value.size(); ++i) {
    const int h = m.add_binary("h" + std::to_string(i));
    m.lp.set_cost(h, -value[i]);
    row.push_back({h, weight[i]});
  }
  m.lp.add_constraint("cap", row, R::kLessEqual, cap);
  return m;
}

double enumerate_knapsack(const std::vector<double>& value,
                          const std::vector<double>& weight, double cap) {
  const int n = static_cast<int>(value.size());
  double best = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    double v = 0.0, w = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1 << i)) {
        v += value[i];
        w += weight[i];
      }
    }
    if (w <= cap + 1e-12) best = std::max(best, v);
  }
  return -best;
}

TEST(BranchAndBoundTest, ThreeItemKnapsackMatchesEnumeration) {
  const std::vector<double> value = {10, 13, 7}, weight = {4, 6, 3};
  const double cap = 9;
  const MilpSolution sol = solve_milp(knapsack(value, weight, cap), 0.0);
  ASSERT_EQ(sol.status, MilpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, enumerate_knapsack(value, weight, cap), 1e-9);
  EXPECT_NEAR(sol.objective, -20.0, 1e-9);
}

// With a positive gap and no start there is no incumbent to measure the gap
// against; the search must still run.
TEST(BranchAndBoundTest, PositiveGapWithoutStartSearches) {
  const std::vector<double> value = {10, 13, 7}, weight = {4, 6, 3};
  const MilpSolution sol = solve_milp(knapsack(value, weight, 9), 1e-3);
  ASSERT_EQ(sol.status, MilpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -20.0, 1e-9);
  EXPECT_GE(sol.nodes, 1);
}

TEST(BranchAndBoundTest, NoBinariesReducesToLp) {
  MilpModel m;
  const int x = m.lp.add_variable("x", 0.0, 20.0, 4.0);
  const int y = m.lp.add_variable("y", 0.0, kInf, 6.0);
  m.lp.add_constraint("d", {{x, 1.0}, {y, 1.0}}, R::kGreaterEqual, 40.0);
  const LpSolution lp = solve_lp(m.lp);
  const MilpSolution milp = solve_milp(m, 1e-3);
  ASSERT_EQ(milp.status, MilpStatus::kOptimal);
  EXPECT_EQ(milp.values, lp.primal);
  EXPECT_EQ(milp.objective, lp.objective);
}

TEST(BranchAndBoundTest, ContradictoryBinaryRowsAreInfeasible) {
  MilpModel m;
  const int h = m.add_binary("h");
  m.lp.add_constraint("up", {{h, 1.0}}, R::kLessEqual, 0.0);
  m.lp.add_constraint("down", {{h, 1.0}}, R::kGreaterEqual, 1.0);
  EXPECT_EQ(solve_milp(m, 1e-3).status, MilpStatus::kInfeasible);
}

TEST(BranchAndBoundTest, IntegerInfeasibleWithFeasibleRelaxation) {
  MilpModel m;
  const int a = m.add_binary("a");
  const int b = m.add_binary("b");
  m.lp.add_constraint("half", {{a, 2.0}, {b, 2.0}}, R::kEqual, 1.0);
  EXPECT_EQ(solve_milp(m, 0.0).status, MilpStatus::kInfeasible);
}

TEST(BranchAndBoundTest, BadGapRejected) {
  MilpModel m = knapsack({1}, {1}, 1);
  EXPECT_THROW(solve_milp(m, 1.5), std::invalid_argument);
  EXPECT_THROW(solve_milp(m, -0.1), std::invalid_argument);
}

TEST(BranchAndBoundTest, NodeLimitIsReported) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  std::vector<double> v, w;
  for (int i = 0; i < 14; ++i) {
    v.push_back(u(rng));
    w.push_back(u(rng));
  }
  MilpOptions opts;
  opts.gap = 0.0;
  opts.node_limit = 3;
  const MilpSolution sol = solve_milp(knapsack(v, w, 25.0), opts);
  EXPECT_EQ(sol.status, MilpStatus::kNodeLimit);
}

TEST(BranchAndBoundTest, StartSeedsIncumbent) {
  const std::vector<double> value = {10, 13, 7}, weight = {4, 6, 3};
  MilpOptions opts;
  opts.gap = 0.0;
  opts.starts = {{1.0, 0.0, 1.0}};
  const MilpSolution sol = solve_milp(knapsack(value, weight, 9), opts);
  ASSERT_EQ(sol.status, MilpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -20.0, 1e-9);
}

class RandomKnapsackTest
    : public ::testing::TestWithParam<std::tuple<int, NodeSelection>> {};

TEST_P(RandomKnapsackTest, OptimalAndBoundMonotone) {
  const auto [seed, selection] = GetParam();
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(1.0, 10.0);
  std::vector<double> v, w;
  for (int i = 0; i < 10; ++i) {
    v.push_back(u(rng));
    w.push_back(u(rng));
  }
  const double cap = 20.0;
  MilpOptions opts;
  opts.gap = 0.0;
  opts.node_selection = selection;
  const MilpSolution sol = solve_milp(knapsack(v, w, cap), opts);
  ASSERT_EQ(sol.status, MilpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, enumerate_knapsack(v, w, cap), 1e-8);
  for (size_t k = 1; k < sol.bound_trace.size(); ++k) {
    EXPECT_GE(sol.bound_trace[k], sol.bound_trace[k - 1] - 1e-9);
  }
  EXPECT_LE(sol.bound, sol.objective + 1e-9);
}

INSTANTIATE_TEST_SUITE_P(
    Seeds, RandomKnapsackTest,
    ::testing::Combine(::testing::Range(1, 16),
                       ::testing::Values(NodeSelection::kBestBound,
                                         NodeSelection::kBestBoundPlunge)));

}  // namespace
}  // namespace gepec::lp

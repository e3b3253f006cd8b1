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

#include "gepec/simplex.hpp"

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "gepec/linear_program.hpp"
#include "lp_oracles.hpp"

namespace gepec::lp {
namespace {

using R = Relation;

TEST(SimplexTest, SingleVariableLowerBoundRow) {
  LinearProgram lp;
  const int x = lp.add_variable("x", -kInf, kInf, 1.0);
  lp.add_constraint("lo", {{x, 1.0}}, R::kGreaterEqual, 3.0);
  lp.add_constraint("hi", {{x, 1.0}}, R::kLessEqual, 10.0);
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.primal[x], 3.0, 1e-12);
  EXPECT_NEAR(sol.objective, 3.0, 1e-12);
  const std::vector<std::string> names = {"lo", "hi"};
  auto duals = extract_duals(lp, sol, names);
  EXPECT_NEAR(duals["lo"], 1.0, 1e-12);
  EXPECT_NEAR(duals["hi"], 0.0, 1e-12);
}

TEST(SimplexTest, UnknownDualNameThrows) {
  LinearProgram lp;
  const int x = lp.add_variable("x", 0.0, 1.0, 1.0);
  lp.add_constraint("c", {{x, 1.0}}, R::kGreaterEqual, 0.5);
  const LpSolution sol = solve_lp(lp);
  const std::vector<std::string> names = {"nope"};
  EXPECT_THROW(extract_duals(lp, sol, names), ModelError);
}

TEST(SimplexTest, BalanceDualIsMarginalCost) {
  // One bus, two units with costs 10 and 30, load 50; the cheap one is
  // marginal.
  LinearProgram lp;
  const int p1 = lp.add_variable("p1", 0.0, 100.0, 10.0);
  const int p2 = lp.add_variable("p2", 0.0, 100.0, 30.0);
  lp.add_constraint("balance", {{p1, 1.0}, {p2, 1.0}}, R::kEqual, 50.0);
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.row_dual[0], 10.0, 1e-9);
  EXPECT_NEAR(sol.reduced_cost[p2], 20.0, 1e-9);
}

LinearProgram transport() {
  // Two plants (supply 30, 25) and one market with demand 40; shipment
  // costs 4 and 6, with a 20-unit cap on the first route.
  LinearProgram lp;
  const int a = lp.add_variable("a", 0.0, 20.0, 4.0);
  const int b = lp.add_variable("b", 0.0, kInf, 6.0);
  lp.add_constraint("s1", {{a, 1.0}}, R::kLessEqual, 30.0);
  lp.add_constraint("s2", {{b, 1.0}}, R::kLessEqual, 25.0);
  lp.add_constraint("d", {{a, 1.0}, {b, 1.0}}, R::kGreaterEqual, 40.0);
  return lp;
}

TEST(SimplexTest, TransportMatchesVertexEnumeration) {
  const LinearProgram lp = transport();
  const auto oracle = testing::enumerate_vertices(lp);
  ASSERT_TRUE(oracle.has_value());
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, oracle->objective, 1e-9);
  EXPECT_NEAR(sol.objective, 200.0, 1e-9);
  EXPECT_NEAR(sol.row_dual[2], 6.0, 1e-9);
  EXPECT_NEAR(sol.reduced_cost[0], -2.0, 1e-9);
}

TEST(SimplexTest, DegenerateTieIsDeterministic) {
  // Two identical cheapest columns; either basis is optimal.
  auto build = [] {
    LinearProgram lp;
    const int x = lp.add_variable("x", 0.0, 10.0, 1.0);
    const int y = lp.add_variable("y", 0.0, 10.0, 1.0);
    lp.add_constraint("d", {{x, 1.0}, {y, 1.0}}, R::kGreaterEqual, 5.0);
    lp.add_constraint("z", {{x, 1.0}, {y, -1.0}}, R::kLessEqual, 5.0);
    return lp;
  };
  const LpSolution first = solve_lp(build());
  for (int run = 0; run < 5; ++run) {
    const LpSolution again = solve_lp(build());
    EXPECT_EQ(again.primal, first.primal);
    EXPECT_EQ(again.row_dual, first.row_dual);
  }
  EXPECT_NEAR(first.objective, 5.0, 1e-12);
}

TEST(SimplexTest, InfeasibleAndUnbounded) {
  LinearProgram bad;
  const int x = bad.add_variable("x", 0.0, 1.0, 1.0);
  bad.add_constraint("c", {{x, 1.0}}, R::kGreaterEqual, 2.0);
  EXPECT_EQ(solve_lp(bad).status, LpStatus::kInfeasible);

  LinearProgram open;
  const int y = open.add_variable("y", 0.0, kInf, -1.0);
  const int z = open.add_variable("z", 0.0, kInf, 0.0);
  open.add_constraint("c", {{y, 1.0}, {z, -1.0}}, R::kLessEqual, 1.0);
  EXPECT_EQ(solve_lp(open).status, LpStatus::kUnbounded);
}

TEST(SimplexTest, BealeCyclingExampleTerminates) {
  // Classic example on which textbook Dantzig pricing cycles.
  LinearProgram lp;
  const int x1 = lp.add_variable("x1", 0.0, kInf, -0.75);
  const int x2 = lp.add_variable("x2", 0.0, kInf, 150.0);
  const int x3 = lp.add_variable("x3", 0.0, kInf, -0.02);
  const int x4 = lp.add_variable("x4", 0.0, kInf, 6.0);
  lp.add_constraint("r1", {{x1, 0.25}, {x2, -60.0}, {x3, -0.04}, {x4, 9.0}},
                    R::kLessEqual, 0.0);
  lp.add_constraint("r2", {{x1, 0.5}, {x2, -90.0}, {x3, -0.02}, {x4, 3.0}},
                    R::kLessEqual, 0.0);
  lp.add_constraint("r3", {{x3, 1.0}}, R::kLessEqual, 1.0);
  SimplexOptions opts;
  opts.scale = false;
  const LpSolution sol = solve_lp(lp, opts);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -0.05, 1e-9);
}

TEST(SimplexTest, WarmStartAfterBoundChangeMatchesColdSolve) {
  const LinearProgram lp = transport();
  DenseSimplex warm(lp);
  ASSERT_EQ(warm.solve(), LpStatus::kOptimal);
  warm.set_bounds(0, 0.0, 18.0);
  ASSERT_EQ(warm.solve(), LpStatus::kOptimal);

  LinearProgram cold = transport();
  cold.set_bounds(0, 0.0, 18.0);
  const LpSolution ref = solve_lp(cold);
  EXPECT_NEAR(warm.solution().objective, ref.objective, 1e-9);
  EXPECT_NEAR(ref.objective, 18 * 4.0 + 22 * 6.0, 1e-9);

  // Tightening further makes the demand row unreachable.
  warm.set_bounds(0, 0.0, 12.0);
  EXPECT_EQ(warm.solve(), LpStatus::kInfeasible);
  warm.set_bounds(0, 0.0, 20.0);
  ASSERT_EQ(warm.solve(), LpStatus::kOptimal);
  EXPECT_NEAR(warm.solution().objective, 200.0, 1e-9);
}

// Random bounded LPs: the simplex optimum must agree with vertex enumeration
// and satisfy strong duality and complementary slackness.
class RandomLpTest : public ::testing::TestWithParam<int> {};

TEST_P(RandomLpTest, AgreesWithOracleAndDuality) {
  std::mt19937 rng(GetParam());
  std::uniform_real_distribution<double> coef(-5.0, 5.0);
  std::uniform_int_distribution<int> rel(0, 2);
  LinearProgram lp;
  const int n = 3;
  for (int j = 0; j < n; ++j) {
    lp.add_variable("x" + std::to_string(j), -4.0, 6.0, coef(rng));
  }
  // Rows through a known interior point keep the instance feasible.
  const std::vector<double> x0 = {0.5, -0.5, 1.0};
  for (int i = 0; i < 4; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < n; ++j) {
      const double a = coef(rng);
      terms.push_back({j, a});
      act += a * x0[j];
    }
    const int r = rel(rng);
    const R relation = r == 0 ? R::kLessEqual
                              : (r == 1 ? R::kGreaterEqual : R::kEqual);
    const double rhs = relation == R::kLessEqual
                           ? act + 1.0
                           : (relation == R::kGreaterEqual ? act - 1.0 : act);
    if (relation == R::kEqual && i > 1) continue;
    lp.add_constraint("r" + std::to_string(i), terms, relation, rhs);
  }
  const auto oracle = testing::enumerate_vertices(lp);
  ASSERT_TRUE(oracle.has_value());
  const LpSolution sol = solve_lp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, oracle->objective, 1e-7);
  EXPECT_NEAR(dual_objective(lp, sol), sol.objective, 1e-7);
  EXPECT_LT(primal_infeasibility(lp, sol.primal), 1e-9);
  EXPECT_LT(complementarity_residual(lp, sol), 1e-8);
  for (int i = 0; i < lp.num_constraints(); ++i) {
    if (lp.constraint(i).relation != R::kEqual) {
      EXPECT_GE(sol.row_dual[i], -1e-9);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomLpTest, ::testing::Range(1, 41));

}  // namespace
}  // namespace gepec::lp

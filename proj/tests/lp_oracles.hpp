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

// Brute-force reference solvers used only by the tests.

#ifndef GEPEC_TESTS_LP_ORACLES_HPP_
#define GEPEC_TESTS_LP_ORACLES_HPP_

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gepec/linear_program.hpp"

namespace gepec::testing {

struct VertexOptimum {
  double objective = 0.0;
  std::vector<double> x;
  int vertices = 0;
};

// Enumerates every choice of n active constraints (rows at equality plus
// finite bounds), keeps the feasible intersection points and returns the
// cheapest. Only meaningful for bounded LPs with a handful of variables.
inline std::optional<VertexOptimum> enumerate_vertices(
    const lp::LinearProgram& lp, double tol = 1e-8) {
  const int n = lp.num_variables();
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  std::vector<bool> must;  // equality rows are always active
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const lp::Constraint& c = lp.constraint(i);
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (const lp::Term& t : c.terms) a[t.var] += t.coef;
    rows.push_back(a);
    rhs.push_back(c.rhs);
    must.push_back(c.relation == lp::Relation::kEqual);
  }
  for (int j = 0; j < n; ++j) {
    const lp::Variable& v = lp.variable(j);
    for (double b : {v.lower, v.upper}) {
      if (!std::isfinite(b)) continue;
      Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
      a[j] = 1.0;
      rows.push_back(a);
      rhs.push_back(b);
      must.push_back(false);
    }
  }
  const int k = static_cast<int>(rows.size());
  std::optional<VertexOptimum> best;
  std::vector<int> pick(n);
  int count = 0;
  auto visit = [&]() {
    for (int i = 0; i < k; ++i) {
      if (!must[i]) continue;
      bool in = false;
      for (int p : pick) in = in || p == i;
      if (!in) return;
    }
    Eigen::MatrixXd a(n, n);
    Eigen::VectorXd b(n);
    for (int r = 0; r < n; ++r) {
      a.row(r) = rows[pick[r]].transpose();
      b[r] = rhs[pick[r]];
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < n) return;
    const Eigen::VectorXd x = lu.solve(b);
    std::vector<double> xs(x.data(), x.data() + n);
    if (lp::primal_infeasibility(lp, xs) > tol) return;
    ++count;
    const double obj = lp.objective_value(xs);
    if (!best || obj < best->objective - 1e-12) best = VertexOptimum{obj, xs};
  };
  // Lexicographic n-combinations of k.
  if (n > k) return std::nullopt;
  for (int i = 0; i < n; ++i) pick[i] = i;
  while (true) {
    visit();
    int i = n - 1;
    while (i >= 0 && pick[i] == k - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int r = i + 1; r < n; ++r) pick[r] = pick[r - 1] + 1;
  }
  if (best) best->vertices = count;
  return best;
}

}  // namespace gepec::testing

#endif  // GEPEC_TESTS_LP_ORACLES_HPP_

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

// Dense bounded-variable simplex over the computational form
//
//   min c'x   s.t.   A x - r = 0,   l <= x <= u,   l_r <= r <= u_r
//
// where every row owns one logical variable r_i whose bounds encode the row
// relation. The full tableau B^-1 [A -I] is kept in memory, which is the right
// trade-off for the few-hundred-row models this project produces, and is
// rebuilt from an LU factorization every `refactor_interval` pivots and
// before a solution is reported.
//
// Bounds may be changed between solves; the current basis is kept, so a
// re-solve after tightening bounds runs dual simplex iterations from a dual
// feasible basis (this is what branch-and-bound relies on).

#ifndef GEPEC_SIMPLEX_HPP_
#define GEPEC_SIMPLEX_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "gepec/linear_program.hpp"

namespace gepec::lp {

enum class PivotRule { kDantzig, kBland };

struct SimplexOptions {
  // Largest-coefficient pricing switches to Bland's rule for the rest of a
  // solve after this many degenerate pivots.
  PivotRule rule = PivotRule::kDantzig;
  int degenerate_pivot_limit = 50;
  double primal_tol = 1e-9;
  double dual_tol = 1e-9;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  // 0 picks a size-dependent limit.
  int max_iterations = 0;
  bool scale = true;
};

// Singular basis or an exhausted iteration budget.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class VarState : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree, kFixed };

struct Basis {
  std::vector<int> basic;        // column basic in each row
  std::vector<VarState> states;  // per column, structurals then logicals
};

class DenseSimplex {
 public:
  explicit DenseSimplex(const LinearProgram& lp, SimplexOptions options = {});

  // Bounds in the units of the original model.
  void set_bounds(int var, double lower, double upper);
  double lower(int var) const;
  double upper(int var) const;

  LpStatus solve();
  // Solution of the last solve() in original units.
  LpSolution solution() const;

  Basis basis() const { return {basic_, state_}; }
  void set_basis(const Basis& basis);

  int iterations() const { return total_iterations_; }

 private:
  using RowMajor =
      Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  double column_entry(int row, int col) const;
  void refactor();
  void recompute_basic_values();
  void pivot(int row, int col);
  void place_nonbasic(int col);

  bool primal_feasible() const;
  bool dual_feasible() const;
  double infeasibility(int col) const;

  enum class Step { kContinue, kOptimal, kInfeasible, kUnbounded };
  Step primal_iteration(bool phase_one);
  Step dual_iteration();
  void count_pivot(double step);

  const LinearProgram& lp_;
  SimplexOptions options_;
  int m_ = 0;
  int n_ = 0;
  int total_ = 0;

  Eigen::MatrixXd a_;  // scaled structural matrix
  Eigen::VectorXd row_scale_;
  Eigen::VectorXd col_scale_;
  Eigen::VectorXd lb_, ub_, cost_, x_, d_;
  RowMajor tableau_;
  std::vector<int> basic_;
  std::vector<VarState> state_;

  bool factored_ = false;
  bool values_dirty_ = true;
  bool bland_ = false;
  int degenerate_pivots_ = 0;
  int pivots_since_refactor_ = 0;
  int total_iterations_ = 0;
  LpStatus status_ = LpStatus::kInfeasible;
};

LpSolution solve_lp(const LinearProgram& lp,
                    const SimplexOptions& options = {});

}  // namespace gepec::lp

#endif  // GEPEC_SIMPLEX_HPP_

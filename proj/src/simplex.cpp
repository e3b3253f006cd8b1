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

#include <algorithm>
#include <cmath>
#include <limits>

namespace gepec::lp {
namespace {

// Nearest power of two, so scaling never perturbs mantissas.
double pow2_scale(double magnitude) {
  if (magnitude <= 0.0 || !std::isfinite(magnitude)) return 1.0;
  return std::ldexp(1.0, -static_cast<int>(std::lround(std::log2(magnitude))));
}

constexpr double kDegenerateStep = 1e-12;

}  // namespace

DenseSimplex::DenseSimplex(const LinearProgram& lp, SimplexOptions options)
    : lp_(lp), options_(options) {
  lp_.validate();
  m_ = lp.num_constraints();
  n_ = lp.num_variables();
  total_ = n_ + m_;

  a_ = Eigen::MatrixXd::Zero(m_, n_);
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : lp.constraint(i).terms) a_(i, t.var) += t.coef;
  }

  row_scale_ = Eigen::VectorXd::Ones(m_);
  col_scale_ = Eigen::VectorXd::Ones(n_);
  if (options_.scale) {
    for (int i = 0; i < m_; ++i) {
      row_scale_(i) = pow2_scale(a_.row(i).cwiseAbs().maxCoeff());
      a_.row(i) *= row_scale_(i);
    }
    for (int j = 0; j < n_; ++j) {
      if (m_ == 0) break;
      col_scale_(j) = pow2_scale(a_.col(j).cwiseAbs().maxCoeff());
      a_.col(j) *= col_scale_(j);
    }
  }

  lb_.resize(total_);
  ub_.resize(total_);
  cost_ = Eigen::VectorXd::Zero(total_);
  x_ = Eigen::VectorXd::Zero(total_);
  d_ = Eigen::VectorXd::Zero(total_);
  for (int j = 0; j < n_; ++j) {
    const Variable& v = lp.variable(j);
    lb_(j) = v.lower / col_scale_(j);
    ub_(j) = v.upper / col_scale_(j);
    cost_(j) = v.cost * col_scale_(j);
  }
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = lp.constraint(i);
    const double b = c.rhs * row_scale_(i);
    lb_(n_ + i) = c.relation == Relation::kLessEqual ? -kInf : b;
    ub_(n_ + i) = c.relation == Relation::kGreaterEqual ? kInf : b;
  }

  basic_.resize(m_);
  state_.assign(total_, VarState::kAtLower);
  for (int i = 0; i < m_; ++i) {
    basic_[i] = n_ + i;
    state_[n_ + i] = VarState::kBasic;
  }
  for (int j = 0; j < n_; ++j) place_nonbasic(j);
}

double DenseSimplex::column_entry(int row, int col) const {
  if (col < n_) return a_(row, col);
  return col - n_ == row ? -1.0 : 0.0;
}

void DenseSimplex::place_nonbasic(int col) {
  const double lo = lb_(col);
  const double up = ub_(col);
  VarState& s = state_[col];
  if (lo == up) {
    s = VarState::kFixed;
    x_(col) = lo;
  } else if (s == VarState::kAtUpper && std::isfinite(up)) {
    x_(col) = up;
  } else if (std::isfinite(lo)) {
    s = VarState::kAtLower;
    x_(col) = lo;
  } else if (std::isfinite(up)) {
    s = VarState::kAtUpper;
    x_(col) = up;
  } else {
    s = VarState::kFree;
    x_(col) = 0.0;
  }
}

void DenseSimplex::set_bounds(int var, double lower, double upper) {
  lb_(var) = lower / col_scale_(var);
  ub_(var) = upper / col_scale_(var);
  if (state_[var] != VarState::kBasic) {
    if (state_[var] == VarState::kFixed && lower != upper) {
      // Re-open on the side the reduced cost prefers.
      state_[var] = d_(var) < 0.0 ? VarState::kAtUpper : VarState::kAtLower;
    }
    place_nonbasic(var);
    values_dirty_ = true;
  }
}

double DenseSimplex::lower(int var) const {
  return lb_(var) * col_scale_(var);
}

double DenseSimplex::upper(int var) const {
  return ub_(var) * col_scale_(var);
}

void DenseSimplex::set_basis(const Basis& basis) {
  basic_ = basis.basic;
  state_ = basis.states;
  for (int j = 0; j < total_; ++j) {
    if (state_[j] != VarState::kBasic) place_nonbasic(j);
  }
  factored_ = false;
  values_dirty_ = true;
}

void DenseSimplex::refactor() {
  tableau_.resize(m_, total_);
  if (m_ > 0) {
    Eigen::MatrixXd b(m_, m_);
    for (int k = 0; k < m_; ++k) {
      const int col = basic_[k];
      if (col < n_) {
        b.col(k) = a_.col(col);
      } else {
        b.col(k).setZero();
        b(col - n_, k) = -1.0;
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(b);
    if (!(lu.rcond() > 1e-14)) throw NumericalError("singular basis");
    Eigen::MatrixXd full(m_, total_);
    full.leftCols(n_) = a_;
    full.rightCols(m_) = -Eigen::MatrixXd::Identity(m_, m_);
    tableau_ = lu.solve(full);
    for (int k = 0; k < m_; ++k) {
      tableau_.col(basic_[k]).setZero();
      tableau_(k, basic_[k]) = 1.0;
    }
  }
  Eigen::VectorXd cb(m_);
  for (int k = 0; k < m_; ++k) cb(k) = cost_(basic_[k]);
  d_ = cost_;
  if (m_ > 0) d_.noalias() -= tableau_.transpose() * cb;
  for (int k = 0; k < m_; ++k) d_(basic_[k]) = 0.0;
  factored_ = true;
  pivots_since_refactor_ = 0;
  recompute_basic_values();
}

void DenseSimplex::recompute_basic_values() {
  for (int k = 0; k < m_; ++k) x_(basic_[k]) = 0.0;
  Eigen::VectorXd xb = Eigen::VectorXd::Zero(m_);
  for (int j = 0; j < total_; ++j) {
    if (state_[j] == VarState::kBasic || x_(j) == 0.0) continue;
    xb.noalias() -= tableau_.col(j) * x_(j);
  }
  for (int k = 0; k < m_; ++k) x_(basic_[k]) = xb(k);
  values_dirty_ = false;
}

void DenseSimplex::pivot(int row, int col) {
  const double piv = tableau_(row, col);
  tableau_.row(row) /= piv;
  for (int k = 0; k < m_; ++k) {
    if (k == row) continue;
    const double f = tableau_(k, col);
    if (f != 0.0) tableau_.row(k).noalias() -= f * tableau_.row(row);
  }
  tableau_.col(col).setZero();
  tableau_(row, col) = 1.0;
  const double dq = d_(col);
  if (dq != 0.0) d_.noalias() -= dq * tableau_.row(row).transpose();
  d_(col) = 0.0;
  basic_[row] = col;
  state_[col] = VarState::kBasic;
}

double DenseSimplex::infeasibility(int col) const {
  const double v = x_(col);
  const double tol_lo = options_.primal_tol * (1.0 + std::abs(lb_(col)));
  const double tol_up = options_.primal_tol * (1.0 + std::abs(ub_(col)));
  if (v < lb_(col) - tol_lo) return lb_(col) - v;
  if (v > ub_(col) + tol_up) return v - ub_(col);
  return 0.0;
}

bool DenseSimplex::primal_feasible() const {
  for (int k = 0; k < m_; ++k) {
    if (infeasibility(basic_[k]) > 0.0) return false;
  }
  return true;
}

bool DenseSimplex::dual_feasible() const {
  const double tol = options_.dual_tol;
  for (int j = 0; j < total_; ++j) {
    switch (state_[j]) {
      case VarState::kAtLower:
        if (d_(j) < -tol) return false;
        break;
      case VarState::kAtUpper:
        if (d_(j) > tol) return false;
        break;
      case VarState::kFree:
        if (std::abs(d_(j)) > tol) return false;
        break;
      default:
        break;
    }
  }
  return true;
}

void DenseSimplex::count_pivot(double step) {
  ++total_iterations_;
  if (step <= kDegenerateStep && ++degenerate_pivots_ >=
                                     options_.degenerate_pivot_limit) {
    bland_ = true;
  }
}

DenseSimplex::Step DenseSimplex::primal_iteration(bool phase_one) {
  const double tol = options_.dual_tol;
  Eigen::VectorXd priced;
  if (phase_one) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(m_);
    for (int k = 0; k < m_; ++k) {
      const int col = basic_[k];
      if (infeasibility(col) > 0.0) w(k) = x_(col) < lb_(col) ? -1.0 : 1.0;
    }
    priced = -(tableau_.transpose() * w);
  }
  const Eigen::VectorXd& price = phase_one ? priced : d_;

  int entering = -1;
  double direction = 0.0;
  double best = 0.0;
  for (int j = 0; j < total_; ++j) {
    const VarState s = state_[j];
    if (s == VarState::kBasic || s == VarState::kFixed) continue;
    const bool can_increase = s == VarState::kAtLower || s == VarState::kFree;
    const bool can_decrease = s == VarState::kAtUpper || s == VarState::kFree;
    double score = 0.0;
    double dir = 0.0;
    if (can_increase && price(j) < -tol) {
      score = -price(j);
      dir = 1.0;
    } else if (can_decrease && price(j) > tol) {
      score = price(j);
      dir = -1.0;
    }
    if (dir == 0.0) continue;
    if (bland_) {
      entering = j;
      direction = dir;
      break;
    }
    if (score > best) {
      best = score;
      entering = j;
      direction = dir;
    }
  }
  if (entering < 0) return phase_one ? Step::kInfeasible : Step::kOptimal;

  // Ratio test over the breakpoints of the basic variables.
  int leave_row = -1;
  double step = kInf;
  double leave_value = 0.0;
  double leave_alpha = 0.0;
  for (int k = 0; k < m_; ++k) {
    const double tkq = tableau_(k, entering);
    if (std::abs(tkq) < options_.pivot_tol) continue;
    const double rate = -direction * tkq;
    const int col = basic_[k];
    const double v = x_(col);
    double limit = kInf;
    double target = 0.0;
    const double infeas = phase_one ? infeasibility(col) : 0.0;
    if (infeas > 0.0 && v < lb_(col)) {
      if (rate > 0.0) {
        limit = (lb_(col) - v) / rate;
        target = lb_(col);
      }
    } else if (infeas > 0.0 && v > ub_(col)) {
      if (rate < 0.0) {
        limit = (ub_(col) - v) / rate;
        target = ub_(col);
      }
    } else if (rate > 0.0 && std::isfinite(ub_(col))) {
      limit = (ub_(col) - v) / rate;
      target = ub_(col);
    } else if (rate < 0.0 && std::isfinite(lb_(col))) {
      limit = (lb_(col) - v) / rate;
      target = lb_(col);
    }
    if (!std::isfinite(limit)) continue;
    limit = std::max(limit, 0.0);
    const bool better = limit < step - 1e-12;
    const bool tie = !better && limit <= step + 1e-12;
    bool take = better;
    if (tie && leave_row >= 0) {
      take = bland_ ? col < basic_[leave_row]
                    : std::abs(rate) > std::abs(leave_alpha);
    }
    if (take) {
      step = limit;
      leave_row = k;
      leave_value = target;
      leave_alpha = rate;
    }
  }

  const double range = ub_(entering) - lb_(entering);
  const bool flip = std::isfinite(range) && range <= step;
  if (leave_row < 0 && !flip) {
    if (phase_one) throw NumericalError("phase one direction without breakpoint");
    return Step::kUnbounded;
  }
  if (flip) step = range;

  x_(entering) += direction * step;
  if (step != 0.0) {
    for (int k = 0; k < m_; ++k) {
      x_(basic_[k]) -= direction * tableau_(k, entering) * step;
    }
  }
  if (flip) {
    state_[entering] = direction > 0.0 ? VarState::kAtUpper : VarState::kAtLower;
    x_(entering) = direction > 0.0 ? ub_(entering) : lb_(entering);
    count_pivot(step);
    return Step::kContinue;
  }

  const int leaving = basic_[leave_row];
  pivot(leave_row, entering);
  x_(leaving) = leave_value;
  state_[leaving] = lb_(leaving) == ub_(leaving) ? VarState::kFixed
                    : leave_value == lb_(leaving) ? VarState::kAtLower
                                                  : VarState::kAtUpper;
  count_pivot(step);
  if (++pivots_since_refactor_ >= options_.refactor_interval) refactor();
  return Step::kContinue;
}

DenseSimplex::Step DenseSimplex::dual_iteration() {
  int row = -1;
  double worst = 0.0;
  for (int k = 0; k < m_; ++k) {
    const double inf = infeasibility(basic_[k]);
    if (inf <= 0.0) continue;
    if (bland_) {
      if (row < 0 || basic_[k] < basic_[row]) row = k;
    } else if (inf > worst) {
      worst = inf;
      row = k;
    }
  }
  if (row < 0) return Step::kOptimal;

  const int leaving = basic_[row];
  const bool raise = x_(leaving) < lb_(leaving);
  const double target = raise ? lb_(leaving) : ub_(leaving);

  int entering = -1;
  double best_ratio = kInf;
  double best_pivot = 0.0;
  for (int j = 0; j < total_; ++j) {
    const VarState s = state_[j];
    if (s == VarState::kBasic || s == VarState::kFixed) continue;
    const double trj = tableau_(row, j);
    if (std::abs(trj) < options_.pivot_tol) continue;
    // x_leaving moves by -trj * dx_j.
    bool eligible = false;
    if (s == VarState::kFree) {
      eligible = true;
    } else if (s == VarState::kAtLower) {
      eligible = raise ? trj < 0.0 : trj > 0.0;
    } else if (s == VarState::kAtUpper) {
      eligible = raise ? trj > 0.0 : trj < 0.0;
    }
    if (!eligible) continue;
    const double ratio = std::abs(d_(j)) / std::abs(trj);
    bool take = ratio < best_ratio - 1e-12;
    if (!take && ratio <= best_ratio + 1e-12 && entering >= 0) {
      take = bland_ ? j < entering : std::abs(trj) > std::abs(best_pivot);
    }
    if (take) {
      best_ratio = ratio;
      entering = j;
      best_pivot = trj;
    }
  }
  if (entering < 0) return Step::kInfeasible;

  const double dx = (target - x_(leaving)) / (-tableau_(row, entering));
  x_(entering) += dx;
  for (int k = 0; k < m_; ++k) {
    x_(basic_[k]) -= tableau_(k, entering) * dx;
  }
  pivot(row, entering);
  x_(leaving) = target;
  state_[leaving] = lb_(leaving) == ub_(leaving)
                        ? VarState::kFixed
                        : (raise ? VarState::kAtLower : VarState::kAtUpper);
  count_pivot(std::abs(dx));
  if (++pivots_since_refactor_ >= options_.refactor_interval) refactor();
  return Step::kContinue;
}

LpStatus DenseSimplex::solve() {
  if (!factored_) {
    refactor();
  } else if (values_dirty_) {
    recompute_basic_values();
  }
  bland_ = options_.rule == PivotRule::kBland;
  degenerate_pivots_ = 0;
  const int limit = options_.max_iterations > 0
                        ? options_.max_iterations
                        : std::max(20000, 50 * (m_ + total_));
  int iterations = 0;
  int confirmations = 0;
  while (true) {
    if (++iterations > limit) throw NumericalError("simplex iteration limit");
    const bool pf = primal_feasible();
    const bool df = dual_feasible();
    if (pf && df) {
      if (pivots_since_refactor_ == 0 || confirmations >= 3) {
        status_ = LpStatus::kOptimal;
        break;
      }
      ++confirmations;
      refactor();
      continue;
    }
    Step step = (!pf && df) ? dual_iteration() : primal_iteration(!pf);
    if (step == Step::kInfeasible || step == Step::kUnbounded) {
      if (pivots_since_refactor_ > 0 && confirmations < 3) {
        ++confirmations;
        refactor();
        continue;
      }
      status_ = step == Step::kInfeasible ? LpStatus::kInfeasible
                                          : LpStatus::kUnbounded;
      break;
    }
  }
  return status_;
}

LpSolution DenseSimplex::solution() const {
  LpSolution sol;
  sol.status = status_;
  sol.iterations = total_iterations_;
  sol.primal.resize(n_);
  for (int j = 0; j < n_; ++j) sol.primal[j] = x_(j) * col_scale_(j);
  std::vector<double> sensitivity(m_);
  for (int i = 0; i < m_; ++i) sensitivity[i] = row_scale_(i) * d_(n_ + i);
  sol.row_dual.resize(m_);
  for (int i = 0; i < m_; ++i) {
    const bool le = lp_.constraint(i).relation == Relation::kLessEqual;
    sol.row_dual[i] = le ? -sensitivity[i] : sensitivity[i];
    if (sol.row_dual[i] == 0.0) sol.row_dual[i] = 0.0;  // drop -0
  }
  sol.reduced_cost.resize(n_);
  for (int j = 0; j < n_; ++j) sol.reduced_cost[j] = lp_.variable(j).cost;
  for (int i = 0; i < m_; ++i) {
    for (const Term& t : lp_.constraint(i).terms) {
      sol.reduced_cost[t.var] -= t.coef * sensitivity[i];
    }
  }
  for (int j = 0; j < n_; ++j) {
    // Basic columns have zero reduced cost up to rounding.
    if (state_[j] == VarState::kBasic) sol.reduced_cost[j] = 0.0;
  }
  sol.objective = lp_.objective_value(sol.primal);
  return sol;
}

LpSolution solve_lp(const LinearProgram& lp, const SimplexOptions& options) {
  DenseSimplex simplex(lp, options);
  simplex.solve();
  return simplex.solution();
}

}  // namespace gepec::lp

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

#include "gepec/linear_program.hpp"

#include <algorithm>
#include <cmath>

namespace gepec::lp {

const char* to_string(Relation rel) {
  switch (rel) {
    case Relation::kLessEqual:
      return "<=";
    case Relation::kEqual:
      return "=";
    case Relation::kGreaterEqual:
      return ">=";
  }
  return "?";
}

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "optimal";
    case LpStatus::kInfeasible:
      return "infeasible";
    case LpStatus::kUnbounded:
      return "unbounded";
  }
  return "?";
}

const char* to_string(MilpStatus status) {
  switch (status) {
    case MilpStatus::kOptimal:
      return "optimal";
    case MilpStatus::kInfeasible:
      return "infeasible";
    case MilpStatus::kUnbounded:
      return "unbounded";
    case MilpStatus::kNodeLimit:
      return "node_limit";
  }
  return "?";
}

double LinearExpr::evaluate(std::span<const double> values) const {
  double v = constant;
  for (const Term& t : terms) v += t.coef * values[t.var];
  return v;
}

void LinearExpr::canonicalize() {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  for (const Term& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  terms = std::move(merged);
}

int LinearProgram::add_variable(std::string name, double lower, double upper,
                                double cost) {
  if (variable_index_.contains(name)) {
    throw ModelError("duplicate variable name: " + name);
  }
  const int j = num_variables();
  variable_index_.emplace(name, j);
  variables_.push_back({std::move(name), lower, upper, cost});
  return j;
}

int LinearProgram::add_constraint(std::string name, std::vector<Term> terms,
                                  Relation rel, double rhs) {
  if (constraint_index_.contains(name)) {
    throw ModelError("duplicate constraint name: " + name);
  }
  LinearExpr e{0.0, std::move(terms)};
  e.canonicalize();
  const int i = num_constraints();
  constraint_index_.emplace(name, i);
  constraints_.push_back({std::move(name), std::move(e.terms), rel, rhs});
  return i;
}

void LinearProgram::set_bounds(int var, double lower, double upper) {
  Variable& v = variables_.at(var);
  v.lower = lower;
  v.upper = upper;
}

int LinearProgram::find_variable(const std::string& name) const {
  auto it = variable_index_.find(name);
  return it == variable_index_.end() ? -1 : it->second;
}

int LinearProgram::find_constraint(const std::string& name) const {
  auto it = constraint_index_.find(name);
  return it == constraint_index_.end() ? -1 : it->second;
}

void LinearProgram::validate() const {
  for (const Variable& v : variables_) {
    if (std::isnan(v.lower) || std::isnan(v.upper) || v.lower > v.upper) {
      throw ModelError("variable " + v.name + " has invalid bounds");
    }
    if (v.lower == kInf || v.upper == -kInf || !std::isfinite(v.cost)) {
      throw ModelError("variable " + v.name + " has a non-finite cost/bound");
    }
  }
  for (const Constraint& c : constraints_) {
    if (c.terms.empty()) {
      throw ModelError("constraint " + c.name + " has no nonzero");
    }
    if (!std::isfinite(c.rhs)) {
      throw ModelError("constraint " + c.name + " has a non-finite rhs");
    }
    for (const Term& t : c.terms) {
      if (t.var < 0 || t.var >= num_variables()) {
        throw ModelError("constraint " + c.name +
                         " references an undeclared variable");
      }
      if (!std::isfinite(t.coef)) {
        throw ModelError("constraint " + c.name + " has a non-finite entry");
      }
    }
  }
}

double LinearProgram::objective_value(std::span<const double> x) const {
  double v = objective_offset_;
  for (int j = 0; j < num_variables(); ++j) v += variables_[j].cost * x[j];
  return v;
}

double LinearProgram::row_activity(int i, std::span<const double> x) const {
  double v = 0.0;
  for (const Term& t : constraints_[i].terms) v += t.coef * x[t.var];
  return v;
}

double dual_objective(const LinearProgram& lp, const LpSolution& sol) {
  double v = lp.objective_offset();
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const Constraint& c = lp.constraint(i);
    const double y = sol.row_dual[i];
    v += c.relation == Relation::kLessEqual ? -c.rhs * y : c.rhs * y;
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    const Variable& var = lp.variable(j);
    const double d = sol.reduced_cost[j];
    if (d > 0.0 && std::isfinite(var.lower)) v += var.lower * d;
    if (d < 0.0 && std::isfinite(var.upper)) v += var.upper * d;
  }
  return v;
}

double primal_infeasibility(const LinearProgram& lp,
                            std::span<const double> x) {
  double worst = 0.0;
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const Constraint& c = lp.constraint(i);
    const double act = lp.row_activity(i, x);
    double viol = 0.0;
    switch (c.relation) {
      case Relation::kLessEqual:
        viol = act - c.rhs;
        break;
      case Relation::kGreaterEqual:
        viol = c.rhs - act;
        break;
      case Relation::kEqual:
        viol = std::abs(act - c.rhs);
        break;
    }
    worst = std::max(worst, viol / (1.0 + std::abs(c.rhs)));
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    const Variable& v = lp.variable(j);
    if (x[j] < v.lower) {
      worst = std::max(worst, (v.lower - x[j]) / (1.0 + std::abs(v.lower)));
    }
    if (x[j] > v.upper) {
      worst = std::max(worst, (x[j] - v.upper) / (1.0 + std::abs(v.upper)));
    }
  }
  return worst;
}

double complementarity_residual(const LinearProgram& lp,
                                const LpSolution& sol) {
  auto scaled = [](double slack, double dual) {
    return std::abs(slack * dual) /
           (1.0 + std::abs(slack) + std::abs(dual));
  };
  double worst = 0.0;
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const Constraint& c = lp.constraint(i);
    if (c.relation == Relation::kEqual) continue;
    const double act = lp.row_activity(i, sol.primal);
    const double slack =
        c.relation == Relation::kLessEqual ? c.rhs - act : act - c.rhs;
    worst = std::max(worst, scaled(slack, sol.row_dual[i]));
  }
  for (int j = 0; j < lp.num_variables(); ++j) {
    const Variable& v = lp.variable(j);
    const double d = sol.reduced_cost[j];
    if (d > 0.0) {
      const double slack = std::isfinite(v.lower) ? sol.primal[j] - v.lower
                                                  : kInf;
      worst = std::max(worst, std::isfinite(slack) ? scaled(slack, d) : d);
    } else if (d < 0.0) {
      const double slack = std::isfinite(v.upper) ? v.upper - sol.primal[j]
                                                  : kInf;
      worst = std::max(worst, std::isfinite(slack) ? scaled(slack, -d) : -d);
    }
  }
  return worst;
}

std::map<std::string, double> extract_duals(
    const LinearProgram& lp, const LpSolution& sol,
    std::span<const std::string> names) {
  if (sol.status != LpStatus::kOptimal) {
    throw std::logic_error("extract_duals requires an optimal solution");
  }
  std::map<std::string, double> out;
  for (const std::string& name : names) {
    const int i = lp.find_constraint(name);
    if (i < 0) throw ModelError("unknown constraint: " + name);
    out[name] = sol.row_dual[i];
  }
  return out;
}

int MilpModel::add_binary(std::string name) {
  const int j = lp.add_variable(std::move(name), 0.0, 1.0);
  binaries.push_back(j);
  return j;
}

void MilpModel::validate() const {
  lp.validate();
  for (int j : binaries) {
    if (j < 0 || j >= lp.num_variables()) {
      throw ModelError("binary index out of range");
    }
    const Variable& v = lp.variable(j);
    if (v.lower < 0.0 || v.upper > 1.0) {
      throw ModelError("binary " + v.name + " must have bounds within [0,1]");
    }
  }
}

}  // namespace gepec::lp

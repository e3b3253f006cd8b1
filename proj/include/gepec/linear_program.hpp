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

// Solver-agnostic representations of linear and mixed-binary programs.
//
// All models are minimizations. Row duals follow one convention everywhere:
//   * `=` and `>=` rows report d(objective)/d(rhs);
//   * `<=` rows report -d(objective)/d(rhs), so they are nonnegative.
// Reduced costs are c_j - sum_i a_ij y_i with y the sensitivity duals, which
// equals (lower-bound dual) - (upper-bound dual).

#ifndef GEPEC_LINEAR_PROGRAM_HPP_
#define GEPEC_LINEAR_PROGRAM_HPP_

#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace gepec::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { kLessEqual, kEqual, kGreaterEqual };

const char* to_string(Relation rel);

struct Term {
  int var = -1;
  double coef = 0.0;
};

// constant + sum(coef * x[var]).
struct LinearExpr {
  double constant = 0.0;
  std::vector<Term> terms;

  void add(int var, double coef) { terms.push_back({var, coef}); }
  double evaluate(std::span<const double> values) const;
  // Merges duplicate indices and drops exact zeros; order by variable index.
  void canonicalize();
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  double cost = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Relation relation = Relation::kEqual;
  double rhs = 0.0;
};

// Thrown for malformed models: dangling indices, inverted bounds, empty rows,
// duplicate or unknown names.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LinearProgram {
 public:
  int add_variable(std::string name, double lower, double upper,
                   double cost = 0.0);
  int add_constraint(std::string name, std::vector<Term> terms, Relation rel,
                     double rhs);

  void set_cost(int var, double cost) { variables_.at(var).cost = cost; }
  void set_bounds(int var, double lower, double upper);
  void set_objective_offset(double offset) { objective_offset_ = offset; }

  int num_variables() const { return static_cast<int>(variables_.size()); }
  int num_constraints() const { return static_cast<int>(constraints_.size()); }
  const Variable& variable(int j) const { return variables_.at(j); }
  const Constraint& constraint(int i) const { return constraints_.at(i); }
  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  double objective_offset() const { return objective_offset_; }

  // -1 when absent.
  int find_variable(const std::string& name) const;
  int find_constraint(const std::string& name) const;

  // Throws ModelError naming the first violated structural invariant.
  void validate() const;

  double objective_value(std::span<const double> x) const;
  double row_activity(int i, std::span<const double> x) const;

 private:
  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> variable_index_;
  std::unordered_map<std::string, int> constraint_index_;
  double objective_offset_ = 0.0;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* to_string(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> primal;
  std::vector<double> row_dual;
  std::vector<double> reduced_cost;
  double objective = 0.0;
  int iterations = 0;
};

// Dual objective b'y + l'nu_min - u'nu_max under the convention above.
double dual_objective(const LinearProgram& lp, const LpSolution& sol);

// Max over rows and bounds of the scaled primal violation.
double primal_infeasibility(const LinearProgram& lp,
                            std::span<const double> x);

// Max over rows and bounds of |dual * slack| / (1 + |slack| + |dual|).
double complementarity_residual(const LinearProgram& lp,
                                const LpSolution& sol);

// Duals for exactly the requested rows. Throws ModelError on an unknown name
// and std::logic_error when the solution is not optimal.
std::map<std::string, double> extract_duals(
    const LinearProgram& lp, const LpSolution& sol,
    std::span<const std::string> names);

struct MilpModel {
  LinearProgram lp;
  std::vector<int> binaries;

  int add_binary(std::string name);
  void validate() const;
};

enum class MilpStatus { kOptimal, kInfeasible, kUnbounded, kNodeLimit };

const char* to_string(MilpStatus status);

struct MilpSolution {
  MilpStatus status = MilpStatus::kInfeasible;
  std::vector<double> values;
  double objective = kInf;
  double bound = -kInf;
  double gap = kInf;
  long nodes = 0;
  long lp_iterations = 0;
  // Global lower bound after each processed node.
  std::vector<double> bound_trace;
};

}  // namespace gepec::lp

#endif  // GEPEC_LINEAR_PROGRAM_HPP_

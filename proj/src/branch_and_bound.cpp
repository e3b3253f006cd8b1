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

#include <algorithm>
#include <cmath>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>

namespace gepec::lp {
namespace {

struct Fixing {
  int binary = 0;  // position in model.binaries
  double value = 0.0;
};

struct Node {
  long id = 0;
  double bound = -kInf;
  std::vector<Fixing> fixings;
  std::optional<Basis> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const MilpOptions& options)
      : model_(model), options_(options), simplex_(model.lp, options.simplex) {
    for (int j : model.binaries) {
      const Variable& v = model.lp.variable(j);
      original_.emplace_back(v.lower, v.upper);
    }
    current_ = original_;
  }

  MilpSolution run();

 private:
  void apply(const std::vector<Fixing>& fixings);
  void set_binary(int b, double lo, double up);
  // Zero while there is no incumbent.
  double tolerance(double incumbent) const {
    if (!std::isfinite(incumbent)) return 0.0;
    return std::max(options_.absolute_gap,
                    options_.gap * std::abs(incumbent));
  }
  // Solves with every binary fixed to the rounding of `values`; updates the
  // incumbent when better. Leaves binary bounds fixed.
  void complete(const std::vector<double>& values);
  std::optional<Node> expand(Node node, bool warm);
  double global_bound(const std::optional<Node>& pending) const;

  const MilpModel& model_;
  const MilpOptions& options_;
  DenseSimplex simplex_;
  std::vector<std::pair<double, double>> original_;
  std::vector<std::pair<double, double>> current_;

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open_;
  long next_id_ = 0;
  long nodes_ = 0;
  double incumbent_obj_ = kInf;
  std::vector<double> incumbent_;
  double pruned_bound_ = kInf;
  MilpSolution result_;
};

void BranchAndBound::set_binary(int b, double lo, double up) {
  if (current_[b].first == lo && current_[b].second == up) return;
  current_[b] = {lo, up};
  simplex_.set_bounds(model_.binaries[b], lo, up);
}

void BranchAndBound::apply(const std::vector<Fixing>& fixings) {
  std::vector<std::pair<double, double>> want = original_;
  for (const Fixing& f : fixings) want[f.binary] = {f.value, f.value};
  for (size_t b = 0; b < want.size(); ++b) {
    set_binary(static_cast<int>(b), want[b].first, want[b].second);
  }
}

void BranchAndBound::complete(const std::vector<double>& values) {
  for (size_t b = 0; b < model_.binaries.size(); ++b) {
    const double v = std::round(values[model_.binaries[b]]);
    const double fixed = std::clamp(v, original_[b].first, original_[b].second);
    set_binary(static_cast<int>(b), fixed, fixed);
  }
  if (simplex_.solve() != LpStatus::kOptimal) return;
  const LpSolution sol = simplex_.solution();
  if (sol.objective < incumbent_obj_) {
    incumbent_obj_ = sol.objective;
    incumbent_ = sol.primal;
  }
}

double BranchAndBound::global_bound(const std::optional<Node>& pending) const {
  double lb = std::min(incumbent_obj_, pruned_bound_);
  if (!open_.empty()) lb = std::min(lb, open_.top().bound);
  if (pending) lb = std::min(lb, pending->bound);
  return lb;
}

// Solves one node; returns the child to plunge into, if any.
std::optional<Node> BranchAndBound::expand(Node node, bool warm) {
  ++nodes_;
  apply(node.fixings);
  if (!warm && node.basis) simplex_.set_basis(*node.basis);
  const LpStatus status = simplex_.solve();
  if (status == LpStatus::kInfeasible) return std::nullopt;
  if (status == LpStatus::kUnbounded) {
    throw std::domain_error("unbounded relaxation");
  }
  const LpSolution sol = simplex_.solution();
  const double bound = std::max(sol.objective, node.bound);
  if (bound >= incumbent_obj_ - tolerance(incumbent_obj_)) {
    pruned_bound_ = std::min(pruned_bound_, bound);
    return std::nullopt;
  }

  int branch = -1;
  double most = -1.0;
  for (size_t b = 0; b < model_.binaries.size(); ++b) {
    const double v = sol.primal[model_.binaries[b]];
    const double frac = std::abs(v - std::round(v));
    if (frac <= options_.integrality_tol) continue;
    const double score = 0.5 - std::abs(v - std::floor(v) - 0.5);
    if (score > most + 1e-12) {
      most = score;
      branch = static_cast<int>(b);
    }
  }
  if (branch < 0) {
    complete(sol.primal);
    return std::nullopt;
  }

  const Basis basis = simplex_.basis();
  const double value = sol.primal[model_.binaries[branch]];
  const double first = value >= 0.5 ? 1.0 : 0.0;
  Node children[2];
  for (int k = 0; k < 2; ++k) {
    children[k].id = next_id_++;
    children[k].bound = bound;
    children[k].fixings = node.fixings;
    children[k].fixings.push_back({branch, k == 0 ? first : 1.0 - first});
    children[k].basis = basis;
  }
  if (options_.node_selection == NodeSelection::kBestBoundPlunge) {
    open_.push(std::move(children[1]));
    return std::move(children[0]);
  }
  open_.push(std::move(children[0]));
  open_.push(std::move(children[1]));
  return std::nullopt;
}

MilpSolution BranchAndBound::run() {
  MilpSolution& res = result_;
  const LpStatus root = simplex_.solve();
  if (root == LpStatus::kInfeasible) {
    res.status = MilpStatus::kInfeasible;
    res.lp_iterations = simplex_.iterations();
    return res;
  }
  if (root == LpStatus::kUnbounded) {
    res.status = MilpStatus::kUnbounded;
    res.lp_iterations = simplex_.iterations();
    return res;
  }
  const Basis root_basis = simplex_.basis();
  const LpSolution root_sol = simplex_.solution();
  if (model_.binaries.empty()) {
    res.status = MilpStatus::kOptimal;
    res.values = root_sol.primal;
    res.objective = res.bound = root_sol.objective;
    res.gap = 0.0;
    res.nodes = 1;
    res.bound_trace = {root_sol.objective};
    res.lp_iterations = simplex_.iterations();
    return res;
  }
  for (const std::vector<double>& start : options_.starts) {
    if (start.size() != static_cast<size_t>(model_.lp.num_variables())) {
      throw std::invalid_argument("MIP start has the wrong dimension");
    }
    complete(start);
  }
  apply({});
  simplex_.set_basis(root_basis);

  Node root_node;
  root_node.id = next_id_++;
  root_node.bound = root_sol.objective;
  root_node.basis = root_basis;
  open_.push(std::move(root_node));

  bool hit_limit = false;
  std::optional<Node> pending;
  double last_bound = -kInf;
  while (pending || !open_.empty()) {
    const double lb = global_bound(pending);
    if (incumbent_obj_ - lb <= tolerance(incumbent_obj_)) break;
    if (nodes_ >= options_.node_limit) {
      hit_limit = true;
      break;
    }
    Node node;
    bool warm = false;
    if (pending) {
      node = std::move(*pending);
      pending.reset();
      warm = true;
    } else {
      node = open_.top();
      open_.pop();
    }
    if (node.bound >= incumbent_obj_ - tolerance(incumbent_obj_)) {
      pruned_bound_ = std::min(pruned_bound_, node.bound);
      continue;
    }
    pending = expand(std::move(node), warm);
    last_bound = std::max(last_bound, global_bound(pending));
    res.bound_trace.push_back(last_bound);
  }

  res.nodes = nodes_;
  res.lp_iterations = simplex_.iterations();
  res.bound = std::min(global_bound(pending), incumbent_obj_);
  if (incumbent_.empty()) {
    res.status = hit_limit ? MilpStatus::kNodeLimit : MilpStatus::kInfeasible;
    return res;
  }
  res.values = incumbent_;
  res.objective = incumbent_obj_;
  const double diff = std::max(0.0, incumbent_obj_ - res.bound);
  res.gap = diff <= options_.absolute_gap
                ? 0.0
                : diff / std::max(std::abs(incumbent_obj_), 1e-10);
  res.status = hit_limit ? MilpStatus::kNodeLimit : MilpStatus::kOptimal;
  return res;
}

}  // namespace

MilpSolution solve_milp(const MilpModel& model, const MilpOptions& options) {
  model.validate();
  if (!(options.gap >= 0.0 && options.gap < 1.0)) {
    throw std::invalid_argument("MILP gap must lie in [0, 1)");
  }
  BranchAndBound bb(model, options);
  try {
    return bb.run();
  } catch (const std::domain_error&) {
    MilpSolution res;
    res.status = MilpStatus::kUnbounded;
    return res;
  }
}

MilpSolution solve_milp(const MilpModel& model, double gap) {
  MilpOptions options;
  options.gap = gap;
  return solve_milp(model, options);
}

}  // namespace gepec::lp

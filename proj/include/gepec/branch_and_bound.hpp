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

#ifndef GEPEC_BRANCH_AND_BOUND_HPP_
#define GEPEC_BRANCH_AND_BOUND_HPP_

#include <vector>

#include "gepec/linear_program.hpp"
#include "gepec/simplex.hpp"

namespace gepec::lp {

enum class NodeSelection {
  // Always expand the open node with the smallest bound.
  kBestBound,
  // Best bound when choosing where to restart, but after a branching keep
  // descending into one child on the warm tableau until it is fathomed.
  kBestBoundPlunge,
};

struct MilpOptions {
  // Relative gap (UB - LB) / |UB| at which the search stops.
  double gap = 1e-3;
  double absolute_gap = 1e-9;
  long node_limit = 2'000'000;
  double integrality_tol = 1e-6;
  NodeSelection node_selection = NodeSelection::kBestBoundPlunge;
  SimplexOptions simplex;
  // Candidate assignments; only their binary entries are used. Each one is
  // completed by an LP with the binaries fixed and, when feasible, seeds the
  // incumbent.
  std::vector<std::vector<double>> starts;
};

// Branch-and-bound on the binaries of `model` with most-fractional
// branching. Infeasibility, an unbounded relaxation and the node limit are
// reported in the status; NumericalError propagates from the LP layer.
MilpSolution solve_milp(const MilpModel& model, const MilpOptions& options);
MilpSolution solve_milp(const MilpModel& model, double gap);

}  // namespace gepec::lp

#endif  // GEPEC_BRANCH_AND_BOUND_HPP_

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

// Independent checks of a computed equilibrium. The grid oracle only uses
// market clearing, never the MILP path.

#ifndef GEPEC_VERIFY_HPP_
#define GEPEC_VERIFY_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "gepec/equilibrium.hpp"

namespace gepec {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GridOracleConfig {
  int levels = 50;
  long budget = 1'000'000;  // clearing solves per producer
  void validate() const;
};

struct GridResult {
  BidProfile bids;  // the producer's assets only
  double profit = 0.0;
  long points = 0;  // grid points evaluated
  double step = 0.0;  // bid spacing
};

// Number of grid points for one producer: for each unit with k blocks the
// nondecreasing k-tuples over L levels, C(L + k - 1, k); units and wells
// multiply.
long grid_size(const CaseData& data, const Producer& producer, int levels);

// Enumerates the producer's bids on an evenly spaced grid over [0, cap]
// (plus its current bids), clears its market for each point with everyone
// else fixed, and keeps the point of highest true-cost profit.
GridResult grid_best_response(const std::string& producer,
                              const CaseData& data,
                              const BidProfile& bids_others,
                              const CouplingState& coupling,
                              const GridOracleConfig& cfg = {});

// Largest KKT residual of a clearing LP solution.
double check_kkt(const lp::LpSolution& solution, const KktSystem& kkt);

// Min over policy-sized pairs of (M_d - dual) / M_d.
double audit_big_m(std::span<const double> values,
                   const BestResponseMilp& model);

struct ProducerVerdict {
  std::string producer;
  double realized_profit = 0.0;
  double grid_profit = 0.0;
  double regret = 0.0;
  double threshold = 0.0;
  double grid_step_bound = 0.0;
  double milp_profit = 0.0;
  double big_m_margin = 1.0;
  long grid_points = 0;
  bool checked = false;
  bool pass = false;
};

struct VerificationVerdict {
  double kkt_max_residual = 0.0;
  double duality_gap = 0.0;
  double big_m_margin = 1.0;
  std::vector<ProducerVerdict> producers;
  bool kkt_pass = false;
  bool duality_pass = false;
  bool big_m_pass = false;
  bool regret_pass = false;
  bool partial = false;
  bool pass = false;

  static constexpr double kKktTolerance = 1e-6;
  static constexpr double kDualityTolerance = 1e-7;
  static constexpr double kBigMMargin = 0.01;
};

// Regret of every strategic producer on the grid at the report's final
// bids and coupling, plus KKT, duality and big-M checks of the final round.
// Requires report.converged (std::invalid_argument otherwise).
VerificationVerdict certify_equilibrium(const EquilibriumReport& report,
                                        const GridOracleConfig& cfg = {});

nlohmann::json to_json(const VerificationVerdict& v);
// One "check,value,threshold,result" line per check and producer.
std::string verdict_table(const VerificationVerdict& v);

}  // namespace gepec

#endif  // GEPEC_VERIFY_HPP_

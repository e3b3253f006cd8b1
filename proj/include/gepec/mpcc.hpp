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

// Best-response models of strategic producers.
//
// The clearing LP of a market is replaced by its KKT conditions, derived
// mechanically from the LP data. Complementarity pairs are encoded with one
// binary each (big-M), and the producer's bilinear revenue price * quantity
// is rewritten with strong duality into a linear expression, which turns the
// bilevel problem into a MILP.
//
// KKT space layout: the LP's primal variables, then one dual per row, then
// one dual per finite variable bound. With the linsolve sign convention,
// stationarity of primal j reads
//
//   c_j - sum_{=,>=} a_ij y_i + sum_{<=} a_ij y_i - nu_lo_j + nu_up_j = 0,
//
// where <= and >= row duals and bound duals are nonnegative.

#ifndef GEPEC_MPCC_HPP_
#define GEPEC_MPCC_HPP_

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gepec/branch_and_bound.hpp"
#include "gepec/case_model.hpp"
#include "gepec/clearing.hpp"
#include "gepec/linear_program.hpp"

namespace gepec {

class MpccError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ComplementarityPair {
  std::string name;
  lp::LinearExpr slack;  // over KKT space, >= 0 when primal feasible
  int dual = -1;         // KKT index, >= 0
  // Finite bounds of the slack over the primal feasible set, after bound
  // propagation; filled by derive_kkt.
  double slack_min = 0.0;
  double slack_max = lp::kInf;
  // Variable whose lower/upper bound this pair belongs to, or -1 for rows.
  int bound_of = -1;
};

struct KktSystem {
  lp::LinearProgram lp;  // the lower-level LP the system was derived from
  int num_primal = 0;
  std::vector<std::string> names;  // per KKT index
  std::vector<double> lower;       // sign restrictions / primal bounds
  std::vector<double> upper;
  std::vector<int> row_dual;    // per LP row
  std::vector<int> lower_dual;  // per primal, -1 when the bound is infinite
  std::vector<int> upper_dual;  // per primal, -1 when the bound is infinite
  std::vector<int> fixed_dual;  // per primal with lower == upper, else -1
  // One per primal variable; each expression equals zero.
  std::vector<lp::LinearExpr> stationarity;
  std::vector<ComplementarityPair> pairs;
  // Pairs of pairs that cannot both have zero slack (a variable at two
  // distinct bounds, a row pair with disjoint activity limits).
  std::vector<std::pair<int, int>> exclusive;

  int size() const { return static_cast<int>(names.size()); }
};

// Bounds implied on every primal variable by its own bounds and the rows of
// `lp` plus `extra_rows` (redundant aggregates that help propagation).
// Results are relaxed outward by a small tolerance so that they remain valid.
std::vector<std::pair<double, double>> implied_bounds(
    const lp::LinearProgram& lp,
    std::span<const lp::Constraint> extra_rows = {});

KktSystem derive_kkt(const lp::LinearProgram& lp,
                     std::span<const lp::Constraint> extra_rows = {});

// KKT-space point assembled from an optimal LP solution.
std::vector<double> kkt_point(const KktSystem& kkt, const lp::LpSolution& sol);

struct KktResiduals {
  double stationarity = 0.0;
  double primal = 0.0;      // row and bound violations
  double sign = 0.0;        // negative parts of sign-restricted duals
  double complementarity = 0.0;  // max over pairs of min(|s|, |g|)
  double max() const;
};
KktResiduals kkt_residuals(const KktSystem& kkt, std::span<const double> point);

// Strong-duality form of sum_{k in leader} price_row(k) * x_k, valid at every
// KKT point. Each leader variable must have exactly one nonzero, equal to 1,
// in the row whose dual is its price; its cost must be the parameter being
// optimized (the constant part of its stationarity row is ignored).
lp::LinearExpr linearized_revenue(const KktSystem& kkt,
                                  std::span<const int> leader);
// The same revenue evaluated literally as price * quantity.
double bilinear_revenue(const KktSystem& kkt, std::span<const int> leader,
                        std::span<const double> point);

struct BigMPolicy {
  double dual = 1e4;
};

struct PairEncoding {
  int pair = -1;    // index into KktSystem::pairs
  int binary = -1;  // model variable; h = 0 forces slack 0, h = 1 dual 0
  double big_m_primal = 0.0;
  double big_m_dual = 0.0;
  bool fixed = false;  // h fixed by presolve
};

// Adds, for every complementarity pair, one binary and the two rows
// slack <= M_p h and dual <= M_d (1 - h), assuming KKT index k is model
// variable k. Pairs whose slack cannot vanish get h fixed to 1, pairs whose
// slack is identically 0 get h fixed to 0. Throws MpccError when a slack has
// no finite upper bound.
std::vector<PairEncoding> encode_complementarity(const KktSystem& kkt,
                                                 const BigMPolicy& policy,
                                                 lp::MilpModel& model);

struct BestResponseMilp {
  std::string producer;
  Market market = Market::kPower;
  lp::MilpModel milp;
  KktSystem kkt;
  std::vector<int> leader;  // KKT/model indices of the producer's quantities
  std::vector<double> true_cost;  // per leader variable
  // asset id -> model variable of each bid (one per block for units)
  std::map<std::string, std::vector<int>> bid_var;
  std::vector<PairEncoding> pairs;
  lp::LinearExpr profit;  // linearized, over model variables
  std::map<int, std::string> symbols;  // model variable -> domain symbol
  double big_m_dual = 0.0;
};

// Producer profit sum((price - true cost) * quantity) written linearly over
// the KKT space of an electricity clearing LP.
lp::LinearExpr linearize_objective_sep(const std::string& s_star,
                                       const KktSystem& kkt,
                                       const CaseData& data,
                                       const BidProfile& bids_others,
                                       const CouplingState& coupling);
lp::LinearExpr linearize_objective_sgp(const std::string& v_star,
                                       const KktSystem& kkt,
                                       const CaseData& data,
                                       const BidProfile& bids_others,
                                       const CouplingState& coupling);

BestResponseMilp build_sep_milp(const std::string& s_star,
                                const CaseData& data,
                                const BidProfile& bids_others,
                                const CouplingState& coupling,
                                const BigMPolicy& policy = {});
BestResponseMilp build_sgp_milp(const std::string& v_star,
                                const CaseData& data,
                                const BidProfile& bids_others,
                                const CouplingState& coupling,
                                const BigMPolicy& policy = {});

struct BestResponse {
  std::string producer;
  BidProfile bids;  // only the producer's assets
  double profit = 0.0;            // linearized objective at the incumbent
  double bilinear_profit = 0.0;   // price * quantity - cost at the incumbent
  double gap = 0.0;
  long nodes = 0;
  double big_m_dual = 0.0;  // value used by the accepted solve
  double big_m_margin = 1.0;
  int escalations = 0;
  lp::MilpStatus status = lp::MilpStatus::kOptimal;
};

struct BestResponseOptions {
  double gap = 1e-3;
  double big_m_dual = 1e4;
  int max_escalations = 3;
  double margin_threshold = 0.01;
  long node_limit = 2'000'000;
};

// Min over policy-sized pairs of (M_d - dual) / M_d; 1 when there are none.
double big_m_margin(const BestResponseMilp& model,
                    std::span<const double> values);

// Builds and solves the producer's MILP, doubling M_d while the audit fails.
// The producer's bids in `current` seed the search. Throws MpccError if no
// accepted solve is found.
BestResponse best_response(const std::string& producer, const CaseData& data,
                           const BidProfile& current,
                           const CouplingState& coupling,
                           const BestResponseOptions& options);

// Solves one already built model; exposed for tests.
lp::MilpSolution solve_best_response_milp(const BestResponseMilp& model,
                                          const CaseData& data,
                                          const BidProfile& current,
                                          const CouplingState& coupling,
                                          const BestResponseOptions& options);

// Mapping file for model dumps: one "index,name,symbol" line per variable.
std::string symbol_table(const BestResponseMilp& model);

}  // namespace gepec

#endif  // GEPEC_MPCC_HPP_

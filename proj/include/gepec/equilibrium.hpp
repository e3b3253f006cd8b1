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

// Nested diagonalization: Gauss-Seidel best-response sweeps inside each
// market, and an outer loop exchanging coupling quantities between them.

#ifndef GEPEC_EQUILIBRIUM_HPP_
#define GEPEC_EQUILIBRIUM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gepec/case_model.hpp"
#include "gepec/clearing.hpp"
#include "gepec/mpcc.hpp"

namespace gepec {

struct DaConfig {
  double epsilon = 0.01;
  int r_max = 20;
  double milp_gap = 1e-3;
  double big_m_dual = 1e4;
  // Extension: perturbed restarts of the outer loop (0 = off).
  int multi_start = 0;
  std::uint64_t seed = 1;
  // When set, every best-response MILP is written there as LP text plus a
  // variable -> symbol map.
  std::string dump_dir;

  static DaConfig from(const AlgorithmSettings& settings);
  void validate() const;
};

// |x_new - x_old| <= eps * max(x_new, x_old). Throws std::invalid_argument
// for eps <= 0 or a negative argument.
bool relative_converged(double x_new, double x_old, double eps);

// One best-response solve inside an inner sweep.
struct SolveRecord {
  std::string producer;
  int round = 0;
  double profit = 0.0;
  double bilinear_profit = 0.0;
  double gap = 0.0;
  long nodes = 0;
  double big_m_dual = 0.0;
  double big_m_margin = 1.0;
  int escalations = 0;
  std::string status;
};

struct InnerResult {
  BidProfile bids;  // the market's strategic assets only
  bool flag = false;  // r_max reached without meeting the criterion
  int rounds = 0;
  // Largest |new - old| / max(new, old) of the last round's bids.
  double residual = 0.0;
  std::vector<SolveRecord> solves;
};

InnerResult inner_da_electricity(const CaseData& data,
                                 const CouplingState& coupling,
                                 const DaConfig& cfg);
InnerResult inner_da_gas(const CaseData& data, const CouplingState& coupling,
                         const DaConfig& cfg);
// Same loops started from `start` instead of the caps (multi-start).
InnerResult inner_da_electricity_from(const CaseData& data,
                                      const CouplingState& coupling,
                                      const DaConfig& cfg,
                                      const std::optional<BidProfile>& start);
InnerResult inner_da_gas_from(const CaseData& data,
                              const CouplingState& coupling,
                              const DaConfig& cfg,
                              const std::optional<BidProfile>& start);

struct OuterRound {
  int round = 0;
  BidProfile bids;
  CouplingState coupling;  // after both clearings of the round
  InnerResult electricity;
  InnerResult gas;
  // Relative change of each compared quantity against the previous round,
  // keyed "p2g:<id>", "unit:<id>:<block>".
  std::map<std::string, double> residuals;
  bool converged = false;
};

struct IterationTrace {
  std::vector<OuterRound> rounds;
};

struct ExchangeRow {
  std::string kind;  // "gas_to_power" (Sm3/h) or "power_to_gas" (MW)
  std::string id;
  double value = 0.0;
};

struct EquilibriumReport {
  bool converged = false;
  std::string status;  // "converged", "r_max", "flag_p", "flag_g", "error"
  std::string message;
  bool clearing_infeasible = false;  // the run stopped on an infeasible clearing
  CaseData data;
  DaConfig config;
  BidProfile bids;
  CouplingState coupling;
  std::optional<ElectricityClearing> electricity;
  std::optional<GasClearing> gas;
  std::vector<ExchangeRow> exchange;
  std::map<std::string, double> profits;  // realized, at true cost
  IterationTrace trace;
  std::optional<nlohmann::json> verdict;
};

// Profit of a strategic producer at realized prices and true costs.
double realized_profit(const CaseData& data, const Producer& producer,
                       const ElectricityClearing* e, const GasClearing* g,
                       const CouplingState& coupling);

// Runs the nested loop from the standard starting point. Infeasible
// clearings and failed solves end the run with status "error"; the report
// keeps everything computed so far.
EquilibriumReport outer_da(const CaseData& data, const DaConfig& cfg);

// Runs outer_da and, when cfg.multi_start > 0, also from randomly
// perturbed initial bids; returns every run, the base run first.
std::vector<EquilibriumReport> outer_da_multi_start(const CaseData& data,
                                                    const DaConfig& cfg);

nlohmann::json to_json(const EquilibriumReport& report);
// Restores what verification needs: case, config, bids, coupling and
// status. Clearings are recomputed by the caller when needed.
EquilibriumReport report_from_json(const nlohmann::json& j);

// Table with one row per element: section (power|gas|exchange), kind, id,
// value.
std::string report_csv(const EquilibriumReport& report);
std::string prices_csv(const EquilibriumReport& report);
std::string exchange_csv(const EquilibriumReport& report);
std::string trace_csv(const EquilibriumReport& report);

}  // namespace gepec

#endif  // GEPEC_EQUILIBRIUM_HPP_

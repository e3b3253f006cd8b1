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

// Pool clearing of the electricity and gas markets as LPs.
//
// Electricity: min sum(offer * P) over unit blocks subject to DC nodal
// balance with fixed P2G withdrawals, optional line limits, angle bounds and
// a reference angle. Gas: min sum(offer * q) + sum(LMEP * P_z) subject to
// nodal gas balance with fixed gas-fired fuel demand, pipeline limits and
// P2G injections.
//
// Sign convention: the price of a node is the balance-row dual, i.e. the
// objective increase per unit of additional load at that node.
//
// Ties: when offers tie at the margin the LP optimum is a face, not a point.
// A second LP over that face (nonzero reduced costs and duals pinned) picks
// the point that dispatches strategic assets the most; prices and all other
// duals are those of the first solve.

#ifndef GEPEC_CLEARING_HPP_
#define GEPEC_CLEARING_HPP_

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "gepec/case_model.hpp"
#include "gepec/linear_program.hpp"
#include "json.hpp"

namespace gepec {

inline constexpr double kPi = 3.14159265358979323846;

// Offer prices the clearing uses for every unit block and well, with the
// variables each one multiplies. Strategic assets take their bids; the rest
// offer true cost.
struct ElectricityModel {
  lp::LinearProgram lp;
  std::map<std::string, std::vector<int>> block_var;  // unit -> per block
  std::map<std::string, int> theta_var;               // node
  std::map<std::string, int> balance_row;             // node
  std::map<std::string, int> line_max_row;            // line, when capped
  std::map<std::string, int> line_min_row;
  int reference_row = -1;
  double fixed_withdrawal = 0.0;  // total load + P2G demand, MW
};

struct GasModel {
  lp::LinearProgram lp;
  std::map<std::string, int> well_var;
  std::map<std::string, int> pipeline_var;
  std::map<std::string, int> p2g_var;
  std::map<std::string, int> balance_row;  // node
  double fixed_withdrawal = 0.0;           // loads + gas-fired fuel, Sm3/h
};

ElectricityModel build_electricity_model(const CaseData& data,
                                         const BidProfile& bids,
                                         const CouplingState& coupling);
GasModel build_gas_model(const CaseData& data, const BidProfile& bids,
                         const CouplingState& coupling);
lp::LinearProgram build_electricity_lp(const CaseData& data,
                                       const BidProfile& bids,
                                       const CouplingState& coupling);
lp::LinearProgram build_gas_lp(const CaseData& data, const BidProfile& bids,
                               const CouplingState& coupling);

// Thrown when a market cannot be cleared; the message names the binding
// reason (capacity shortfall or network limits).
class InfeasibleClearing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ElectricityClearing {
  std::map<std::string, std::vector<double>> dispatch;  // unit -> MW per block
  std::map<std::string, double> theta;                  // rad
  std::map<std::string, double> lmep;                   // $/MWh
  std::map<std::string, double> flow;                   // line -> MW
  std::map<std::string, double> line_dual_max;
  std::map<std::string, double> line_dual_min;
  std::map<std::string, std::vector<double>> block_dual_max;
  std::map<std::string, std::vector<double>> block_dual_min;
  std::map<std::string, double> angle_dual_max;
  std::map<std::string, double> angle_dual_min;
  double reference_dual = 0.0;
  double objective = 0.0;

  lp::LinearProgram lp;
  lp::LpSolution solution;
};

struct GasClearing {
  std::map<std::string, double> well_output;    // Sm3/h
  std::map<std::string, double> pipeline_flow;  // Sm3/h
  std::map<std::string, double> p2g_demand;     // MW
  std::map<std::string, double> lmgp;           // $/Sm3
  std::map<std::string, double> well_dual_max;
  std::map<std::string, double> well_dual_min;
  std::map<std::string, double> pipeline_dual_max;
  std::map<std::string, double> pipeline_dual_min;
  std::map<std::string, double> p2g_dual_min;
  std::map<std::string, double> p2g_dual_max;
  double objective = 0.0;

  lp::LinearProgram lp;
  lp::LpSolution solution;
};

ElectricityClearing clear_electricity(const CaseData& data,
                                      const BidProfile& bids,
                                      const CouplingState& coupling);
GasClearing clear_gas(const CaseData& data, const BidProfile& bids,
                      const CouplingState& coupling);

// Solves an already built model; used by the MPCC checks that need the
// clearing of a modified LP.
ElectricityClearing clear_electricity(const CaseData& data,
                                      const ElectricityModel& model);
GasClearing clear_gas(const CaseData& data, const GasModel& model);

// Copies the electricity-side quantities the gas market needs (and the other
// way round) into `coupling`.
void update_coupling(const ElectricityClearing& e, CouplingState& coupling);
void update_coupling(const GasClearing& g, CouplingState& coupling);

// Gas burnt by gas-fired units, per unit (Sm3/h).
std::map<std::string, double> gas_to_power(const CaseData& data,
                                           const ElectricityClearing& e);

nlohmann::json to_json(const ElectricityClearing& e);
nlohmann::json to_json(const GasClearing& g);
// Long-format CSV: market,kind,id,block,value.
std::string clearing_csv(const ElectricityClearing* e, const GasClearing* g);

}  // namespace gepec

#endif  // GEPEC_CLEARING_HPP_

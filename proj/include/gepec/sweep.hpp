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

// Load-ratio scenario grids and congested / uncongested comparisons.

#ifndef GEPEC_SWEEP_HPP_
#define GEPEC_SWEEP_HPP_

#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "gepec/equilibrium.hpp"

namespace gepec {

struct RatioRange {
  double start = 1.0;
  double stop = 1.0;
  double step = 1.0;
  void validate(const std::string& what) const;
  std::vector<double> values() const;
};

// Parses "a:b:s" (or a single number) into a range.
RatioRange parse_range(const std::string& text);

struct SweepSpec {
  RatioRange elr;
  RatioRange glr;
  bool congested = true;  // false: capacity rows removed
  void validate() const;
};

// True production cost: sum of true cost * dispatch (gas-fired units priced
// at the LMGP of their gas node) and sum of well cost * output.
double power_production_cost(const CaseData& data, const ElectricityClearing& e,
                             const CouplingState& coupling);
double gas_production_cost(const CaseData& data, const GasClearing& g);
// Gas burnt by all gas-fired units (Sm3/h).
double gas_to_power_volume(const EquilibriumReport& report);

struct SweepCell {
  double elr = 1.0;
  double glr = 1.0;
  std::string status;
  std::string message;
  bool converged = false;
  bool feasible = true;  // false when a clearing was infeasible
  std::map<std::string, double> lmep;  // only filled when converged
  std::map<std::string, double> lmgp;
  double power_cost = 0.0;
  double gas_cost = 0.0;
  double gas_to_power = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> cells;  // elr-major, both ascending
  // Cells reported feasible although a cell with smaller or equal ratios
  // in both markets (one strictly smaller) was infeasible.
  std::vector<std::string> feasibility_violations;
};

SweepResult run_sweep(const CaseData& data, const SweepSpec& spec,
                      const DaConfig& cfg);

struct CongestionComparison {
  EquilibriumReport uncongested;
  EquilibriumReport congested;
  double power_cost_uncongested = 0.0;
  double power_cost_congested = 0.0;
  double gas_cost_uncongested = 0.0;
  double gas_cost_congested = 0.0;
  double gas_to_power_uncongested = 0.0;
  double gas_to_power_congested = 0.0;
  // Strategic assets bidding at the cap in the congested run ("P3#1", "G3").
  std::vector<std::string> bids_at_cap;
};

CongestionComparison compare_congestion(const CaseData& data,
                                        const DaConfig& cfg);

// Long format: elr,glr,market,node,price.
std::string sweep_prices_csv(const SweepResult& r);
// One line per cell: elr,glr,status,converged,power_cost,gas_cost,gas_to_power.
std::string sweep_cells_csv(const SweepResult& r);
nlohmann::json to_json(const CongestionComparison& c);

}  // namespace gepec

#endif  // GEPEC_SWEEP_HPP_

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

// Domain types for the coupled power/gas system and the case-file schema.

#ifndef GEPEC_CASE_MODEL_HPP_
#define GEPEC_CASE_MODEL_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace gepec {

enum class Market { kPower, kGas };
const char* to_string(Market market);

struct PowerNode {
  std::string id;
  bool is_reference = false;
  bool operator==(const PowerNode&) const = default;
};

struct PowerLine {
  std::string id;
  std::string from_node;
  std::string to_node;
  double susceptance = 0.0;
  std::optional<double> capacity;  // MW; absent = unconstrained
  bool operator==(const PowerLine&) const = default;
};

struct EnergyBlock {
  double capacity = 0.0;       // MW
  double marginal_cost = 0.0;  // $/MWh
  double efficiency = 1.0;     // gas-to-power, only read for gas-fired units
  bool operator==(const EnergyBlock&) const = default;
};

struct GeneratingUnit {
  std::string id;
  std::string node;
  std::string owner;
  bool strategic = false;
  bool gas_fired = false;
  std::string gas_node;  // empty unless gas_fired
  std::vector<EnergyBlock> blocks;
  double capacity() const;
  bool operator==(const GeneratingUnit&) const = default;
};

struct GasNode {
  std::string id;
  bool operator==(const GasNode&) const = default;
};

struct GasPipeline {
  std::string id;
  std::string from_node;  // compressor head for active pipelines
  std::string to_node;
  std::optional<double> capacity;  // Sm3/h; absent = unconstrained
  bool active = false;
  bool operator==(const GasPipeline&) const = default;
};

struct GasWell {
  std::string id;
  std::string node;
  std::string owner;
  bool strategic = false;
  double capacity = 0.0;       // Sm3/h
  double marginal_cost = 0.0;  // $/Sm3
  bool operator==(const GasWell&) const = default;
};

struct P2GFacility {
  std::string id;
  std::string power_node;
  std::string gas_node;
  double efficiency = 1.0;
  std::optional<double> power_capacity;  // MW; absent = unbounded
  bool operator==(const P2GFacility&) const = default;
};

struct Load {
  std::string id;
  std::string node;
  double demand = 0.0;
  Market market = Market::kPower;
  bool operator==(const Load&) const = default;
};

struct PowerNetwork {
  std::vector<PowerNode> nodes;
  std::vector<PowerLine> lines;
  std::vector<GeneratingUnit> units;
  std::vector<Load> loads;
  bool operator==(const PowerNetwork&) const = default;
};

struct GasNetwork {
  std::vector<GasNode> nodes;
  std::vector<GasPipeline> pipelines;
  std::vector<GasWell> wells;
  std::vector<Load> loads;
  bool operator==(const GasNetwork&) const = default;
};

struct Constants {
  double tau = 1.0;  // Sm3/h per MW
  double alpha_max = 0.0;
  double delta_max = 0.0;
  bool operator==(const Constants&) const = default;
};

struct AlgorithmSettings {
  double epsilon = 0.01;
  int r_max = 20;
  double big_m_dual = 1e4;
  double milp_gap = 1e-3;
  bool operator==(const AlgorithmSettings&) const = default;
};

struct CaseData {
  std::string name;
  PowerNetwork power;
  GasNetwork gas;
  std::vector<P2GFacility> p2g;
  Constants constants;
  AlgorithmSettings algorithm;
  bool operator==(const CaseData&) const = default;

  const GeneratingUnit* find_unit(const std::string& id) const;
  const GasWell* find_well(const std::string& id) const;
  const std::string& reference_node() const;
};

// A producer is the set of assets sharing an owner id; its market and
// strategic flag come from those assets.
struct Producer {
  std::string id;
  Market market = Market::kPower;
  bool strategic = false;
  std::vector<std::string> assets;  // unit or well ids, declaration order
};

// Producers in order of first appearance (units first, then wells).
std::vector<Producer> producers(const CaseData& data);
std::vector<Producer> strategic_producers(const CaseData& data, Market market);

struct BidProfile {
  std::map<std::string, std::vector<double>> unit_bids;  // $/MWh per block
  std::map<std::string, double> well_bids;               // $/Sm3
  bool operator==(const BidProfile&) const = default;
};

struct CouplingState {
  std::map<std::string, double> lmep;        // power node -> $/MWh
  std::map<std::string, double> lmgp;        // gas node -> $/Sm3
  std::map<std::string, double> p2g_demand;  // facility -> MW
  std::map<std::string, std::vector<double>> gasfired_dispatch;  // unit -> MW
  bool operator==(const CouplingState&) const = default;
};

// Bids at the caps (alpha_max / delta_max) for every strategic asset.
BidProfile initial_bids(const CaseData& data);
// Bids equal to true marginal cost; gas-fired units price fuel at the
// coupling's LMGP.
BidProfile truthful_bids(const CaseData& data, const CouplingState& coupling);
// Throws std::invalid_argument on a missing bid, a box violation or a
// decreasing block sequence.
void check_bids(const CaseData& data, const BidProfile& bids);

// Starting point of the outer loop: LMGP = delta_max, LMEP = alpha_max,
// zero P2G demand and zero gas-fired dispatch.
CouplingState initial_coupling(const CaseData& data);

// True cost of one MWh from a block: the declared marginal cost, or the fuel
// cost tau * lmgp / efficiency for gas-fired units.
double unit_block_cost(const CaseData& data, const GeneratingUnit& unit,
                       int block, const CouplingState& coupling);

struct Diagnostic {
  std::string subject;  // offending id, or the section name
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};
std::string to_string(const Diagnostic& d);

std::vector<Diagnostic> validate_topology(const CaseData& data);

class CaseParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CaseValidationError : public std::runtime_error {
 public:
  explicit CaseValidationError(std::vector<Diagnostic> diagnostics);
  const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

// Parsing checks the schema only; load_case and parse_case additionally run
// validate_topology and throw CaseValidationError on any diagnostic.
CaseData case_from_json(const nlohmann::json& j);
nlohmann::json case_to_json(const CaseData& data);
CaseData parse_case(const std::string& text);
CaseData load_case(const std::string& path);
void save_case(const CaseData& data, const std::string& path);

// Copy with every line and pipeline capacity removed.
CaseData relaxed_capacities(const CaseData& data);
// Copy with power loads scaled by `elr` and gas loads by `glr`.
CaseData scale_loads(const CaseData& data, double elr, double glr);

nlohmann::json to_json(const BidProfile& bids);
BidProfile bids_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CouplingState& coupling);
CouplingState coupling_from_json(const nlohmann::json& j);

}  // namespace gepec

#endif  // GEPEC_CASE_MODEL_HPP_

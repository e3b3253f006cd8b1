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

// Small hand-built cases shared by the tests.

#ifndef GEPEC_TESTS_TEST_CASES_HPP_
#define GEPEC_TESTS_TEST_CASES_HPP_

#include <algorithm>
#include <random>
#include <string>
#include <vector>

#include "gepec/case_model.hpp"

namespace gepec::testing {

inline std::string data_file(const std::string& name) {
  return std::string(GEPEC_DATA_DIR) + "/" + name;
}

inline GeneratingUnit unit(std::string id, std::string node, std::string owner,
                           bool strategic, std::vector<EnergyBlock> blocks) {
  GeneratingUnit u;
  u.id = std::move(id);
  u.node = std::move(node);
  u.owner = std::move(owner);
  u.strategic = strategic;
  u.blocks = std::move(blocks);
  return u;
}

inline GeneratingUnit gas_unit(std::string id, std::string node,
                               std::string gas_node, std::string owner,
                               bool strategic, double capacity,
                               double efficiency) {
  GeneratingUnit u = unit(std::move(id), std::move(node), std::move(owner),
                          strategic, {{capacity, 0.0, efficiency}});
  u.gas_fired = true;
  u.gas_node = std::move(gas_node);
  return u;
}

inline GasWell well(std::string id, std::string node, std::string owner,
                    bool strategic, double capacity, double cost) {
  return {std::move(id), std::move(node), std::move(owner), strategic,
          capacity, cost};
}

inline Load power_load(std::string id, std::string node, double demand) {
  return {std::move(id), std::move(node), demand, Market::kPower};
}

inline Load gas_load(std::string id, std::string node, double demand) {
  return {std::move(id), std::move(node), demand, Market::kGas};
}

// One bus and one gas node, nothing on them yet.
inline CaseData skeleton() {
  CaseData c;
  c.name = "skeleton";
  c.power.nodes = {{"b1", true}};
  c.gas.nodes = {{"g1"}};
  c.constants = {10.0, 40.0, 2.0};
  return c;
}

// Two buses joined by one line; the second bus holds the load.
inline CaseData two_bus(double line_cap, double cheap, double dear,
                        double load) {
  CaseData c = skeleton();
  c.power.nodes = {{"b1", true}, {"b2", false}};
  c.power.lines = {{"L12", "b1", "b2", 1000.0, line_cap}};
  c.power.units = {unit("C", "b1", "F1", false, {{100.0, cheap, 1.0}}),
                   unit("E", "b2", "F2", false, {{100.0, dear, 1.0}})};
  c.power.loads = {power_load("D2", "b2", load)};
  c.gas.wells = {well("W", "g1", "GF", false, 1000.0, 0.5)};
  return c;
}

// Random desk-scale instance (<= 6 buses, <= 7 gas nodes) with a coupling
// state and bids. Every bus and gas node can serve its own load, so both
// clearings are feasible whatever the line limits.
struct RandomInstance {
  CaseData data;
  CouplingState coupling;
  BidProfile bids;
};

inline RandomInstance random_instance(std::mt19937_64& rng) {
  auto uni = [&rng](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  auto pick = [&rng](int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng);
  };
  RandomInstance r;
  CaseData& c = r.data;
  c.name = "random";
  c.constants = {10.0, 40.0, 2.0};
  const int nb = 2 + pick(5);
  const int ng = 2 + pick(6);
  auto bus = [](int k) { return "b" + std::to_string(k + 1); };
  auto gnode = [](int k) { return "g" + std::to_string(k + 1); };
  for (int k = 0; k < nb; ++k) c.power.nodes.push_back({bus(k), k == 0});
  for (int k = 0; k < ng; ++k) c.gas.nodes.push_back({gnode(k)});

  for (int k = 1; k < nb; ++k) {
    c.power.lines.push_back({"L" + std::to_string(k), bus(pick(k)), bus(k),
                             uni(200, 2000), uni(30, 300)});
  }
  if (nb > 2) {
    c.power.lines.push_back({"Lx", bus(0), bus(nb - 1), uni(200, 2000),
                             uni(30, 300)});
  }

  const bool with_p2g = pick(2) == 0;
  const int p2g_bus = pick(nb);
  const double p2g_cap = 40.0;
  for (int k = 0; k < nb; ++k) {
    double local = 0.0;
    if (k > 0 && pick(10) < 7) {
      local = uni(10, 150);
      c.power.loads.push_back(power_load("D" + bus(k), bus(k), local));
    }
    if (with_p2g && k == p2g_bus) local += p2g_cap;
    const double cap = local + uni(20, 100);
    std::vector<EnergyBlock> blocks;
    if (pick(2) == 0) {
      blocks = {{cap, uni(5, 35), 1.0}};
    } else {
      const double a = uni(5, 25);
      blocks = {{0.5 * cap, a, 1.0}, {0.5 * cap, a + uni(0, 10), 1.0}};
    }
    c.power.units.push_back(
        unit("N" + bus(k), bus(k), "NSP" + std::to_string(k), false, blocks));
  }
  const int n_strategic = 1 + pick(3);
  for (int k = 0; k < n_strategic; ++k) {
    const std::string id = "S" + std::to_string(k + 1);
    const std::string owner = "SEP" + std::to_string(1 + pick(2));
    if (pick(3) == 0) {
      c.power.units.push_back(gas_unit(id, bus(pick(nb)), gnode(pick(ng)),
                                       owner, true, uni(20, 100),
                                       uni(0.45, 0.6)));
    } else if (pick(2) == 0) {
      c.power.units.push_back(
          unit(id, bus(pick(nb)), owner, true, {{uni(20, 100), uni(5, 30), 1.0}}));
    } else {
      const double a = uni(5, 25);
      c.power.units.push_back(unit(id, bus(pick(nb)), owner, true,
                                   {{uni(20, 60), a, 1.0},
                                    {uni(20, 60), a + uni(0, 10), 1.0}}));
    }
  }
  if (pick(2) == 0) {
    c.power.units.push_back(gas_unit("NG", bus(pick(nb)), gnode(pick(ng)),
                                     "NSPG", false, uni(20, 100), 0.5));
  }

  for (int k = 1; k < ng; ++k) {
    const int from = pick(k);
    c.gas.pipelines.push_back({"C" + std::to_string(k), gnode(from), gnode(k),
                               uni(500, 5000), pick(3) == 0});
  }
  for (int k = 0; k < ng; ++k) {
    double local = 0.0;
    if (pick(10) < 6) {
      local = uni(200, 2000);
      c.gas.loads.push_back(gas_load("Q" + gnode(k), gnode(k), local));
    }
    c.gas.wells.push_back(well("W" + gnode(k), gnode(k),
                               "NSG" + std::to_string(k), false, local + 4000,
                               uni(0.3, 1.5)));
  }
  const int n_wells = 1 + pick(2);
  for (int k = 0; k < n_wells; ++k) {
    c.gas.wells.push_back(well("G" + std::to_string(k + 1), gnode(pick(ng)),
                               "SGP" + std::to_string(k + 1), true,
                               uni(500, 3000), uni(0.2, 1.0)));
  }
  if (with_p2g) {
    c.p2g.push_back({"Z", bus(p2g_bus), gnode(pick(ng)), uni(0.5, 0.7),
                     p2g_cap});
  }

  CouplingState& k = r.coupling;
  k = initial_coupling(c);
  for (auto& [_, v] : k.lmgp) v = uni(0.3, 2.0);
  for (auto& [_, v] : k.lmep) v = uni(5, 40);
  for (auto& [_, v] : k.p2g_demand) v = uni(0, p2g_cap);
  for (const GeneratingUnit& u : c.power.units) {
    if (!u.gas_fired) continue;
    std::vector<double>& d = k.gasfired_dispatch[u.id];
    d.assign(u.blocks.size(), 0.0);
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      d[b] = uni(0, u.blocks[b].capacity);
    }
  }

  r.bids = initial_bids(c);
  for (auto& [_, b] : r.bids.unit_bids) {
    for (double& x : b) x = uni(0, c.constants.alpha_max);
    std::sort(b.begin(), b.end());
  }
  for (auto& [_, x] : r.bids.well_bids) x = uni(0, c.constants.delta_max);
  return r;
}

}  // namespace gepec::testing

#endif  // GEPEC_TESTS_TEST_CASES_HPP_

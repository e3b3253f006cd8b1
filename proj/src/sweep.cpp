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

#include "gepec/sweep.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace gepec {

void RatioRange::validate(const std::string& what) const {
  if (!(start > 0.0) || !(stop >= start) || !(step > 0.0)) {
    throw std::invalid_argument(what +
                                " range needs 0 < start <= stop and step > 0");
  }
}

std::vector<double> RatioRange::values() const {
  std::vector<double> v;
  const long n = std::lround(std::floor((stop - start) / step + 1e-9));
  for (long i = 0; i <= n; ++i) v.push_back(start + step * static_cast<double>(i));
  return v;
}

RatioRange parse_range(const std::string& text) {
  RatioRange r;
  std::vector<double> parts;
  std::stringstream in(text);
  std::string item;
  try {
    while (std::getline(in, item, ':')) {
      size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("bad ratio range '" + text + "'");
  }
  if (parts.size() == 1) {
    r.start = r.stop = parts[0];
    r.step = 1.0;
  } else if (parts.size() == 3) {
    r.start = parts[0];
    r.stop = parts[1];
    r.step = parts[2];
  } else {
    throw std::invalid_argument("ratio range must be 'a:b:s' or a number");
  }
  return r;
}

void SweepSpec::validate() const {
  elr.validate("ELR");
  glr.validate("GLR");
}

double power_production_cost(const CaseData& data, const ElectricityClearing& e,
                             const CouplingState& coupling) {
  double c = 0.0;
  for (const GeneratingUnit& u : data.power.units) {
    const std::vector<double>& p = e.dispatch.at(u.id);
    for (size_t b = 0; b < p.size(); ++b) {
      c += unit_block_cost(data, u, static_cast<int>(b), coupling) * p[b];
    }
  }
  return c;
}

double gas_production_cost(const CaseData& data, const GasClearing& g) {
  double c = 0.0;
  for (const GasWell& w : data.gas.wells) c += w.marginal_cost * g.well_output.at(w.id);
  return c;
}

double gas_to_power_volume(const EquilibriumReport& report) {
  double v = 0.0;
  for (const ExchangeRow& r : report.exchange) {
    if (r.kind == "gas_to_power") v += r.value;
  }
  return v;
}

namespace {

CaseData variant(const CaseData& data, bool congested) {
  return congested ? data : relaxed_capacities(data);
}

}  // namespace

SweepResult run_sweep(const CaseData& data, const SweepSpec& spec,
                      const DaConfig& cfg) {
  spec.validate();
  cfg.validate();
  const CaseData base = variant(data, spec.congested);
  SweepResult res;
  for (double elr : spec.elr.values()) {
    for (double glr : spec.glr.values()) {
      SweepCell cell;
      cell.elr = elr;
      cell.glr = glr;
      const EquilibriumReport rep = outer_da(scale_loads(base, elr, glr), cfg);
      cell.status = rep.status;
      cell.message = rep.message;
      cell.converged = rep.converged;
      cell.feasible = !rep.clearing_infeasible;
      if (rep.converged && rep.electricity && rep.gas) {
        cell.lmep = rep.electricity->lmep;
        cell.lmgp = rep.gas->lmgp;
        cell.power_cost = power_production_cost(rep.data, *rep.electricity, rep.coupling);
        cell.gas_cost = gas_production_cost(rep.data, *rep.gas);
        cell.gas_to_power = gas_to_power_volume(rep);
      }
      res.cells.push_back(std::move(cell));
    }
  }
  for (const SweepCell& bad : res.cells) {
    if (bad.feasible) continue;
    for (const SweepCell& c : res.cells) {
      const bool larger = c.elr >= bad.elr && c.glr >= bad.glr &&
                          (c.elr > bad.elr || c.glr > bad.glr);
      if (larger && c.feasible) {
        std::ostringstream msg;
        msg << "(" << c.elr << "," << c.glr << ") feasible although ("
            << bad.elr << "," << bad.glr << ") is not";
        res.feasibility_violations.push_back(msg.str());
      }
    }
  }
  return res;
}

CongestionComparison compare_congestion(const CaseData& data,
                                        const DaConfig& cfg) {
  CongestionComparison c;
  c.uncongested = outer_da(variant(data, false), cfg);
  c.congested = outer_da(variant(data, true), cfg);
  auto costs = [](const EquilibriumReport& r, double& power, double& gas,
                  double& g2p) {
    if (r.electricity) power = power_production_cost(r.data, *r.electricity, r.coupling);
    if (r.gas) gas = gas_production_cost(r.data, *r.gas);
    g2p = gas_to_power_volume(r);
  };
  costs(c.uncongested, c.power_cost_uncongested, c.gas_cost_uncongested,
        c.gas_to_power_uncongested);
  costs(c.congested, c.power_cost_congested, c.gas_cost_congested,
        c.gas_to_power_congested);
  const double tol = 1e-6;
  for (const auto& [u, b] : c.congested.bids.unit_bids) {
    if (!data.find_unit(u)->strategic) continue;
    for (size_t k = 0; k < b.size(); ++k) {
      if (b[k] >= data.constants.alpha_max - tol) {
        c.bids_at_cap.push_back(u + "#" + std::to_string(k + 1));
      }
    }
  }
  for (const auto& [w, b] : c.congested.bids.well_bids) {
    if (data.find_well(w)->strategic && b >= data.constants.delta_max - tol) {
      c.bids_at_cap.push_back(w);
    }
  }
  return c;
}

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

}  // namespace

std::string sweep_prices_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "elr,glr,market,node,price\n";
  for (const SweepCell& c : r.cells) {
    for (const auto& [n, p] : c.lmep) {
      out << num(c.elr) << ',' << num(c.glr) << ",power," << n << ',' << num(p) << '\n';
    }
    for (const auto& [n, p] : c.lmgp) {
      out << num(c.elr) << ',' << num(c.glr) << ",gas," << n << ',' << num(p) << '\n';
    }
  }
  return out.str();
}

std::string sweep_cells_csv(const SweepResult& r) {
  std::ostringstream out;
  out << "elr,glr,status,converged,power_cost,gas_cost,gas_to_power\n";
  for (const SweepCell& c : r.cells) {
    out << num(c.elr) << ',' << num(c.glr) << ',' << c.status << ','
        << (c.converged ? 1 : 0) << ',' << num(c.power_cost) << ','
        << num(c.gas_cost) << ',' << num(c.gas_to_power) << '\n';
  }
  return out.str();
}

nlohmann::json to_json(const CongestionComparison& c) {
  return {{"uncongested",
           {{"status", c.uncongested.status},
            {"power_cost", c.power_cost_uncongested},
            {"gas_cost", c.gas_cost_uncongested},
            {"gas_to_power", c.gas_to_power_uncongested},
            {"lmep", c.uncongested.electricity ? c.uncongested.electricity->lmep
                                               : std::map<std::string, double>{}},
            {"lmgp", c.uncongested.gas ? c.uncongested.gas->lmgp
                                       : std::map<std::string, double>{}}}},
          {"congested",
           {{"status", c.congested.status},
            {"power_cost", c.power_cost_congested},
            {"gas_cost", c.gas_cost_congested},
            {"gas_to_power", c.gas_to_power_congested},
            {"lmep", c.congested.electricity ? c.congested.electricity->lmep
                                             : std::map<std::string, double>{}},
            {"lmgp", c.congested.gas ? c.congested.gas->lmgp
                                     : std::map<std::string, double>{}}}},
          {"power_cost_delta", c.power_cost_congested - c.power_cost_uncongested},
          {"gas_cost_delta", c.gas_cost_congested - c.gas_cost_uncongested},
          {"gas_to_power_delta", c.gas_to_power_congested - c.gas_to_power_uncongested},
          {"bids_at_cap", c.bids_at_cap}};
}

}  // namespace gepec

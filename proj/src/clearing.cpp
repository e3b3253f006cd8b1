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

#include "gepec/clearing.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "gepec/solver_backend.hpp"

namespace gepec {

using lp::Relation;
using lp::Term;

namespace {

// Pulls values within solver tolerance onto the bound they sit at, so that
// downstream relative comparisons do not see round-off.
double snap(double v, double lo, double up) {
  const double tol = 1e-9;
  if (std::isfinite(lo) && std::abs(v - lo) <= tol * (1.0 + std::abs(lo))) {
    return lo;
  }
  if (std::isfinite(up) && std::abs(v - up) <= tol * (1.0 + std::abs(up))) {
    return up;
  }
  if (std::abs(v) <= tol) return 0.0;
  return v;
}

double snap_var(const lp::LinearProgram& lp, const lp::LpSolution& sol,
                int j) {
  const lp::Variable& v = lp.variable(j);
  return snap(sol.primal[j], v.lower, v.upper);
}

double dual_tidy(double v) { return std::abs(v) <= 1e-10 ? 0.0 : v; }

double offer(const CaseData& data, const GeneratingUnit& u, int b,
             const BidProfile& bids, const CouplingState& coupling) {
  if (u.strategic) {
    auto it = bids.unit_bids.find(u.id);
    if (it == bids.unit_bids.end() || it->second.size() != u.blocks.size()) {
      throw std::invalid_argument("missing bids for strategic unit " + u.id);
    }
    return it->second[b];
  }
  return unit_block_cost(data, u, b, coupling);
}

double well_offer(const GasWell& w, const BidProfile& bids) {
  if (!w.strategic) return w.marginal_cost;
  auto it = bids.well_bids.find(w.id);
  if (it == bids.well_bids.end()) {
    throw std::invalid_argument("missing bid for strategic well " + w.id);
  }
  return it->second;
}

double lookup(const std::map<std::string, double>& m, const std::string& key,
              const char* what) {
  auto it = m.find(key);
  if (it == m.end()) {
    throw std::invalid_argument(std::string("coupling has no ") + what +
                                " for " + key);
  }
  return it->second;
}

// Solves the clearing LP, then moves along its optimal face to dispatch as
// much strategic quantity as possible. The face is fixed exactly through the
// first solve's duals: columns with a nonzero reduced cost stay at their
// bound and rows with a nonzero dual stay active. Prices come from the first
// solve and remain complementary to the new dispatch.
lp::LpSolution solve(const lp::LinearProgram& lp,
                     const std::vector<int>& priority) {
  auto backend = lp::default_backend();
  lp::LpSolution first = backend->solve(lp);
  if (first.status != lp::LpStatus::kOptimal || priority.empty()) return first;
  const double tol = 1e-9;
  lp::LinearProgram face;
  for (int j = 0; j < lp.num_variables(); ++j) {
    const lp::Variable& v = lp.variable(j);
    double lo = v.lower, up = v.upper;
    const double d = first.reduced_cost[j];
    if (d > tol) up = lo;
    if (d < -tol) lo = up;
    face.add_variable(v.name, lo, up);
  }
  for (int j : priority) face.set_cost(j, -1.0);
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const lp::Constraint& c = lp.constraint(i);
    const lp::Relation rel =
        std::abs(first.row_dual[i]) > tol ? lp::Relation::kEqual : c.relation;
    face.add_constraint(c.name, c.terms, rel, c.rhs);
  }
  const lp::LpSolution second = backend->solve(face);
  if (second.status == lp::LpStatus::kOptimal) first.primal = second.primal;
  return first;
}

}  // namespace

ElectricityModel build_electricity_model(const CaseData& data,
                                         const BidProfile& bids,
                                         const CouplingState& coupling) {
  ElectricityModel m;
  lp::LinearProgram& lp = m.lp;
  std::map<std::string, std::vector<Term>> balance;
  std::map<std::string, double> rhs;
  for (const PowerNode& n : data.power.nodes) {
    m.theta_var[n.id] = lp.add_variable("theta_" + n.id, -kPi, kPi);
    balance[n.id];
    rhs[n.id] = 0.0;
  }
  for (const GeneratingUnit& u : data.power.units) {
    if (!balance.contains(u.node)) {
      throw std::invalid_argument("unit " + u.id + " at unknown node");
    }
    std::vector<int>& vars = m.block_var[u.id];
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      const int j = lp.add_variable(
          "P_" + u.id + "_" + std::to_string(b + 1), 0.0, u.blocks[b].capacity,
          offer(data, u, static_cast<int>(b), bids, coupling));
      vars.push_back(j);
      balance[u.node].push_back({j, 1.0});
    }
  }
  for (const PowerLine& l : data.power.lines) {
    if (!balance.contains(l.from_node) || !balance.contains(l.to_node)) {
      throw std::invalid_argument("line " + l.id + " at unknown node");
    }
    const int a = m.theta_var[l.from_node];
    const int b = m.theta_var[l.to_node];
    const double s = l.susceptance;
    balance[l.from_node].push_back({a, -s});
    balance[l.from_node].push_back({b, s});
    balance[l.to_node].push_back({a, s});
    balance[l.to_node].push_back({b, -s});
  }
  for (const Load& d : data.power.loads) {
    if (!rhs.contains(d.node)) {
      throw std::invalid_argument("load " + d.id + " at unknown node");
    }
    rhs[d.node] += d.demand;
    m.fixed_withdrawal += d.demand;
  }
  for (const P2GFacility& z : data.p2g) {
    if (!rhs.contains(z.power_node)) {
      throw std::invalid_argument("p2g " + z.id + " at unknown node");
    }
    const double pz = lookup(coupling.p2g_demand, z.id, "P2G demand");
    rhs[z.power_node] += pz;
    m.fixed_withdrawal += pz;
  }
  for (const PowerNode& n : data.power.nodes) {
    m.balance_row[n.id] = lp.add_constraint("balance_" + n.id, balance[n.id],
                                            Relation::kEqual, rhs[n.id]);
  }
  for (const PowerLine& l : data.power.lines) {
    if (!l.capacity) continue;
    const std::vector<Term> flow = {{m.theta_var[l.from_node], l.susceptance},
                                    {m.theta_var[l.to_node], -l.susceptance}};
    m.line_max_row[l.id] = lp.add_constraint("line_max_" + l.id, flow,
                                             Relation::kLessEqual, *l.capacity);
    m.line_min_row[l.id] = lp.add_constraint(
        "line_min_" + l.id, flow, Relation::kGreaterEqual, -*l.capacity);
  }
  m.reference_row = lp.add_constraint(
      "theta_ref", {{m.theta_var[data.reference_node()], 1.0}},
      Relation::kEqual, 0.0);
  return m;
}

lp::LinearProgram build_electricity_lp(const CaseData& data,
                                       const BidProfile& bids,
                                       const CouplingState& coupling) {
  return build_electricity_model(data, bids, coupling).lp;
}

GasModel build_gas_model(const CaseData& data, const BidProfile& bids,
                         const CouplingState& coupling) {
  GasModel m;
  lp::LinearProgram& lp = m.lp;
  const double tau = data.constants.tau;
  std::map<std::string, std::vector<Term>> balance;
  std::map<std::string, double> rhs;
  for (const GasNode& n : data.gas.nodes) {
    balance[n.id];
    rhs[n.id] = 0.0;
  }
  auto node_check = [&](const std::string& node, const std::string& who) {
    if (!balance.contains(node)) {
      throw std::invalid_argument(who + " at unknown gas node " + node);
    }
  };
  for (const GasWell& w : data.gas.wells) {
    node_check(w.node, w.id);
    const int j = lp.add_variable("q_" + w.id, 0.0, w.capacity,
                                  well_offer(w, bids));
    m.well_var[w.id] = j;
    balance[w.node].push_back({j, 1.0});
  }
  for (const GasPipeline& p : data.gas.pipelines) {
    node_check(p.from_node, p.id);
    node_check(p.to_node, p.id);
    double lo = p.active ? 0.0 : -lp::kInf;
    double up = lp::kInf;
    if (p.capacity) {
      up = *p.capacity;
      if (!p.active) lo = -*p.capacity;
    }
    const int j = lp.add_variable("f_" + p.id, lo, up);
    m.pipeline_var[p.id] = j;
    balance[p.from_node].push_back({j, -1.0});
    balance[p.to_node].push_back({j, 1.0});
  }
  for (const P2GFacility& z : data.p2g) {
    node_check(z.gas_node, z.id);
    const double beta = lookup(coupling.lmep, z.power_node, "LMEP");
    const int j = lp.add_variable("Pz_" + z.id, 0.0,
                                  z.power_capacity.value_or(lp::kInf), beta);
    m.p2g_var[z.id] = j;
    balance[z.gas_node].push_back({j, tau * z.efficiency});
  }
  for (const Load& d : data.gas.loads) {
    node_check(d.node, d.id);
    rhs[d.node] += d.demand;
    m.fixed_withdrawal += d.demand;
  }
  for (const GeneratingUnit& u : data.power.units) {
    if (!u.gas_fired) continue;
    node_check(u.gas_node, u.id);
    auto it = coupling.gasfired_dispatch.find(u.id);
    if (it == coupling.gasfired_dispatch.end() ||
        it->second.size() != u.blocks.size()) {
      throw std::invalid_argument("coupling has no dispatch for unit " + u.id);
    }
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      const double fuel = tau * it->second[b] / u.blocks[b].efficiency;
      rhs[u.gas_node] += fuel;
      m.fixed_withdrawal += fuel;
    }
  }
  for (const GasNode& n : data.gas.nodes) {
    if (balance[n.id].empty()) {
      // A bare node still needs a row so that it carries a price; give it a
      // zero-cost placeholder variable fixed at 0.
      const int j = lp.add_variable("idle_" + n.id, 0.0, 0.0);
      balance[n.id].push_back({j, 1.0});
    }
    m.balance_row[n.id] = lp.add_constraint("gas_balance_" + n.id,
                                            balance[n.id], Relation::kEqual,
                                            rhs[n.id]);
  }
  return m;
}

lp::LinearProgram build_gas_lp(const CaseData& data, const BidProfile& bids,
                               const CouplingState& coupling) {
  return build_gas_model(data, bids, coupling).lp;
}

ElectricityClearing clear_electricity(const CaseData& data,
                                      const ElectricityModel& m) {
  ElectricityClearing out;
  out.lp = m.lp;
  std::vector<int> priority;
  for (const GeneratingUnit& u : data.power.units) {
    if (!u.strategic) continue;
    for (int j : m.block_var.at(u.id)) priority.push_back(j);
  }
  out.solution = solve(m.lp, priority);
  const lp::LpSolution& s = out.solution;
  if (s.status != lp::LpStatus::kOptimal) {
    double cap = 0.0;
    for (const GeneratingUnit& u : data.power.units) cap += u.capacity();
    std::ostringstream msg;
    msg << "electricity clearing is " << lp::to_string(s.status) << ": ";
    if (m.fixed_withdrawal > cap) {
      msg << "demand " << m.fixed_withdrawal << " MW exceeds total capacity "
          << cap << " MW";
    } else {
      msg << "line limits or angle bounds prevent serving "
          << m.fixed_withdrawal << " MW";
    }
    throw InfeasibleClearing(msg.str());
  }
  out.objective = s.objective;
  for (const auto& [unit, vars] : m.block_var) {
    for (int j : vars) {
      out.dispatch[unit].push_back(snap_var(m.lp, s, j));
      const double d = dual_tidy(s.reduced_cost[j]);
      out.block_dual_min[unit].push_back(std::max(0.0, d));
      out.block_dual_max[unit].push_back(std::max(0.0, -d));
    }
  }
  for (const auto& [node, j] : m.theta_var) {
    out.theta[node] = snap_var(m.lp, s, j);
    const double d = dual_tidy(s.reduced_cost[j]);
    out.angle_dual_min[node] = std::max(0.0, d);
    out.angle_dual_max[node] = std::max(0.0, -d);
  }
  for (const auto& [node, i] : m.balance_row) {
    out.lmep[node] = dual_tidy(s.row_dual[i]);
  }
  for (const PowerLine& l : data.power.lines) {
    const double f = l.susceptance * (s.primal[m.theta_var.at(l.from_node)] -
                                      s.primal[m.theta_var.at(l.to_node)]);
    out.flow[l.id] = l.capacity ? snap(f, -*l.capacity, *l.capacity)
                                : snap(f, -lp::kInf, lp::kInf);
  }
  for (const auto& [line, i] : m.line_max_row) {
    out.line_dual_max[line] = dual_tidy(s.row_dual[i]);
  }
  for (const auto& [line, i] : m.line_min_row) {
    out.line_dual_min[line] = dual_tidy(s.row_dual[i]);
  }
  out.reference_dual = dual_tidy(s.row_dual[m.reference_row]);
  return out;
}

ElectricityClearing clear_electricity(const CaseData& data,
                                      const BidProfile& bids,
                                      const CouplingState& coupling) {
  return clear_electricity(data, build_electricity_model(data, bids, coupling));
}

GasClearing clear_gas(const CaseData& data, const GasModel& m) {
  GasClearing out;
  out.lp = m.lp;
  std::vector<int> priority;
  for (const GasWell& w : data.gas.wells) {
    if (w.strategic) priority.push_back(m.well_var.at(w.id));
  }
  out.solution = solve(m.lp, priority);
  const lp::LpSolution& s = out.solution;
  if (s.status != lp::LpStatus::kOptimal) {
    double cap = 0.0;
    bool unbounded_p2g = false;
    for (const GasWell& w : data.gas.wells) cap += w.capacity;
    for (const P2GFacility& z : data.p2g) {
      if (z.power_capacity) {
        cap += data.constants.tau * z.efficiency * *z.power_capacity;
      } else {
        unbounded_p2g = true;
      }
    }
    std::ostringstream msg;
    msg << "gas clearing is " << lp::to_string(s.status) << ": ";
    if (!unbounded_p2g && m.fixed_withdrawal > cap) {
      msg << "demand " << m.fixed_withdrawal
          << " Sm3/h exceeds well and P2G capability " << cap << " Sm3/h";
    } else {
      msg << "pipeline limits prevent serving " << m.fixed_withdrawal
          << " Sm3/h";
    }
    throw InfeasibleClearing(msg.str());
  }
  out.objective = s.objective;
  auto bound_duals = [&](int j, std::map<std::string, double>& lo,
                         std::map<std::string, double>& up,
                         const std::string& id) {
    const double d = dual_tidy(s.reduced_cost[j]);
    lo[id] = std::max(0.0, d);
    up[id] = std::max(0.0, -d);
  };
  for (const auto& [id, j] : m.well_var) {
    out.well_output[id] = snap_var(m.lp, s, j);
    bound_duals(j, out.well_dual_min, out.well_dual_max, id);
  }
  for (const auto& [id, j] : m.pipeline_var) {
    out.pipeline_flow[id] = snap_var(m.lp, s, j);
    bound_duals(j, out.pipeline_dual_min, out.pipeline_dual_max, id);
  }
  for (const auto& [id, j] : m.p2g_var) {
    out.p2g_demand[id] = snap_var(m.lp, s, j);
    bound_duals(j, out.p2g_dual_min, out.p2g_dual_max, id);
  }
  for (const auto& [node, i] : m.balance_row) {
    out.lmgp[node] = dual_tidy(s.row_dual[i]);
  }
  return out;
}

GasClearing clear_gas(const CaseData& data, const BidProfile& bids,
                      const CouplingState& coupling) {
  return clear_gas(data, build_gas_model(data, bids, coupling));
}

void update_coupling(const ElectricityClearing& e, CouplingState& coupling) {
  coupling.lmep = e.lmep;
  for (auto& [unit, dispatch] : coupling.gasfired_dispatch) {
    dispatch = e.dispatch.at(unit);
  }
}

void update_coupling(const GasClearing& g, CouplingState& coupling) {
  coupling.lmgp = g.lmgp;
  coupling.p2g_demand = g.p2g_demand;
}

std::map<std::string, double> gas_to_power(const CaseData& data,
                                           const ElectricityClearing& e) {
  std::map<std::string, double> out;
  for (const GeneratingUnit& u : data.power.units) {
    if (!u.gas_fired) continue;
    double fuel = 0.0;
    const std::vector<double>& p = e.dispatch.at(u.id);
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      fuel += data.constants.tau * p[b] / u.blocks[b].efficiency;
    }
    out[u.id] = fuel;
  }
  return out;
}

nlohmann::json to_json(const ElectricityClearing& e) {
  return {{"objective", e.objective},
          {"dispatch", e.dispatch},
          {"lmep", e.lmep},
          {"theta", e.theta},
          {"flow", e.flow},
          {"line_dual_max", e.line_dual_max},
          {"line_dual_min", e.line_dual_min},
          {"block_dual_max", e.block_dual_max},
          {"block_dual_min", e.block_dual_min},
          {"angle_dual_max", e.angle_dual_max},
          {"angle_dual_min", e.angle_dual_min},
          {"reference_dual", e.reference_dual}};
}

nlohmann::json to_json(const GasClearing& g) {
  return {{"objective", g.objective},
          {"well_output", g.well_output},
          {"pipeline_flow", g.pipeline_flow},
          {"p2g_demand", g.p2g_demand},
          {"lmgp", g.lmgp},
          {"well_dual_max", g.well_dual_max},
          {"well_dual_min", g.well_dual_min},
          {"pipeline_dual_max", g.pipeline_dual_max},
          {"pipeline_dual_min", g.pipeline_dual_min},
          {"p2g_dual_max", g.p2g_dual_max},
          {"p2g_dual_min", g.p2g_dual_min}};
}

std::string clearing_csv(const ElectricityClearing* e, const GasClearing* g) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "market,kind,id,block,value\n";
  if (e != nullptr) {
    for (const auto& [node, v] : e->lmep) {
      out << "power,price," << node << ",," << v << '\n';
    }
    for (const auto& [unit, blocks] : e->dispatch) {
      for (size_t b = 0; b < blocks.size(); ++b) {
        out << "power,dispatch," << unit << ',' << b + 1 << ',' << blocks[b]
            << '\n';
      }
    }
    for (const auto& [line, v] : e->flow) {
      out << "power,flow," << line << ",," << v << '\n';
    }
  }
  if (g != nullptr) {
    for (const auto& [node, v] : g->lmgp) {
      out << "gas,price," << node << ",," << v << '\n';
    }
    for (const auto& [well, v] : g->well_output) {
      out << "gas,output," << well << ",," << v << '\n';
    }
    for (const auto& [pipe, v] : g->pipeline_flow) {
      out << "gas,flow," << pipe << ",," << v << '\n';
    }
    for (const auto& [z, v] : g->p2g_demand) {
      out << "gas,p2g," << z << ",," << v << '\n';
    }
  }
  return out.str();
}

}  // namespace gepec

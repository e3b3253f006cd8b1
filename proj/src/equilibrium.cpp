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

#include "gepec/equilibrium.hpp"

#include "gepec/lp_text.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gepec {

using nlohmann::json;

DaConfig DaConfig::from(const AlgorithmSettings& s) {
  DaConfig c;
  c.epsilon = s.epsilon;
  c.r_max = s.r_max;
  c.milp_gap = s.milp_gap;
  c.big_m_dual = s.big_m_dual;
  return c;
}

void DaConfig::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
  if (r_max < 1) throw std::invalid_argument("r_max must be >= 1");
  if (!(milp_gap >= 0.0 && milp_gap < 1.0)) {
    throw std::invalid_argument("MILP gap must lie in [0, 1)");
  }
  if (!(big_m_dual > 0.0)) throw std::invalid_argument("big-M must be > 0");
  if (multi_start < 0) throw std::invalid_argument("multi_start must be >= 0");
}

bool relative_converged(double x_new, double x_old, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  if (x_new < 0.0 || x_old < 0.0) {
    throw std::invalid_argument("convergence test on a negative quantity");
  }
  return std::abs(x_new - x_old) <= eps * std::max(x_new, x_old);
}

namespace {

double relative_change(double a, double b) {
  const double m = std::max(std::abs(a), std::abs(b));
  return m == 0.0 ? 0.0 : std::abs(a - b) / m;
}

BestResponseOptions br_options(const DaConfig& cfg) {
  BestResponseOptions o;
  o.gap = cfg.milp_gap;
  o.big_m_dual = cfg.big_m_dual;
  return o;
}

// Round-0 bids of one market: the caps, or `start` when given.
BidProfile market_start(const CaseData& data, Market market,
                        const std::optional<BidProfile>& start) {
  const BidProfile caps = initial_bids(data);
  BidProfile out;
  for (const Producer& p : strategic_producers(data, market)) {
    for (const std::string& a : p.assets) {
      if (market == Market::kPower) {
        out.unit_bids[a] = start ? start->unit_bids.at(a) : caps.unit_bids.at(a);
      } else {
        out.well_bids[a] = start ? start->well_bids.at(a) : caps.well_bids.at(a);
      }
    }
  }
  return out;
}

std::vector<double> flat(const BidProfile& b) {
  std::vector<double> v;
  for (const auto& [_, x] : b.unit_bids) v.insert(v.end(), x.begin(), x.end());
  for (const auto& [_, x] : b.well_bids) v.push_back(x);
  return v;
}

void dump_model(const DaConfig& cfg, Market market, int round,
                const std::string& producer, const CaseData& data,
                const BidProfile& bids, const CouplingState& coupling,
                double big_m_dual) {
  namespace fs = std::filesystem;
  BigMPolicy policy;
  policy.dual = big_m_dual;
  const BestResponseMilp model =
      market == Market::kPower
          ? build_sep_milp(producer, data, bids, coupling, policy)
          : build_sgp_milp(producer, data, bids, coupling, policy);
  fs::create_directories(cfg.dump_dir);
  const std::string stem = (fs::path(cfg.dump_dir) /
                            (std::string(to_string(market)) + "_r" +
                             std::to_string(round) + "_" + producer))
                               .string();
  std::ofstream(stem + ".lp") << lp::lp_text(model.milp);
  std::ofstream(stem + ".map.csv") << symbol_table(model);
}

InnerResult inner_da(const CaseData& data, const CouplingState& coupling,
                     const DaConfig& cfg, Market market,
                     const std::optional<BidProfile>& start) {
  cfg.validate();
  InnerResult res;
  res.bids = market_start(data, market, start);
  const std::vector<Producer> players = strategic_producers(data, market);
  if (players.empty()) return res;
  const BestResponseOptions opts = br_options(cfg);
  for (int r = 1; r <= cfg.r_max; ++r) {
    const std::vector<double> before = flat(res.bids);
    for (const Producer& p : players) {
      BestResponse br;
      try {
        br = best_response(p.id, data, res.bids, coupling, opts);
      } catch (const MpccError& e) {
        throw MpccError("round " + std::to_string(r) + ": " + e.what());
      }
      if (!cfg.dump_dir.empty()) {
        dump_model(cfg, market, r, p.id, data, res.bids, coupling, br.big_m_dual);
      }
      for (const auto& [a, b] : br.bids.unit_bids) res.bids.unit_bids[a] = b;
      for (const auto& [a, b] : br.bids.well_bids) res.bids.well_bids[a] = b;
      res.solves.push_back({p.id, r, br.profit, br.bilinear_profit, br.gap,
                            br.nodes, br.big_m_dual, br.big_m_margin,
                            br.escalations, lp::to_string(br.status)});
    }
    res.rounds = r;
    const std::vector<double> after = flat(res.bids);
    bool done = true;
    res.residual = 0.0;
    for (size_t k = 0; k < after.size(); ++k) {
      res.residual = std::max(res.residual, relative_change(after[k], before[k]));
      done = done && relative_converged(after[k], before[k], cfg.epsilon);
    }
    if (done) return res;
  }
  res.flag = true;
  return res;
}

std::map<std::string, double> compared_quantities(const CaseData& data,
                                                  const CouplingState& c) {
  std::map<std::string, double> q;
  for (const P2GFacility& z : data.p2g) {
    auto it = c.p2g_demand.find(z.id);
    q["p2g:" + z.id] = it == c.p2g_demand.end() ? 0.0 : it->second;
  }
  for (const GeneratingUnit& u : data.power.units) {
    if (!u.gas_fired) continue;
    double total = 0.0;
    auto it = c.gasfired_dispatch.find(u.id);
    if (it != c.gasfired_dispatch.end()) {
      for (double x : it->second) total += x;
    }
    q["unit:" + u.id] = total;
  }
  return q;
}

void fill_results(EquilibriumReport& rep) {
  const CaseData& d = rep.data;
  rep.exchange.clear();
  rep.profits.clear();
  if (rep.electricity) {
    for (const auto& [id, v] : gas_to_power(d, *rep.electricity)) {
      rep.exchange.push_back({"gas_to_power", id, v});
    }
  }
  if (rep.gas) {
    for (const auto& [id, v] : rep.gas->p2g_demand) {
      rep.exchange.push_back({"power_to_gas", id, v});
    }
  }
  for (const Producer& p : producers(d)) {
    if (!p.strategic) continue;
    const bool power = p.market == Market::kPower;
    if ((power && !rep.electricity) || (!power && !rep.gas)) continue;
    rep.profits[p.id] =
        realized_profit(d, p, rep.electricity ? &*rep.electricity : nullptr,
                        rep.gas ? &*rep.gas : nullptr, rep.coupling);
  }
}

EquilibriumReport run_outer(const CaseData& data, const DaConfig& cfg,
                            const std::optional<BidProfile>& start) {
  cfg.validate();
  EquilibriumReport rep;
  rep.data = data;
  rep.config = cfg;
  rep.coupling = initial_coupling(data);
  rep.bids = initial_bids(data);
  std::map<std::string, double> previous;
  try {
    for (int r = 1; r <= cfg.r_max; ++r) {
      OuterRound round;
      round.round = r;
      DaConfig round_cfg = cfg;
      if (!cfg.dump_dir.empty()) {
        round_cfg.dump_dir = (std::filesystem::path(cfg.dump_dir) /
                              ("round_" + std::to_string(r))).string();
      }
      round.electricity = inner_da_electricity_from(data, rep.coupling, round_cfg, start);
      for (const auto& [a, b] : round.electricity.bids.unit_bids) {
        rep.bids.unit_bids[a] = b;
      }
      rep.electricity = clear_electricity(data, rep.bids, rep.coupling);
      update_coupling(*rep.electricity, rep.coupling);

      round.gas = inner_da_gas_from(data, rep.coupling, round_cfg, start);
      for (const auto& [a, b] : round.gas.bids.well_bids) {
        rep.bids.well_bids[a] = b;
      }
      rep.gas = clear_gas(data, rep.bids, rep.coupling);
      update_coupling(*rep.gas, rep.coupling);

      round.bids = rep.bids;
      round.coupling = rep.coupling;
      const auto current = compared_quantities(data, rep.coupling);
      bool same = r >= 2;
      for (const auto& [key, v] : current) {
        if (r >= 2) {
          const double old = previous.at(key);
          round.residuals[key] = relative_change(v, old);
          same = same && relative_converged(v, old, cfg.epsilon);
        }
      }
      previous = current;
      round.converged = same && !round.electricity.flag && !round.gas.flag;
      rep.trace.rounds.push_back(std::move(round));
      const OuterRound& last = rep.trace.rounds.back();
      if (last.electricity.flag || last.gas.flag) {
        rep.status = last.electricity.flag ? "flag_p" : "flag_g";
        rep.message = "inner loop reached r_max in outer round " +
                      std::to_string(r);
        break;
      }
      if (last.converged) {
        rep.converged = true;
        rep.status = "converged";
        rep.message = "converged in outer round " + std::to_string(r);
        break;
      }
      if (r == cfg.r_max) {
        rep.status = "r_max";
        rep.message = "outer loop reached r_max = " + std::to_string(r);
      }
    }
  } catch (const InfeasibleClearing& e) {
    rep.converged = false;
    rep.clearing_infeasible = true;
    rep.status = "error";
    rep.message = e.what();
  } catch (const std::exception& e) {
    rep.converged = false;
    rep.status = "error";
    rep.message = e.what();
    // A best response fails when no bid can make the lower level feasible;
    // report the clearing's own diagnosis then.
    try {
      clear_electricity(data, rep.bids, rep.coupling);
      clear_gas(data, rep.bids, rep.coupling);
    } catch (const InfeasibleClearing& inner) {
      rep.clearing_infeasible = true;
      rep.message = inner.what();
    } catch (const std::exception&) {
    }
  }
  fill_results(rep);
  return rep;
}

}  // namespace

InnerResult inner_da_electricity_from(const CaseData& data,
                                      const CouplingState& coupling,
                                      const DaConfig& cfg,
                                      const std::optional<BidProfile>& start) {
  return inner_da(data, coupling, cfg, Market::kPower, start);
}

InnerResult inner_da_gas_from(const CaseData& data,
                              const CouplingState& coupling,
                              const DaConfig& cfg,
                              const std::optional<BidProfile>& start) {
  return inner_da(data, coupling, cfg, Market::kGas, start);
}

InnerResult inner_da_electricity(const CaseData& data,
                                 const CouplingState& coupling,
                                 const DaConfig& cfg) {
  return inner_da(data, coupling, cfg, Market::kPower, std::nullopt);
}

InnerResult inner_da_gas(const CaseData& data, const CouplingState& coupling,
                         const DaConfig& cfg) {
  return inner_da(data, coupling, cfg, Market::kGas, std::nullopt);
}

double realized_profit(const CaseData& data, const Producer& producer,
                       const ElectricityClearing* e, const GasClearing* g,
                       const CouplingState& coupling) {
  double profit = 0.0;
  for (const std::string& id : producer.assets) {
    if (producer.market == Market::kPower) {
      if (e == nullptr) throw std::invalid_argument("electricity clearing missing");
      const GeneratingUnit& u = *data.find_unit(id);
      const double price = e->lmep.at(u.node);
      const std::vector<double>& p = e->dispatch.at(id);
      for (size_t b = 0; b < p.size(); ++b) {
        profit += (price - unit_block_cost(data, u, static_cast<int>(b), coupling)) * p[b];
      }
    } else {
      if (g == nullptr) throw std::invalid_argument("gas clearing missing");
      const GasWell& w = *data.find_well(id);
      profit += (g->lmgp.at(w.node) - w.marginal_cost) * g->well_output.at(id);
    }
  }
  return profit;
}

EquilibriumReport outer_da(const CaseData& data, const DaConfig& cfg) {
  return run_outer(data, cfg, std::nullopt);
}

std::vector<EquilibriumReport> outer_da_multi_start(const CaseData& data,
                                                    const DaConfig& cfg) {
  cfg.validate();
  std::vector<EquilibriumReport> out;
  out.push_back(outer_da(data, cfg));
  std::mt19937_64 rng(cfg.seed);
  for (int k = 0; k < cfg.multi_start; ++k) {
    BidProfile start = initial_bids(data);
    std::uniform_real_distribution<double> power(0.0, data.constants.alpha_max);
    std::uniform_real_distribution<double> gas(0.0, data.constants.delta_max);
    for (auto& [_, b] : start.unit_bids) {
      for (double& x : b) x = power(rng);
      std::sort(b.begin(), b.end());
    }
    for (auto& [_, x] : start.well_bids) x = gas(rng);
    out.push_back(run_outer(data, cfg, start));
  }
  return out;
}

namespace {

json to_json(const SolveRecord& s) {
  return {{"producer", s.producer},     {"round", s.round},
          {"profit", s.profit},         {"bilinear_profit", s.bilinear_profit},
          {"gap", s.gap},               {"nodes", s.nodes},
          {"big_m_dual", s.big_m_dual}, {"big_m_margin", s.big_m_margin},
          {"escalations", s.escalations}, {"status", s.status}};
}

json to_json(const InnerResult& r) {
  json solves = json::array();
  for (const SolveRecord& s : r.solves) solves.push_back(to_json(s));
  return {{"bids", gepec::to_json(r.bids)}, {"flag", r.flag},
          {"rounds", r.rounds}, {"residual", r.residual}, {"solves", solves}};
}

json config_json(const DaConfig& c) {
  return {{"epsilon", c.epsilon},       {"r_max", c.r_max},
          {"milp_gap", c.milp_gap},     {"big_m_dual", c.big_m_dual},
          {"multi_start", c.multi_start}, {"seed", c.seed}};
}

}  // namespace

json to_json(const EquilibriumReport& rep) {
  json j;
  j["converged"] = rep.converged;
  j["status"] = rep.status;
  j["message"] = rep.message;
  j["case"] = case_to_json(rep.data);
  j["config"] = config_json(rep.config);
  j["bids"] = to_json(rep.bids);
  j["coupling"] = to_json(rep.coupling);
  if (rep.electricity) j["electricity"] = to_json(*rep.electricity);
  if (rep.gas) j["gas"] = to_json(*rep.gas);
  json ex = json::array();
  for (const ExchangeRow& r : rep.exchange) {
    ex.push_back({{"kind", r.kind}, {"id", r.id}, {"value", r.value}});
  }
  j["exchange"] = ex;
  j["profits"] = rep.profits;
  json rounds = json::array();
  for (const OuterRound& r : rep.trace.rounds) {
    rounds.push_back({{"round", r.round},
                      {"bids", to_json(r.bids)},
                      {"coupling", to_json(r.coupling)},
                      {"electricity", to_json(r.electricity)},
                      {"gas", to_json(r.gas)},
                      {"residuals", r.residuals},
                      {"converged", r.converged}});
  }
  j["trace"] = rounds;
  if (rep.verdict) j["verification"] = *rep.verdict;
  return j;
}

EquilibriumReport report_from_json(const json& j) {
  EquilibriumReport rep;
  try {
    rep.converged = j.at("converged").get<bool>();
    rep.status = j.at("status").get<std::string>();
    rep.message = j.value("message", "");
    rep.data = case_from_json(j.at("case"));
    const json& c = j.at("config");
    rep.config.epsilon = c.at("epsilon").get<double>();
    rep.config.r_max = c.at("r_max").get<int>();
    rep.config.milp_gap = c.at("milp_gap").get<double>();
    rep.config.big_m_dual = c.at("big_m_dual").get<double>();
    rep.config.multi_start = c.value("multi_start", 0);
    rep.config.seed = c.value("seed", std::uint64_t{1});
    rep.bids = bids_from_json(j.at("bids"));
    rep.coupling = coupling_from_json(j.at("coupling"));
    rep.profits = j.value("profits", std::map<std::string, double>{});
  } catch (const json::exception& e) {
    throw CaseParseError(std::string("malformed report: ") + e.what());
  }
  return rep;
}

namespace {

std::string num(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

}  // namespace

std::string prices_csv(const EquilibriumReport& rep) {
  std::ostringstream out;
  out << "market,node,price\n";
  if (rep.electricity) {
    for (const auto& [n, v] : rep.electricity->lmep) out << "power," << n << ',' << num(v) << '\n';
  }
  if (rep.gas) {
    for (const auto& [n, v] : rep.gas->lmgp) out << "gas," << n << ',' << num(v) << '\n';
  }
  return out.str();
}

std::string exchange_csv(const EquilibriumReport& rep) {
  std::ostringstream out;
  out << "kind,id,value\n";
  for (const ExchangeRow& r : rep.exchange) {
    out << r.kind << ',' << r.id << ',' << num(r.value) << '\n';
  }
  return out.str();
}

std::string report_csv(const EquilibriumReport& rep) {
  std::ostringstream out;
  out << "section,kind,id,value\n";
  for (const auto& [u, b] : rep.bids.unit_bids) {
    for (size_t k = 0; k < b.size(); ++k) {
      out << "power,bid," << u << '#' << k + 1 << ',' << num(b[k]) << '\n';
    }
  }
  if (rep.electricity) {
    for (const auto& [u, p] : rep.electricity->dispatch) {
      double t = 0.0;
      for (double x : p) t += x;
      out << "power,dispatch," << u << ',' << num(t) << '\n';
    }
    for (const auto& [n, v] : rep.electricity->lmep) out << "power,lmep," << n << ',' << num(v) << '\n';
  }
  for (const auto& [w, b] : rep.bids.well_bids) out << "gas,bid," << w << ',' << num(b) << '\n';
  if (rep.gas) {
    for (const auto& [w, q] : rep.gas->well_output) out << "gas,output," << w << ',' << num(q) << '\n';
    for (const auto& [n, v] : rep.gas->lmgp) out << "gas,lmgp," << n << ',' << num(v) << '\n';
  }
  for (const ExchangeRow& r : rep.exchange) {
    out << "exchange," << r.kind << ',' << r.id << ',' << num(r.value) << '\n';
  }
  for (const auto& [p, v] : rep.profits) out << "profit,realized," << p << ',' << num(v) << '\n';
  return out.str();
}

std::string trace_csv(const EquilibriumReport& rep) {
  std::ostringstream out;
  out << "round,scope,inner_round,subject,field,value\n";
  for (const OuterRound& r : rep.trace.rounds) {
    for (const auto& [scope, inner] :
         {std::pair{"electricity", &r.electricity}, std::pair{"gas", &r.gas}}) {
      for (const SolveRecord& s : inner->solves) {
        const std::string pre = std::to_string(r.round) + ',' + scope + ',' +
                                std::to_string(s.round) + ',' + s.producer + ',';
        out << pre << "profit," << num(s.profit) << '\n';
        out << pre << "nodes," << s.nodes << '\n';
        out << pre << "big_m_dual," << num(s.big_m_dual) << '\n';
        out << pre << "big_m_margin," << num(s.big_m_margin) << '\n';
      }
      out << r.round << ',' << scope << ',' << inner->rounds << ",,flag,"
          << (inner->flag ? 1 : 0) << '\n';
      out << r.round << ',' << scope << ',' << inner->rounds << ",,residual,"
          << num(inner->residual) << '\n';
    }
    for (const auto& [k, v] : r.residuals) {
      out << r.round << ",outer,," << k << ",residual," << num(v) << '\n';
    }
    for (const auto& [k, v] : r.bids.unit_bids) {
      for (size_t b = 0; b < v.size(); ++b) {
        out << r.round << ",outer,," << k << '#' << b + 1 << ",bid," << num(v[b]) << '\n';
      }
    }
    for (const auto& [k, v] : r.bids.well_bids) {
      out << r.round << ",outer,," << k << ",bid," << num(v) << '\n';
    }
    out << r.round << ",outer,,,converged," << (r.converged ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace gepec

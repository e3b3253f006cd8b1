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

#include "gepec/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace gepec {

using nlohmann::json;

void GridOracleConfig::validate() const {
  if (levels < 2) throw std::invalid_argument("grid needs at least 2 levels");
  if (budget < 1) throw std::invalid_argument("grid budget must be positive");
}

namespace {

const Producer& find_strategic(const CaseData& data, const std::string& id,
                               std::vector<Producer>& storage) {
  storage = producers(data);
  for (const Producer& p : storage) {
    if (p.id == id && p.strategic) return p;
  }
  throw std::invalid_argument(id + " is not a strategic producer");
}

long saturating_mul(long a, long b) {
  if (a != 0 && b > std::numeric_limits<long>::max() / a) {
    return std::numeric_limits<long>::max();
  }
  return a * b;
}

// C(n, k) saturated at LONG_MAX.
long binomial(long n, long k) {
  long r = 1;
  for (long i = 1; i <= k; ++i) {
    const long m = saturating_mul(r, n - k + i);
    if (m == std::numeric_limits<long>::max()) return m;
    r = m / i;
  }
  return r;
}

int blocks_of(const CaseData& data, const Producer& p, const std::string& a) {
  return p.market == Market::kPower
             ? static_cast<int>(data.find_unit(a)->blocks.size())
             : 1;
}

// Nondecreasing tuples of `k` level indices below `levels`.
void tuples(int k, int levels, std::vector<int>& cur,
            std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.push_back(cur);
    return;
  }
  for (int i = cur.empty() ? 0 : cur.back(); i < levels; ++i) {
    cur.push_back(i);
    tuples(k, levels, cur, out);
    cur.pop_back();
  }
}

double capacity_of(const CaseData& data, const Producer& p) {
  double c = 0.0;
  for (const std::string& a : p.assets) {
    c += p.market == Market::kPower ? data.find_unit(a)->capacity()
                                    : data.find_well(a)->capacity;
  }
  return c;
}

// Profit of `p` when the market clears at `bids`; nullopt if infeasible.
std::optional<double> profit_at(const CaseData& data, const Producer& p,
                                const BidProfile& bids,
                                const CouplingState& coupling) {
  try {
    if (p.market == Market::kPower) {
      const ElectricityClearing e = clear_electricity(data, bids, coupling);
      return realized_profit(data, p, &e, nullptr, coupling);
    }
    const GasClearing g = clear_gas(data, bids, coupling);
    return realized_profit(data, p, nullptr, &g, coupling);
  } catch (const InfeasibleClearing&) {
    return std::nullopt;
  }
}

void assign(BidProfile& bids, const Producer& p, const std::string& asset,
            const std::vector<double>& values) {
  if (p.market == Market::kPower) {
    bids.unit_bids[asset] = values;
  } else {
    bids.well_bids[asset] = values.at(0);
  }
}

}  // namespace

long grid_size(const CaseData& data, const Producer& producer, int levels) {
  long n = 1;
  for (const std::string& a : producer.assets) {
    const int k = blocks_of(data, producer, a);
    n = saturating_mul(n, binomial(levels + k - 1, k));
  }
  return n;
}

GridResult grid_best_response(const std::string& producer,
                              const CaseData& data,
                              const BidProfile& bids_others,
                              const CouplingState& coupling,
                              const GridOracleConfig& cfg) {
  cfg.validate();
  std::vector<Producer> storage;
  const Producer& p = find_strategic(data, producer, storage);
  const long size = grid_size(data, p, cfg.levels);
  if (size > cfg.budget) {
    throw BudgetExceeded("grid for " + producer + " has " +
                         std::to_string(size) + " points, budget " +
                         std::to_string(cfg.budget));
  }
  const double cap = p.market == Market::kPower ? data.constants.alpha_max
                                                : data.constants.delta_max;
  GridResult res;
  res.step = cap / (cfg.levels - 1);
  res.profit = -std::numeric_limits<double>::infinity();

  auto level = [&](int i) {
    return i == cfg.levels - 1 ? cap : cap * i / (cfg.levels - 1);
  };
  std::vector<std::vector<std::vector<int>>> choices;
  for (const std::string& a : p.assets) {
    std::vector<int> cur;
    choices.emplace_back();
    tuples(blocks_of(data, p, a), cfg.levels, cur, choices.back());
  }

  BidProfile bids = bids_others;
  auto consider = [&](const BidProfile& b) {
    ++res.points;
    const std::optional<double> v = profit_at(data, p, b, coupling);
    if (v && *v > res.profit) {
      res.profit = *v;
      res.bids = BidProfile{};
      for (const std::string& a : p.assets) {
        if (p.market == Market::kPower) {
          res.bids.unit_bids[a] = b.unit_bids.at(a);
        } else {
          res.bids.well_bids[a] = b.well_bids.at(a);
        }
      }
    }
  };
  // The producer's current bids first, so the grid never reports less than
  // what it already earns.
  bool has_current = true;
  for (const std::string& a : p.assets) {
    has_current = has_current && (p.market == Market::kPower
                                      ? bids_others.unit_bids.contains(a)
                                      : bids_others.well_bids.contains(a));
  }
  if (has_current) consider(bids);

  std::vector<size_t> odo(p.assets.size(), 0);
  while (true) {
    for (size_t k = 0; k < p.assets.size(); ++k) {
      std::vector<double> v;
      for (int i : choices[k][odo[k]]) v.push_back(level(i));
      assign(bids, p, p.assets[k], v);
    }
    consider(bids);
    size_t k = 0;
    while (k < odo.size() && ++odo[k] == choices[k].size()) odo[k++] = 0;
    if (k == odo.size()) break;
  }
  return res;
}

double check_kkt(const lp::LpSolution& solution, const KktSystem& kkt) {
  return kkt_residuals(kkt, kkt_point(kkt, solution)).max();
}

double audit_big_m(std::span<const double> values,
                   const BestResponseMilp& model) {
  return big_m_margin(model, values);
}

VerificationVerdict certify_equilibrium(const EquilibriumReport& report,
                                        const GridOracleConfig& cfg) {
  if (!report.converged) {
    throw std::invalid_argument("certification needs a converged report");
  }
  cfg.validate();
  const CaseData& data = report.data;
  const CouplingState& coupling = report.coupling;
  VerificationVerdict v;

  const ElectricityClearing e = clear_electricity(data, report.bids, coupling);
  const GasClearing g = clear_gas(data, report.bids, coupling);
  for (const auto& lp_sol :
       {std::pair{&e.lp, &e.solution}, std::pair{&g.lp, &g.solution}}) {
    const KktSystem kkt = derive_kkt(*lp_sol.first);
    v.kkt_max_residual = std::max(v.kkt_max_residual, check_kkt(*lp_sol.second, kkt));
    const double obj = lp_sol.second->objective;
    v.duality_gap = std::max(
        v.duality_gap, std::abs(obj - lp::dual_objective(*lp_sol.first, *lp_sol.second)) /
                           (1.0 + std::abs(obj)));
  }

  BestResponseOptions opts;
  opts.gap = report.config.milp_gap;
  opts.big_m_dual = report.config.big_m_dual;
  for (const Producer& p : producers(data)) {
    if (!p.strategic) continue;
    ProducerVerdict pv;
    pv.producer = p.id;
    pv.realized_profit = realized_profit(data, p, &e, &g, coupling);
    try {
      const GridResult grid =
          grid_best_response(p.id, data, report.bids, coupling, cfg);
      pv.checked = true;
      pv.grid_points = grid.points;
      pv.grid_profit = grid.profit;
      pv.regret = grid.profit - pv.realized_profit;
      pv.grid_step_bound = grid.step * capacity_of(data, p);
      pv.threshold = std::max(report.config.epsilon * std::abs(pv.realized_profit),
                              pv.grid_step_bound);
      pv.pass = pv.regret <= pv.threshold;
    } catch (const BudgetExceeded&) {
      v.partial = true;
    }
    try {
      const BestResponse br = best_response(p.id, data, report.bids, coupling, opts);
      pv.milp_profit = br.profit;
      pv.big_m_margin = br.big_m_margin;
    } catch (const MpccError&) {
      pv.big_m_margin = 0.0;
    }
    v.big_m_margin = std::min(v.big_m_margin, pv.big_m_margin);
    v.producers.push_back(pv);
  }
  v.kkt_pass = v.kkt_max_residual < VerificationVerdict::kKktTolerance;
  v.duality_pass = v.duality_gap < VerificationVerdict::kDualityTolerance;
  v.big_m_pass = v.big_m_margin >= VerificationVerdict::kBigMMargin;
  v.regret_pass = std::all_of(v.producers.begin(), v.producers.end(),
                              [](const ProducerVerdict& p) { return !p.checked || p.pass; });
  v.pass = v.kkt_pass && v.duality_pass && v.big_m_pass && v.regret_pass;
  return v;
}

json to_json(const VerificationVerdict& v) {
  json producers = json::array();
  for (const ProducerVerdict& p : v.producers) {
    producers.push_back({{"producer", p.producer},
                         {"realized_profit", p.realized_profit},
                         {"grid_profit", p.grid_profit},
                         {"regret", p.regret},
                         {"threshold", p.threshold},
                         {"grid_step_bound", p.grid_step_bound},
                         {"milp_profit", p.milp_profit},
                         {"big_m_margin", p.big_m_margin},
                         {"grid_points", p.grid_points},
                         {"checked", p.checked},
                         {"pass", p.pass}});
  }
  return {{"kkt_max_residual", v.kkt_max_residual},
          {"duality_gap", v.duality_gap},
          {"big_m_margin", v.big_m_margin},
          {"producers", producers},
          {"kkt_pass", v.kkt_pass},
          {"duality_pass", v.duality_pass},
          {"big_m_pass", v.big_m_pass},
          {"regret_pass", v.regret_pass},
          {"partial", v.partial},
          {"pass", v.pass},
          {"note", "regret is measured on a bid grid; it is this tool's "
                   "equilibrium-quality metric"}};
}

std::string verdict_table(const VerificationVerdict& v) {
  std::ostringstream out;
  out.precision(8);
  auto row = [&](const std::string& check, double value, double threshold,
                 bool pass) {
    out << check << ',' << value << ',' << threshold << ','
        << (pass ? "pass" : "fail") << '\n';
  };
  out << "check,value,threshold,result\n";
  row("kkt_max_residual", v.kkt_max_residual, VerificationVerdict::kKktTolerance, v.kkt_pass);
  row("duality_gap", v.duality_gap, VerificationVerdict::kDualityTolerance, v.duality_pass);
  row("big_m_margin", v.big_m_margin, VerificationVerdict::kBigMMargin, v.big_m_pass);
  for (const ProducerVerdict& p : v.producers) {
    if (!p.checked) {
      out << "regret:" << p.producer << ",,,skipped\n";
      continue;
    }
    row("regret:" + p.producer, p.regret, p.threshold, p.pass);
  }
  return out.str();
}

}  // namespace gepec

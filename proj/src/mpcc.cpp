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

#include "gepec/mpcc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gepec/solver_backend.hpp"

namespace gepec {

using lp::kInf;
using lp::LinearExpr;
using lp::Relation;
using lp::Term;

namespace {

// Activity range of a row over a box, tracking infinite contributions.
struct Range {
  double lo = 0.0, hi = 0.0;
  int lo_inf = 0, hi_inf = 0;
};

void contribution(double a, double l, double u, double& lo, double& hi) {
  if (a > 0) {
    lo = a * l;
    hi = a * u;
  } else {
    lo = a * u;
    hi = a * l;
  }
}

Range activity(std::span<const Term> terms,
               const std::vector<std::pair<double, double>>& b) {
  Range r;
  for (const Term& t : terms) {
    double lo, hi;
    contribution(t.coef, b[t.var].first, b[t.var].second, lo, hi);
    if (std::isinf(lo)) {
      ++r.lo_inf;
    } else {
      r.lo += lo;
    }
    if (std::isinf(hi)) {
      ++r.hi_inf;
    } else {
      r.hi += hi;
    }
  }
  return r;
}

double relax_down(double v) {
  return std::isfinite(v) ? v - 1e-7 * (1.0 + std::abs(v)) : v;
}
double relax_up(double v) {
  return std::isfinite(v) ? v + 1e-7 * (1.0 + std::abs(v)) : v;
}

}  // namespace

std::vector<std::pair<double, double>> implied_bounds(
    const lp::LinearProgram& lp, std::span<const lp::Constraint> extra_rows) {
  const int n = lp.num_variables();
  std::vector<std::pair<double, double>> b(n);
  for (int j = 0; j < n; ++j) {
    b[j] = {lp.variable(j).lower, lp.variable(j).upper};
  }
  std::vector<const lp::Constraint*> rows;
  for (int i = 0; i < lp.num_constraints(); ++i) rows.push_back(&lp.constraint(i));
  for (const lp::Constraint& c : extra_rows) rows.push_back(&c);

  for (int pass = 0; pass < 100; ++pass) {
    bool changed = false;
    for (const lp::Constraint* row : rows) {
      const Range r = activity(row->terms, b);
      for (const Term& t : row->terms) {
        double lo_j, hi_j;
        contribution(t.coef, b[t.var].first, b[t.var].second, lo_j, hi_j);
        // Range of the rest of the row.
        const bool rest_lo_inf = r.lo_inf - (std::isinf(lo_j) ? 1 : 0) > 0;
        const bool rest_hi_inf = r.hi_inf - (std::isinf(hi_j) ? 1 : 0) > 0;
        const double rest_lo =
            rest_lo_inf ? -kInf : r.lo - (std::isinf(lo_j) ? 0.0 : lo_j);
        const double rest_hi =
            rest_hi_inf ? kInf : r.hi - (std::isinf(hi_j) ? 0.0 : hi_j);
        // Range of a_j x_j.
        double ax_lo = -kInf, ax_hi = kInf;
        if (row->relation != Relation::kGreaterEqual) ax_hi = row->rhs - rest_lo;
        if (row->relation != Relation::kLessEqual) ax_lo = row->rhs - rest_hi;
        double new_l, new_u;
        if (t.coef > 0) {
          new_l = ax_lo / t.coef;
          new_u = ax_hi / t.coef;
        } else {
          new_l = ax_hi / t.coef;
          new_u = ax_lo / t.coef;
        }
        auto& [l, u] = b[t.var];
        if (std::isfinite(new_l) && new_l <= u &&
            (std::isinf(l) || new_l > l + 1e-6 * (1.0 + std::abs(l)))) {
          l = new_l;
          changed = true;
        }
        if (std::isfinite(new_u) && new_u >= l &&
            (std::isinf(u) || new_u < u - 1e-6 * (1.0 + std::abs(u)))) {
          u = new_u;
          changed = true;
        }
      }
    }
    if (!changed) break;
  }
  for (int j = 0; j < n; ++j) {
    const lp::Variable& v = lp.variable(j);
    if (b[j].first != v.lower) b[j].first = std::max(relax_down(b[j].first), v.lower);
    if (b[j].second != v.upper) b[j].second = std::min(relax_up(b[j].second), v.upper);
  }
  return b;
}

KktSystem derive_kkt(const lp::LinearProgram& lp,
                     std::span<const lp::Constraint> extra_rows) {
  lp.validate();
  KktSystem k;
  k.lp = lp;
  const int n = lp.num_variables();
  const int m = lp.num_constraints();
  k.num_primal = n;
  auto add = [&](std::string name, double lo, double up) {
    k.names.push_back(std::move(name));
    k.lower.push_back(lo);
    k.upper.push_back(up);
    return static_cast<int>(k.names.size()) - 1;
  };
  for (int j = 0; j < n; ++j) {
    add(lp.variable(j).name, lp.variable(j).lower, lp.variable(j).upper);
  }
  for (int i = 0; i < m; ++i) {
    const lp::Constraint& c = lp.constraint(i);
    k.row_dual.push_back(add("dual[" + c.name + "]",
                             c.relation == Relation::kEqual ? -kInf : 0.0,
                             kInf));
  }
  k.lower_dual.assign(n, -1);
  k.upper_dual.assign(n, -1);
  k.fixed_dual.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    const lp::Variable& v = lp.variable(j);
    if (v.lower == v.upper) {
      k.fixed_dual[j] = add("nu_fix[" + v.name + "]", -kInf, kInf);
      continue;
    }
    if (std::isfinite(v.lower)) {
      k.lower_dual[j] = add("nu_lo[" + v.name + "]", 0.0, kInf);
    }
    if (std::isfinite(v.upper)) {
      k.upper_dual[j] = add("nu_up[" + v.name + "]", 0.0, kInf);
    }
  }

  // Stationarity, one row per primal.
  k.stationarity.resize(n);
  for (int j = 0; j < n; ++j) k.stationarity[j].constant = lp.variable(j).cost;
  for (int i = 0; i < m; ++i) {
    const lp::Constraint& c = lp.constraint(i);
    const double sign = c.relation == Relation::kLessEqual ? 1.0 : -1.0;
    for (const Term& t : c.terms) {
      k.stationarity[t.var].add(k.row_dual[i], sign * t.coef);
    }
  }
  for (int j = 0; j < n; ++j) {
    LinearExpr& s = k.stationarity[j];
    if (k.fixed_dual[j] >= 0) s.add(k.fixed_dual[j], -1.0);
    if (k.lower_dual[j] >= 0) s.add(k.lower_dual[j], -1.0);
    if (k.upper_dual[j] >= 0) s.add(k.upper_dual[j], 1.0);
    s.canonicalize();
  }

  // Complementarity with slack ranges from propagated bounds.
  const auto box = implied_bounds(lp, extra_rows);
  auto slack_range = [&](const LinearExpr& e, ComplementarityPair& p) {
    const Range r = activity(e.terms, box);
    p.slack_min = r.lo_inf > 0 ? -kInf : r.lo + e.constant;
    p.slack_max = r.hi_inf > 0 ? kInf : r.hi + e.constant;
  };
  std::vector<int> row_pair(m, -1);
  for (int i = 0; i < m; ++i) {
    const lp::Constraint& c = lp.constraint(i);
    if (c.relation == Relation::kEqual) continue;
    ComplementarityPair p;
    p.name = c.name;
    p.dual = k.row_dual[i];
    const double sign = c.relation == Relation::kGreaterEqual ? 1.0 : -1.0;
    for (const Term& t : c.terms) p.slack.add(t.var, sign * t.coef);
    p.slack.constant = -sign * c.rhs;
    slack_range(p.slack, p);
    row_pair[i] = static_cast<int>(k.pairs.size());
    k.pairs.push_back(std::move(p));
  }
  for (int j = 0; j < n; ++j) {
    const lp::Variable& v = lp.variable(j);
    int lo_pair = -1, up_pair = -1;
    if (k.lower_dual[j] >= 0) {
      ComplementarityPair p;
      p.name = "lo[" + v.name + "]";
      p.dual = k.lower_dual[j];
      p.slack.add(j, 1.0);
      p.slack.constant = -v.lower;
      p.bound_of = j;
      slack_range(p.slack, p);
      lo_pair = static_cast<int>(k.pairs.size());
      k.pairs.push_back(std::move(p));
    }
    if (k.upper_dual[j] >= 0) {
      ComplementarityPair p;
      p.name = "up[" + v.name + "]";
      p.dual = k.upper_dual[j];
      p.slack.add(j, -1.0);
      p.slack.constant = v.upper;
      p.bound_of = j;
      slack_range(p.slack, p);
      up_pair = static_cast<int>(k.pairs.size());
      k.pairs.push_back(std::move(p));
    }
    if (lo_pair >= 0 && up_pair >= 0) k.exclusive.emplace_back(lo_pair, up_pair);
  }
  // Opposite-sense rows over the same terms with a nonempty gap.
  for (int i = 0; i < m; ++i) {
    const lp::Constraint& a = lp.constraint(i);
    if (a.relation != Relation::kLessEqual) continue;
    for (int r = 0; r < m; ++r) {
      const lp::Constraint& b = lp.constraint(r);
      if (b.relation != Relation::kGreaterEqual || b.rhs >= a.rhs) continue;
      if (b.terms.size() != a.terms.size()) continue;
      bool same = true;
      for (size_t t = 0; t < a.terms.size() && same; ++t) {
        same = a.terms[t].var == b.terms[t].var &&
               a.terms[t].coef == b.terms[t].coef;
      }
      if (same) k.exclusive.emplace_back(row_pair[i], row_pair[r]);
    }
  }
  return k;
}

std::vector<double> kkt_point(const KktSystem& kkt, const lp::LpSolution& sol) {
  if (sol.status != lp::LpStatus::kOptimal) {
    throw std::logic_error("kkt_point needs an optimal solution");
  }
  std::vector<double> p(kkt.size(), 0.0);
  for (int j = 0; j < kkt.num_primal; ++j) p[j] = sol.primal[j];
  for (size_t i = 0; i < kkt.row_dual.size(); ++i) {
    p[kkt.row_dual[i]] = sol.row_dual[i];
  }
  for (int j = 0; j < kkt.num_primal; ++j) {
    const double d = sol.reduced_cost[j];
    if (kkt.fixed_dual[j] >= 0) p[kkt.fixed_dual[j]] = d;
    if (kkt.lower_dual[j] >= 0) p[kkt.lower_dual[j]] = std::max(d, 0.0);
    if (kkt.upper_dual[j] >= 0) p[kkt.upper_dual[j]] = std::max(-d, 0.0);
  }
  return p;
}

double KktResiduals::max() const {
  return std::max({stationarity, primal, sign, complementarity});
}

KktResiduals kkt_residuals(const KktSystem& kkt,
                           std::span<const double> point) {
  KktResiduals r;
  for (const LinearExpr& s : kkt.stationarity) {
    r.stationarity = std::max(r.stationarity, std::abs(s.evaluate(point)));
  }
  const lp::LinearProgram& lp = kkt.lp;
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const lp::Constraint& c = lp.constraint(i);
    const double act = lp.row_activity(i, point);
    double v = 0.0;
    if (c.relation != Relation::kGreaterEqual) v = std::max(v, act - c.rhs);
    if (c.relation != Relation::kLessEqual) v = std::max(v, c.rhs - act);
    r.primal = std::max(r.primal, v);
  }
  for (int j = 0; j < kkt.num_primal; ++j) {
    r.primal = std::max({r.primal, kkt.lower[j] - point[j],
                         point[j] - kkt.upper[j]});
  }
  for (int k = kkt.num_primal; k < kkt.size(); ++k) {
    if (kkt.lower[k] == 0.0) r.sign = std::max(r.sign, -point[k]);
  }
  for (const ComplementarityPair& p : kkt.pairs) {
    const double s = p.slack.evaluate(point);
    r.complementarity =
        std::max(r.complementarity, std::abs(std::min(s, point[p.dual])));
  }
  return r;
}

namespace {

// Row holding the price of leader variable j: its only entry, equal to 1,
// in an equality row.
int price_row(const lp::LinearProgram& lp, int j) {
  int found = -1;
  for (int i = 0; i < lp.num_constraints(); ++i) {
    for (const Term& t : lp.constraint(i).terms) {
      if (t.var != j) continue;
      if (found >= 0 || t.coef != 1.0 ||
          lp.constraint(i).relation != Relation::kEqual) {
        throw MpccError("variable " + lp.variable(j).name +
                        " is not priced by a single balance row");
      }
      found = i;
    }
  }
  if (found < 0) {
    throw MpccError("variable " + lp.variable(j).name + " appears in no row");
  }
  return found;
}

}  // namespace

LinearExpr linearized_revenue(const KktSystem& kkt,
                              std::span<const int> leader) {
  const lp::LinearProgram& lp = kkt.lp;
  std::vector<bool> is_leader(kkt.num_primal, false);
  for (int j : leader) {
    price_row(lp, j);
    is_leader[j] = true;
  }
  LinearExpr e;
  // Dual objective: the identity primal objective = dual objective holds
  // at every KKT point.
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const lp::Constraint& c = lp.constraint(i);
    e.add(kkt.row_dual[i],
          c.relation == Relation::kLessEqual ? -c.rhs : c.rhs);
  }
  for (int j = 0; j < kkt.num_primal; ++j) {
    const lp::Variable& v = lp.variable(j);
    if (kkt.fixed_dual[j] >= 0) e.add(kkt.fixed_dual[j], v.lower);
    if (kkt.lower_dual[j] >= 0) e.add(kkt.lower_dual[j], v.lower);
    if (kkt.upper_dual[j] >= 0) e.add(kkt.upper_dual[j], -v.upper);
  }
  // Remove the part of the primal objective not paid to the leader ...
  for (int j = 0; j < kkt.num_primal; ++j) {
    if (!is_leader[j]) e.add(j, -lp.variable(j).cost);
  }
  // ... and turn offer * quantity into price * quantity using the leader's
  // stationarity (price = offer - nu_lo + nu_up) and bound complementarity
  // (nu_lo * x = nu_lo * l, nu_up * x = nu_up * u).
  for (int j : leader) {
    const lp::Variable& v = lp.variable(j);
    if (kkt.fixed_dual[j] >= 0) e.add(kkt.fixed_dual[j], -v.lower);
    if (kkt.lower_dual[j] >= 0) e.add(kkt.lower_dual[j], -v.lower);
    if (kkt.upper_dual[j] >= 0) e.add(kkt.upper_dual[j], v.upper);
  }
  e.canonicalize();
  return e;
}

double bilinear_revenue(const KktSystem& kkt, std::span<const int> leader,
                        std::span<const double> point) {
  double r = 0.0;
  for (int j : leader) {
    r += point[kkt.row_dual[price_row(kkt.lp, j)]] * point[j];
  }
  return r;
}

std::vector<PairEncoding> encode_complementarity(const KktSystem& kkt,
                                                 const BigMPolicy& policy,
                                                 lp::MilpModel& model) {
  if (model.lp.num_variables() < kkt.size()) {
    throw std::logic_error("model does not contain the KKT variables");
  }
  if (!(policy.dual > 0.0)) throw MpccError("dual big-M must be positive");
  const double tol = 1e-7;
  std::vector<PairEncoding> out;
  for (size_t p = 0; p < kkt.pairs.size(); ++p) {
    const ComplementarityPair& pair = kkt.pairs[p];
    if (!std::isfinite(pair.slack_max)) {
      throw MpccError("slack of " + pair.name +
                      " is unbounded; give the element an explicit capacity");
    }
    PairEncoding enc;
    enc.pair = static_cast<int>(p);
    enc.big_m_primal = std::max(pair.slack_max, 0.0);
    enc.big_m_dual = policy.dual;
    enc.binary = model.add_binary("h[" + pair.name + "]");
    if (pair.slack_min > tol) {
      model.lp.set_bounds(enc.binary, 1.0, 1.0);
      enc.fixed = true;
    } else if (enc.big_m_primal <= tol) {
      model.lp.set_bounds(enc.binary, 0.0, 0.0);
      enc.fixed = true;
    }
    std::vector<Term> ps = pair.slack.terms;
    ps.push_back({enc.binary, -enc.big_m_primal});
    model.lp.add_constraint("cs_p[" + pair.name + "]", std::move(ps),
                            Relation::kLessEqual, -pair.slack.constant);
    model.lp.add_constraint("cs_d[" + pair.name + "]",
                            {{pair.dual, 1.0}, {enc.binary, policy.dual}},
                            Relation::kLessEqual, policy.dual);
    out.push_back(enc);
  }
  for (const auto& [a, b] : kkt.exclusive) {
    model.lp.add_constraint(
        "excl[" + kkt.pairs[a].name + "," + kkt.pairs[b].name + "]",
        {{out[a].binary, 1.0}, {out[b].binary, 1.0}}, Relation::kGreaterEqual,
        1.0);
  }
  return out;
}

namespace {

const Producer& find_producer(const CaseData& data, const std::string& id,
                              Market market, std::vector<Producer>& storage) {
  storage = strategic_producers(data, market);
  for (const Producer& p : storage) {
    if (p.id == id) return p;
  }
  throw MpccError(id + " is not a strategic " +
                  std::string(to_string(market)) + " producer");
}

lp::Constraint aggregate(const lp::LinearProgram& lp,
                         const std::map<std::string, int>& rows) {
  LinearExpr e;
  double rhs = 0.0;
  for (const auto& [_, i] : rows) {
    for (const Term& t : lp.constraint(i).terms) e.add(t.var, t.coef);
    rhs += lp.constraint(i).rhs;
  }
  e.canonicalize();
  return {"aggregate_balance", e.terms, Relation::kEqual, rhs};
}

// Model skeleton shared by both markets: KKT variables, primal rows,
// stationarity with the leader's costs replaced by bid variables.
BestResponseMilp assemble(const std::string& producer, Market market,
                          KktSystem kkt, std::vector<int> leader,
                          std::vector<double> true_cost,
                          const std::vector<std::pair<std::string, int>>& bids,
                          double bid_cap, const BigMPolicy& policy) {
  BestResponseMilp br;
  br.producer = producer;
  br.market = market;
  br.big_m_dual = policy.dual;
  lp::MilpModel& m = br.milp;
  for (int k = 0; k < kkt.size(); ++k) {
    m.lp.add_variable(kkt.names[k], kkt.lower[k], kkt.upper[k]);
    br.symbols[k] = kkt.names[k];
  }
  const lp::LinearProgram& low = kkt.lp;
  for (int i = 0; i < low.num_constraints(); ++i) {
    const lp::Constraint& c = low.constraint(i);
    m.lp.add_constraint("primal[" + c.name + "]", c.terms, c.relation, c.rhs);
  }
  // Bid variables, one per leader quantity, in leader order.
  std::vector<int> bid_of(kkt.num_primal, -1);
  for (size_t l = 0; l < leader.size(); ++l) {
    const auto& [asset, block] = bids[l];
    const std::string name = "bid[" + asset + "," + std::to_string(block + 1) + "]";
    const int v = m.lp.add_variable(name, 0.0, bid_cap);
    br.bid_var[asset].push_back(v);
    br.symbols[v] = name;
    bid_of[leader[l]] = v;
  }
  for (const auto& [asset, vars] : br.bid_var) {
    for (size_t b = 1; b < vars.size(); ++b) {
      m.lp.add_constraint("bid_order[" + asset + "," + std::to_string(b) + "]",
                          {{vars[b - 1], 1.0}, {vars[b], -1.0}},
                          Relation::kLessEqual, 0.0);
    }
  }
  for (int j = 0; j < kkt.num_primal; ++j) {
    LinearExpr s = kkt.stationarity[j];
    if (bid_of[j] >= 0) {
      s.constant = 0.0;
      s.add(bid_of[j], 1.0);
      s.canonicalize();
    }
    m.lp.add_constraint("stat[" + low.variable(j).name + "]", s.terms,
                        Relation::kEqual, -s.constant);
  }
  br.pairs = encode_complementarity(kkt, policy, m);
  for (const PairEncoding& e : br.pairs) br.symbols[e.binary] = m.lp.variable(e.binary).name;

  LinearExpr profit = linearized_revenue(kkt, leader);
  for (size_t l = 0; l < leader.size(); ++l) profit.add(leader[l], -true_cost[l]);
  profit.canonicalize();
  for (const Term& t : profit.terms) m.lp.set_cost(t.var, -t.coef);
  m.lp.set_objective_offset(-profit.constant);
  br.profit = std::move(profit);
  br.kkt = std::move(kkt);
  br.leader = std::move(leader);
  br.true_cost = std::move(true_cost);
  return br;
}

}  // namespace

lp::LinearExpr linearize_objective_sep(const std::string& s_star,
                                       const KktSystem& kkt,
                                       const CaseData& data,
                                       const BidProfile& bids_others,
                                       const CouplingState& coupling) {
  std::vector<Producer> storage;
  const Producer& p = find_producer(data, s_star, Market::kPower, storage);
  (void)bids_others;
  LinearExpr e;
  std::vector<int> leader;
  for (const std::string& id : p.assets) {
    const GeneratingUnit& u = *data.find_unit(id);
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      const int j = kkt.lp.find_variable("P_" + u.id + "_" + std::to_string(b + 1));
      if (j < 0) throw MpccError("KKT system lacks unit " + u.id);
      leader.push_back(j);
      e.add(j, -unit_block_cost(data, u, static_cast<int>(b), coupling));
    }
  }
  LinearExpr r = linearized_revenue(kkt, leader);
  for (const Term& t : r.terms) e.add(t.var, t.coef);
  e.constant += r.constant;
  e.canonicalize();
  return e;
}

lp::LinearExpr linearize_objective_sgp(const std::string& v_star,
                                       const KktSystem& kkt,
                                       const CaseData& data,
                                       const BidProfile& bids_others,
                                       const CouplingState& coupling) {
  std::vector<Producer> storage;
  const Producer& p = find_producer(data, v_star, Market::kGas, storage);
  (void)bids_others;
  (void)coupling;
  LinearExpr e;
  std::vector<int> leader;
  for (const std::string& id : p.assets) {
    const int j = kkt.lp.find_variable("q_" + id);
    if (j < 0) throw MpccError("KKT system lacks well " + id);
    leader.push_back(j);
    e.add(j, -data.find_well(id)->marginal_cost);
  }
  LinearExpr r = linearized_revenue(kkt, leader);
  for (const Term& t : r.terms) e.add(t.var, t.coef);
  e.constant += r.constant;
  e.canonicalize();
  return e;
}

BestResponseMilp build_sep_milp(const std::string& s_star,
                                const CaseData& data,
                                const BidProfile& bids_others,
                                const CouplingState& coupling,
                                const BigMPolicy& policy) {
  std::vector<Producer> storage;
  const Producer& p = find_producer(data, s_star, Market::kPower, storage);
  BidProfile bids = bids_others;
  for (const std::string& id : p.assets) {
    bids.unit_bids[id].assign(data.find_unit(id)->blocks.size(), 0.0);
  }
  const ElectricityModel em = build_electricity_model(data, bids, coupling);
  const lp::Constraint agg = aggregate(em.lp, em.balance_row);
  KktSystem kkt = derive_kkt(em.lp, std::span(&agg, 1));

  std::vector<int> leader;
  std::vector<double> cost;
  std::vector<std::pair<std::string, int>> bid_names;
  for (const std::string& id : p.assets) {
    const GeneratingUnit& u = *data.find_unit(id);
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      leader.push_back(em.block_var.at(id)[b]);
      cost.push_back(unit_block_cost(data, u, static_cast<int>(b), coupling));
      bid_names.emplace_back(id, static_cast<int>(b));
    }
  }
  BestResponseMilp br = assemble(s_star, Market::kPower, std::move(kkt), leader,
                                 cost, bid_names, data.constants.alpha_max,
                                 policy);
  for (const auto& [node, i] : em.balance_row) {
    br.symbols[br.kkt.row_dual[i]] = "lmep[" + node + "]";
  }
  return br;
}

BestResponseMilp build_sgp_milp(const std::string& v_star,
                                const CaseData& data,
                                const BidProfile& bids_others,
                                const CouplingState& coupling,
                                const BigMPolicy& policy) {
  std::vector<Producer> storage;
  const Producer& p = find_producer(data, v_star, Market::kGas, storage);
  BidProfile bids = bids_others;
  for (const std::string& id : p.assets) bids.well_bids[id] = 0.0;
  const GasModel gm = build_gas_model(data, bids, coupling);
  const lp::Constraint agg = aggregate(gm.lp, gm.balance_row);
  KktSystem kkt = derive_kkt(gm.lp, std::span(&agg, 1));

  std::vector<int> leader;
  std::vector<double> cost;
  std::vector<std::pair<std::string, int>> bid_names;
  for (const std::string& id : p.assets) {
    leader.push_back(gm.well_var.at(id));
    cost.push_back(data.find_well(id)->marginal_cost);
    bid_names.emplace_back(id, 0);
  }
  BestResponseMilp br = assemble(v_star, Market::kGas, std::move(kkt), leader,
                                 cost, bid_names, data.constants.delta_max,
                                 policy);
  for (const auto& [node, i] : gm.balance_row) {
    br.symbols[br.kkt.row_dual[i]] = "lmgp[" + node + "]";
  }
  return br;
}

double big_m_margin(const BestResponseMilp& model,
                    std::span<const double> values) {
  double margin = 1.0;
  for (const PairEncoding& e : model.pairs) {
    const double g = values[model.kkt.pairs[e.pair].dual];
    margin = std::min(margin, (e.big_m_dual - g) / e.big_m_dual);
  }
  return margin;
}

namespace {

// Leader bids rearranged into a feasible profile: clamped into the box and
// made nondecreasing across blocks.
BidProfile leader_candidate(const BestResponseMilp& model, const CaseData& data,
                            const BidProfile& current,
                            const std::map<std::string, std::vector<double>>& v) {
  BidProfile bids = current;
  const double cap = model.market == Market::kPower ? data.constants.alpha_max
                                                    : data.constants.delta_max;
  for (const auto& [asset, values] : v) {
    std::vector<double> b = values;
    double prev = 0.0;
    for (double& x : b) x = prev = std::clamp(std::max(x, prev), 0.0, cap);
    if (model.market == Market::kPower) {
      bids.unit_bids[asset] = b;
    } else {
      bids.well_bids[asset] = b.at(0);
    }
  }
  return bids;
}

std::vector<double> start_from(const BestResponseMilp& model,
                               const CaseData& data, const BidProfile& bids,
                               const CouplingState& coupling) {
  lp::LpSolution sol;
  try {
    if (model.market == Market::kPower) {
      sol = clear_electricity(data, bids, coupling).solution;
    } else {
      sol = clear_gas(data, bids, coupling).solution;
    }
  } catch (const InfeasibleClearing&) {
    return {};
  }
  std::vector<double> x(model.milp.lp.num_variables(), 0.0);
  const std::vector<double> k = kkt_point(model.kkt, sol);
  std::copy(k.begin(), k.end(), x.begin());
  for (const auto& [asset, vars] : model.bid_var) {
    for (size_t b = 0; b < vars.size(); ++b) {
      x[vars[b]] = model.market == Market::kPower ? bids.unit_bids.at(asset)[b]
                                                  : bids.well_bids.at(asset);
    }
  }
  for (const PairEncoding& e : model.pairs) {
    const ComplementarityPair& p = model.kkt.pairs[e.pair];
    const double s = p.slack.evaluate(k);
    x[e.binary] = s > 1e-9 * (1.0 + e.big_m_primal) ? 1.0 : 0.0;
    const lp::Variable& h = model.milp.lp.variable(e.binary);
    x[e.binary] = std::clamp(x[e.binary], h.lower, h.upper);
  }
  return x;
}

// Among bids that keep the profit found, picks the highest: bids that do
// not move the price or the dispatch are otherwise arbitrary. The binaries
// stay at the incumbent's values, so bids stop exactly where the active set
// would change (for example at a rival's offer) instead of drifting within
// the profit tolerance.
void prefer_high_bids(const BestResponseMilp& model,
                      const BestResponseOptions& options,
                      lp::MilpSolution& sol) {
  const double profit = model.profit.evaluate(sol.values);
  lp::MilpModel m = model.milp;
  for (int j = 0; j < m.lp.num_variables(); ++j) m.lp.set_cost(j, 0.0);
  m.lp.set_objective_offset(0.0);
  for (const auto& [_, vars] : model.bid_var) {
    for (int v : vars) m.lp.set_cost(v, -1.0);
  }
  for (int h : m.binaries) {
    const double v = std::round(sol.values[h]);
    m.lp.set_bounds(h, v, v);
  }
  m.lp.add_constraint("keep_profit", model.profit.terms,
                      Relation::kGreaterEqual,
                      profit - model.profit.constant -
                          1e-9 * (1.0 + std::abs(profit)));
  lp::MilpOptions opts;
  opts.gap = options.gap;
  opts.node_limit = options.node_limit;
  opts.starts.push_back(sol.values);
  const lp::MilpSolution second = lp::default_backend()->solve(m, opts);
  if (second.values.empty()) return;
  sol.values = second.values;
  sol.nodes += second.nodes;
}

}  // namespace

lp::MilpSolution solve_best_response_milp(const BestResponseMilp& model,
                                          const CaseData& data,
                                          const BidProfile& current,
                                          const CouplingState& coupling,
                                          const BestResponseOptions& options) {
  lp::MilpOptions opts;
  opts.gap = options.gap;
  opts.node_limit = options.node_limit;
  // Seeds: the producer's current bids, truthful bids and the caps.
  std::vector<std::map<std::string, std::vector<double>>> seeds(3);
  const BidProfile truthful = truthful_bids(data, coupling);
  for (const auto& [asset, vars] : model.bid_var) {
    const double cap = model.market == Market::kPower ? data.constants.alpha_max
                                                      : data.constants.delta_max;
    if (model.market == Market::kPower) {
      auto it = current.unit_bids.find(asset);
      seeds[0][asset] = it != current.unit_bids.end()
                            ? it->second
                            : std::vector<double>(vars.size(), cap);
      seeds[1][asset] = truthful.unit_bids.at(asset);
    } else {
      auto it = current.well_bids.find(asset);
      seeds[0][asset] = {it != current.well_bids.end() ? it->second : cap};
      seeds[1][asset] = {truthful.well_bids.at(asset)};
    }
    seeds[2][asset] = std::vector<double>(vars.size(), cap);
  }
  for (const auto& seed : seeds) {
    std::vector<double> x = start_from(
        model, data, leader_candidate(model, data, current, seed), coupling);
    if (!x.empty()) opts.starts.push_back(std::move(x));
  }
  return lp::default_backend()->solve(model.milp, opts);
}

BestResponse best_response(const std::string& producer, const CaseData& data,
                           const BidProfile& current,
                           const CouplingState& coupling,
                           const BestResponseOptions& options) {
  Market market = Market::kPower;
  bool found = false;
  for (const Producer& p : producers(data)) {
    if (p.id == producer && p.strategic) {
      market = p.market;
      found = true;
    }
  }
  if (!found) throw MpccError(producer + " is not a strategic producer");

  std::string last_issue;
  for (int esc = 0; esc <= options.max_escalations; ++esc) {
    BigMPolicy policy;
    policy.dual = options.big_m_dual * std::pow(2.0, esc);
    const BestResponseMilp model =
        market == Market::kPower
            ? build_sep_milp(producer, data, current, coupling, policy)
            : build_sgp_milp(producer, data, current, coupling, policy);
    lp::MilpSolution sol =
        solve_best_response_milp(model, data, current, coupling, options);
    if (!sol.values.empty()) prefer_high_bids(model, options, sol);
    if (sol.values.empty()) {
      last_issue = std::string("MILP ") + lp::to_string(sol.status);
      continue;
    }
    const double margin = big_m_margin(model, sol.values);
    if (margin < options.margin_threshold) {
      std::ostringstream msg;
      msg << "big-M margin " << margin << " below " << options.margin_threshold
          << " with M_d = " << policy.dual;
      last_issue = msg.str();
      continue;
    }
    BestResponse br;
    br.producer = producer;
    br.status = sol.status;
    br.gap = sol.gap;
    br.nodes = sol.nodes;
    br.big_m_dual = policy.dual;
    br.big_m_margin = margin;
    br.escalations = esc;
    for (const auto& [asset, vars] : model.bid_var) {
      std::vector<double> b;
      for (int v : vars) b.push_back(sol.values[v]);
      if (market == Market::kPower) {
        br.bids.unit_bids[asset] = b;
      } else {
        br.bids.well_bids[asset] = b[0];
      }
    }
    br.profit = model.profit.evaluate(sol.values);
    double cost = 0.0;
    for (size_t l = 0; l < model.leader.size(); ++l) {
      cost += model.true_cost[l] * sol.values[model.leader[l]];
    }
    br.bilinear_profit =
        bilinear_revenue(model.kkt, model.leader, sol.values) - cost;
    return br;
  }
  throw MpccError("best response of " + producer + " failed: " + last_issue);
}

std::string symbol_table(const BestResponseMilp& model) {
  std::ostringstream out;
  out << "index,name,symbol\n";
  for (int j = 0; j < model.milp.lp.num_variables(); ++j) {
    auto it = model.symbols.find(j);
    out << j << ',' << model.milp.lp.variable(j).name << ','
        << (it == model.symbols.end() ? "" : it->second) << '\n';
  }
  return out.str();
}

}  // namespace gepec

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

#include "gepec/case_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <set>
#include <sstream>

namespace gepec {

using nlohmann::json;

const char* to_string(Market market) {
  return market == Market::kPower ? "power" : "gas";
}

double GeneratingUnit::capacity() const {
  double c = 0.0;
  for (const EnergyBlock& b : blocks) c += b.capacity;
  return c;
}

const GeneratingUnit* CaseData::find_unit(const std::string& id) const {
  for (const GeneratingUnit& u : power.units) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

const GasWell* CaseData::find_well(const std::string& id) const {
  for (const GasWell& w : gas.wells) {
    if (w.id == id) return &w;
  }
  return nullptr;
}

const std::string& CaseData::reference_node() const {
  for (const PowerNode& n : power.nodes) {
    if (n.is_reference) return n.id;
  }
  throw std::logic_error("case has no reference node");
}

std::vector<Producer> producers(const CaseData& data) {
  std::vector<Producer> out;
  auto add = [&](const std::string& owner, Market market, bool strategic,
                 const std::string& asset) {
    for (Producer& p : out) {
      if (p.id == owner) {
        p.assets.push_back(asset);
        return;
      }
    }
    out.push_back({owner, market, strategic, {asset}});
  };
  for (const GeneratingUnit& u : data.power.units) {
    add(u.owner, Market::kPower, u.strategic, u.id);
  }
  for (const GasWell& w : data.gas.wells) {
    add(w.owner, Market::kGas, w.strategic, w.id);
  }
  return out;
}

std::vector<Producer> strategic_producers(const CaseData& data,
                                          Market market) {
  std::vector<Producer> out;
  for (Producer& p : producers(data)) {
    if (p.strategic && p.market == market) out.push_back(std::move(p));
  }
  return out;
}

BidProfile initial_bids(const CaseData& data) {
  BidProfile bids;
  for (const GeneratingUnit& u : data.power.units) {
    if (!u.strategic) continue;
    bids.unit_bids[u.id].assign(u.blocks.size(), data.constants.alpha_max);
  }
  for (const GasWell& w : data.gas.wells) {
    if (w.strategic) bids.well_bids[w.id] = data.constants.delta_max;
  }
  return bids;
}

double unit_block_cost(const CaseData& data, const GeneratingUnit& unit,
                       int block, const CouplingState& coupling) {
  const EnergyBlock& b = unit.blocks.at(block);
  if (!unit.gas_fired) return b.marginal_cost;
  auto it = coupling.lmgp.find(unit.gas_node);
  if (it == coupling.lmgp.end()) {
    throw std::invalid_argument("coupling has no LMGP for gas node " +
                                unit.gas_node);
  }
  return data.constants.tau * it->second / b.efficiency;
}

BidProfile truthful_bids(const CaseData& data, const CouplingState& coupling) {
  BidProfile bids;
  for (const GeneratingUnit& u : data.power.units) {
    if (!u.strategic) continue;
    std::vector<double>& v = bids.unit_bids[u.id];
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      double c = unit_block_cost(data, u, static_cast<int>(b), coupling);
      c = std::clamp(c, 0.0, data.constants.alpha_max);
      if (!v.empty()) c = std::max(c, v.back());
      v.push_back(c);
    }
  }
  for (const GasWell& w : data.gas.wells) {
    if (w.strategic) {
      bids.well_bids[w.id] =
          std::clamp(w.marginal_cost, 0.0, data.constants.delta_max);
    }
  }
  return bids;
}

void check_bids(const CaseData& data, const BidProfile& bids) {
  const double tol = 1e-9;
  for (const GeneratingUnit& u : data.power.units) {
    if (!u.strategic) continue;
    auto it = bids.unit_bids.find(u.id);
    if (it == bids.unit_bids.end() || it->second.size() != u.blocks.size()) {
      throw std::invalid_argument("missing or mis-sized bids for unit " + u.id);
    }
    for (size_t b = 0; b < it->second.size(); ++b) {
      const double a = it->second[b];
      if (!(a >= -tol && a <= data.constants.alpha_max + tol)) {
        throw std::invalid_argument("bid of unit " + u.id +
                                    " outside [0, alpha_max]");
      }
      if (b > 0 && a < it->second[b - 1] - tol) {
        throw std::invalid_argument("bids of unit " + u.id +
                                    " decrease across blocks");
      }
    }
  }
  for (const GasWell& w : data.gas.wells) {
    if (!w.strategic) continue;
    auto it = bids.well_bids.find(w.id);
    if (it == bids.well_bids.end()) {
      throw std::invalid_argument("missing bid for well " + w.id);
    }
    if (!(it->second >= -tol && it->second <= data.constants.delta_max + tol)) {
      throw std::invalid_argument("bid of well " + w.id +
                                  " outside [0, delta_max]");
    }
  }
}

CouplingState initial_coupling(const CaseData& data) {
  CouplingState c;
  for (const PowerNode& n : data.power.nodes) {
    c.lmep[n.id] = data.constants.alpha_max;
  }
  for (const GasNode& n : data.gas.nodes) {
    c.lmgp[n.id] = data.constants.delta_max;
  }
  for (const P2GFacility& z : data.p2g) c.p2g_demand[z.id] = 0.0;
  for (const GeneratingUnit& u : data.power.units) {
    if (u.gas_fired) c.gasfired_dispatch[u.id].assign(u.blocks.size(), 0.0);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Validation

std::string to_string(const Diagnostic& d) {
  return d.subject + ": " + d.message;
}

namespace {

class Checker {
 public:
  void fail(const std::string& subject, const std::string& message) {
    out.push_back({subject, message});
  }
  void check(bool ok, const std::string& subject, const std::string& message) {
    if (!ok) fail(subject, message);
  }
  // Registers ids of one collection; duplicates produce one diagnostic each.
  std::set<std::string> ids(const std::string& what,
                            const std::vector<std::string>& list) {
    std::set<std::string> seen;
    for (const std::string& id : list) {
      if (id.empty()) fail(what, "empty id");
      if (!seen.insert(id).second) fail(id, "duplicate " + what + " id");
    }
    return seen;
  }
  std::vector<Diagnostic> out;
};

template <typename T>
std::vector<std::string> collect_ids(const std::vector<T>& items) {
  std::vector<std::string> out;
  for (const T& t : items) out.push_back(t.id);
  return out;
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// Nodes not reachable from the first node, in declaration order.
std::vector<std::string> unreachable(
    const std::vector<std::string>& nodes,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  if (nodes.empty()) return {};
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<std::string> seen = {nodes.front()};
  std::vector<std::string> stack = {nodes.front()};
  while (!stack.empty()) {
    const std::string n = stack.back();
    stack.pop_back();
    for (const std::string& m : adj[n]) {
      if (seen.insert(m).second) stack.push_back(m);
    }
  }
  std::vector<std::string> out;
  for (const std::string& n : nodes) {
    if (!seen.contains(n)) out.push_back(n);
  }
  return out;
}

}  // namespace

std::vector<Diagnostic> validate_topology(const CaseData& data) {
  Checker c;
  const Constants& k = data.constants;
  const PowerNetwork& pw = data.power;
  const GasNetwork& gs = data.gas;

  const auto power_nodes = c.ids("power node", collect_ids(pw.nodes));
  const auto gas_nodes = c.ids("gas node", collect_ids(gs.nodes));
  c.ids("line", collect_ids(pw.lines));
  c.ids("unit", collect_ids(pw.units));
  c.ids("pipeline", collect_ids(gs.pipelines));
  c.ids("well", collect_ids(gs.wells));
  c.ids("p2g", collect_ids(data.p2g));
  std::vector<std::string> load_ids = collect_ids(pw.loads);
  for (const Load& l : gs.loads) load_ids.push_back(l.id);
  c.ids("load", load_ids);

  c.check(!pw.nodes.empty(), "power", "power network has no nodes");
  c.check(!gs.nodes.empty(), "gas", "gas network has no nodes");
  int refs = 0;
  for (const PowerNode& n : pw.nodes) refs += n.is_reference ? 1 : 0;
  if (!pw.nodes.empty()) {
    c.check(refs == 1, "power",
            "expected exactly one reference node, found " +
                std::to_string(refs));
  }

  c.check(positive(k.tau), "constants", "tau must be positive");
  c.check(positive(k.alpha_max), "constants", "alpha_max must be positive");
  c.check(positive(k.delta_max), "constants", "delta_max must be positive");
  const AlgorithmSettings& a = data.algorithm;
  c.check(positive(a.epsilon), "algorithm", "epsilon must be positive");
  c.check(a.r_max >= 1, "algorithm", "r_max must be at least 1");
  c.check(positive(a.big_m_dual), "algorithm", "big_m_dual must be positive");
  c.check(a.milp_gap >= 0.0 && a.milp_gap < 1.0, "algorithm",
          "milp_gap must lie in [0, 1)");

  std::vector<std::pair<std::string, std::string>> power_edges;
  for (const PowerLine& l : pw.lines) {
    c.check(power_nodes.contains(l.from_node), l.id,
            "unknown from_node " + l.from_node);
    c.check(power_nodes.contains(l.to_node), l.id,
            "unknown to_node " + l.to_node);
    c.check(l.from_node != l.to_node, l.id, "line connects a node to itself");
    c.check(positive(l.susceptance), l.id, "susceptance must be positive");
    if (l.capacity) c.check(positive(*l.capacity), l.id,
                            "capacity must be positive");
    power_edges.emplace_back(l.from_node, l.to_node);
  }

  for (const GeneratingUnit& u : pw.units) {
    c.check(power_nodes.contains(u.node), u.id, "unknown node " + u.node);
    c.check(!u.owner.empty(), u.id, "missing owner");
    c.check(!u.blocks.empty(), u.id, "unit has no energy blocks");
    if (u.gas_fired) {
      if (u.gas_node.empty()) {
        c.fail(u.id, "gas-fired unit has no gas_node");
      } else {
        c.check(gas_nodes.contains(u.gas_node), u.id,
                "unknown gas_node " + u.gas_node);
      }
    }
    bool caps_ok = true, eff_ok = true, costs_ok = true, monotone = true;
    for (size_t b = 0; b < u.blocks.size(); ++b) {
      const EnergyBlock& blk = u.blocks[b];
      caps_ok = caps_ok && positive(blk.capacity);
      eff_ok = eff_ok && blk.efficiency > 0.0 && blk.efficiency <= 1.0;
      costs_ok = costs_ok && std::isfinite(blk.marginal_cost);
      if (b > 0 && blk.marginal_cost < u.blocks[b - 1].marginal_cost) {
        monotone = false;
      }
    }
    c.check(caps_ok, u.id, "block capacities must be positive");
    c.check(eff_ok, u.id, "block efficiencies must lie in (0, 1]");
    c.check(costs_ok, u.id, "block marginal costs must be finite");
    if (!u.strategic && !u.gas_fired) {
      c.check(monotone, u.id, "marginal costs must be nondecreasing");
    }
    if (u.strategic && !u.gas_fired) {
      for (const EnergyBlock& blk : u.blocks) {
        if (!(k.alpha_max > blk.marginal_cost)) {
          c.fail(u.id, "alpha_max must exceed the unit's marginal costs");
          break;
        }
      }
    }
  }

  std::vector<std::pair<std::string, std::string>> gas_edges;
  for (const GasPipeline& p : gs.pipelines) {
    c.check(gas_nodes.contains(p.from_node), p.id,
            "unknown from_node " + p.from_node);
    c.check(gas_nodes.contains(p.to_node), p.id,
            "unknown to_node " + p.to_node);
    c.check(p.from_node != p.to_node, p.id,
            "pipeline connects a node to itself");
    if (p.capacity) c.check(positive(*p.capacity), p.id,
                            "capacity must be positive");
    gas_edges.emplace_back(p.from_node, p.to_node);
  }
  for (const GasWell& w : gs.wells) {
    c.check(gas_nodes.contains(w.node), w.id, "unknown node " + w.node);
    c.check(!w.owner.empty(), w.id, "missing owner");
    c.check(positive(w.capacity), w.id, "capacity must be positive");
    c.check(std::isfinite(w.marginal_cost) && w.marginal_cost >= 0.0, w.id,
            "marginal_cost must be nonnegative");
    if (w.strategic) {
      c.check(k.delta_max > w.marginal_cost, w.id,
              "delta_max must exceed the well's marginal cost");
    }
  }
  for (const P2GFacility& z : data.p2g) {
    c.check(power_nodes.contains(z.power_node), z.id,
            "unknown power_node " + z.power_node);
    c.check(gas_nodes.contains(z.gas_node), z.id,
            "unknown gas_node " + z.gas_node);
    c.check(z.efficiency > 0.0 && z.efficiency <= 1.0, z.id,
            "efficiency must lie in (0, 1]");
    if (z.power_capacity) c.check(positive(*z.power_capacity), z.id,
                                  "power_capacity must be positive");
  }
  for (const Load& l : pw.loads) {
    c.check(l.market == Market::kPower, l.id, "power load marked as gas");
    c.check(power_nodes.contains(l.node), l.id, "unknown node " + l.node);
    c.check(std::isfinite(l.demand) && l.demand >= 0.0, l.id,
            "demand must be nonnegative");
  }
  for (const Load& l : gs.loads) {
    c.check(l.market == Market::kGas, l.id, "gas load marked as power");
    c.check(gas_nodes.contains(l.node), l.id, "unknown node " + l.node);
    c.check(std::isfinite(l.demand) && l.demand >= 0.0, l.id,
            "demand must be nonnegative");
  }

  // An owner must be one kind of player in one market.
  std::map<std::string, std::pair<Market, bool>> owners;
  auto owner = [&](const std::string& id, Market m, bool strategic) {
    auto [it, fresh] = owners.emplace(id, std::make_pair(m, strategic));
    if (fresh) return;
    if (it->second.first != m) {
      c.fail(id, "producer owns assets in both markets");
      it->second.first = m;
    } else if (it->second.second != strategic) {
      c.fail(id, "producer mixes strategic and non-strategic assets");
      it->second.second = strategic;
    }
  };
  for (const GeneratingUnit& u : pw.units) {
    if (!u.owner.empty()) owner(u.owner, Market::kPower, u.strategic);
  }
  for (const GasWell& w : gs.wells) {
    if (!w.owner.empty()) owner(w.owner, Market::kGas, w.strategic);
  }

  for (const std::string& n : unreachable(collect_ids(pw.nodes), power_edges)) {
    c.fail(n, "power node is disconnected from the network");
  }
  for (const std::string& n : unreachable(collect_ids(gs.nodes), gas_edges)) {
    c.fail(n, "gas node is disconnected from the network");
  }
  return c.out;
}

CaseValidationError::CaseValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error([&] {
        std::string msg = "invalid case:";
        for (const Diagnostic& d : diagnostics) msg += "\n  " + to_string(d);
        return msg;
      }()),
      diagnostics_(std::move(diagnostics)) {}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& msg) {
  throw CaseParseError(where + ": " + msg);
}

void only_keys(const json& j, const std::string& where,
               std::initializer_list<const char*> keys) {
  if (!j.is_object()) parse_fail(where, "expected an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : keys) ok = ok || key == k;
    if (!ok) parse_fail(where, "unknown field '" + key + "'");
  }
}

const json& field(const json& j, const std::string& where, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) parse_fail(where, std::string("missing field '") + key + "'");
  return *it;
}

std::string get_string(const json& j, const std::string& where,
                       const char* key) {
  const json& v = field(j, where, key);
  if (!v.is_string()) parse_fail(where, std::string(key) + " must be a string");
  return v.get<std::string>();
}

double get_number(const json& v, const std::string& where, const char* key) {
  if (!v.is_number()) parse_fail(where, std::string(key) + " must be a number");
  return v.get<double>();
}

double get_number(const json& j, const std::string& where, const char* key,
                  std::optional<double> fallback) {
  auto it = j.find(key);
  if (it == j.end()) {
    if (!fallback) parse_fail(where, std::string("missing field '") + key + "'");
    return *fallback;
  }
  return get_number(*it, where, key);
}

std::optional<double> get_optional(const json& j, const std::string& where,
                                   const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return get_number(*it, where, key);
}

bool get_bool(const json& j, const std::string& where, const char* key,
              bool fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_boolean()) parse_fail(where, std::string(key) + " must be a boolean");
  return it->get<bool>();
}

const json& get_array(const json& j, const std::string& where,
                      const char* key) {
  static const json empty = json::array();
  auto it = j.find(key);
  if (it == j.end()) return empty;
  if (!it->is_array()) parse_fail(where, std::string(key) + " must be an array");
  return *it;
}

std::string where_of(const std::string& list, const json& item, size_t i) {
  if (item.is_object() && item.contains("id") && item["id"].is_string()) {
    return list + " '" + item["id"].get<std::string>() + "'";
  }
  return list + "[" + std::to_string(i) + "]";
}

Load parse_load(const json& j, const std::string& w, Market market) {
  only_keys(j, w, {"id", "node", "demand", "market"});
  Load l{get_string(j, w, "id"), get_string(j, w, "node"),
         get_number(j, w, "demand", std::nullopt), market};
  if (j.contains("market")) {
    const std::string m = get_string(j, w, "market");
    if (m == "power") {
      l.market = Market::kPower;
    } else if (m == "gas") {
      l.market = Market::kGas;
    } else {
      parse_fail(w, "market must be 'power' or 'gas'");
    }
  }
  return l;
}

GeneratingUnit parse_unit(const json& j, const std::string& w) {
  only_keys(j, w, {"id", "node", "owner", "strategic", "gas_fired", "gas_node",
                   "efficiency", "blocks"});
  GeneratingUnit u;
  u.id = get_string(j, w, "id");
  u.node = get_string(j, w, "node");
  u.owner = get_string(j, w, "owner");
  u.strategic = get_bool(j, w, "strategic", false);
  u.gas_fired = get_bool(j, w, "gas_fired", false);
  if (j.contains("gas_node") && !j["gas_node"].is_null()) {
    u.gas_node = get_string(j, w, "gas_node");
  }
  const json& blocks = get_array(j, w, "blocks");
  for (size_t b = 0; b < blocks.size(); ++b) {
    const std::string wb = w + " block " + std::to_string(b);
    only_keys(blocks[b], wb, {"capacity", "marginal_cost", "efficiency"});
    EnergyBlock blk;
    blk.capacity = get_number(blocks[b], wb, "capacity", std::nullopt);
    blk.marginal_cost = get_number(blocks[b], wb, "marginal_cost", 0.0);
    blk.efficiency = get_number(blocks[b], wb, "efficiency", 1.0);
    u.blocks.push_back(blk);
  }
  // Unit-level efficiency: one number for all blocks or one per block.
  if (auto it = j.find("efficiency"); it != j.end()) {
    if (it->is_array()) {
      if (it->size() != u.blocks.size()) {
        parse_fail(w, "efficiency needs one entry per block");
      }
      for (size_t b = 0; b < u.blocks.size(); ++b) {
        u.blocks[b].efficiency = get_number((*it)[b], w, "efficiency");
      }
    } else {
      const double e = get_number(*it, w, "efficiency");
      for (EnergyBlock& blk : u.blocks) blk.efficiency = e;
    }
  }
  return u;
}

template <typename F>
void for_items(const json& parent, const std::string& where, const char* key,
               F&& f) {
  const json& arr = get_array(parent, where, key);
  for (size_t i = 0; i < arr.size(); ++i) {
    f(arr[i], where_of(key, arr[i], i));
  }
}

}  // namespace

CaseData case_from_json(const json& j) {
  only_keys(j, "case", {"name", "power", "gas", "p2g", "constants",
                        "algorithm"});
  CaseData d;
  if (j.contains("name")) d.name = get_string(j, "case", "name");

  const json& pw = field(j, "case", "power");
  only_keys(pw, "power", {"nodes", "lines", "units", "loads"});
  for_items(pw, "power", "nodes", [&](const json& x, const std::string& w) {
    only_keys(x, w, {"id", "is_reference"});
    d.power.nodes.push_back(
        {get_string(x, w, "id"), get_bool(x, w, "is_reference", false)});
  });
  for_items(pw, "power", "lines", [&](const json& x, const std::string& w) {
    only_keys(x, w, {"id", "from_node", "to_node", "susceptance", "capacity"});
    d.power.lines.push_back({get_string(x, w, "id"),
                             get_string(x, w, "from_node"),
                             get_string(x, w, "to_node"),
                             get_number(x, w, "susceptance", std::nullopt),
                             get_optional(x, w, "capacity")});
  });
  for_items(pw, "power", "units", [&](const json& x, const std::string& w) {
    d.power.units.push_back(parse_unit(x, w));
  });
  for_items(pw, "power", "loads", [&](const json& x, const std::string& w) {
    d.power.loads.push_back(parse_load(x, w, Market::kPower));
  });

  const json& gs = field(j, "case", "gas");
  only_keys(gs, "gas", {"nodes", "pipelines", "wells", "loads"});
  for_items(gs, "gas", "nodes", [&](const json& x, const std::string& w) {
    only_keys(x, w, {"id"});
    d.gas.nodes.push_back({get_string(x, w, "id")});
  });
  for_items(gs, "gas", "pipelines", [&](const json& x, const std::string& w) {
    only_keys(x, w, {"id", "from_node", "to_node", "capacity", "active"});
    d.gas.pipelines.push_back({get_string(x, w, "id"),
                               get_string(x, w, "from_node"),
                               get_string(x, w, "to_node"),
                               get_optional(x, w, "capacity"),
                               get_bool(x, w, "active", false)});
  });
  for_items(gs, "gas", "wells", [&](const json& x, const std::string& w) {
    only_keys(x, w, {"id", "node", "owner", "strategic", "capacity",
                     "marginal_cost"});
    d.gas.wells.push_back({get_string(x, w, "id"), get_string(x, w, "node"),
                           get_string(x, w, "owner"),
                           get_bool(x, w, "strategic", false),
                           get_number(x, w, "capacity", std::nullopt),
                           get_number(x, w, "marginal_cost", std::nullopt)});
  });
  for_items(gs, "gas", "loads", [&](const json& x, const std::string& w) {
    d.gas.loads.push_back(parse_load(x, w, Market::kGas));
  });

  for_items(j, "case", "p2g", [&](const json& x, const std::string& w) {
    only_keys(x, w, {"id", "power_node", "gas_node", "efficiency",
                     "power_capacity"});
    d.p2g.push_back({get_string(x, w, "id"), get_string(x, w, "power_node"),
                     get_string(x, w, "gas_node"),
                     get_number(x, w, "efficiency", std::nullopt),
                     get_optional(x, w, "power_capacity")});
  });

  const json& k = field(j, "case", "constants");
  only_keys(k, "constants", {"tau", "alpha_max", "delta_max"});
  d.constants.tau = get_number(k, "constants", "tau", std::nullopt);
  d.constants.alpha_max = get_number(k, "constants", "alpha_max", std::nullopt);
  d.constants.delta_max = get_number(k, "constants", "delta_max", std::nullopt);

  if (j.contains("algorithm")) {
    const json& a = j["algorithm"];
    only_keys(a, "algorithm", {"epsilon", "r_max", "big_m_dual", "milp_gap"});
    AlgorithmSettings& s = d.algorithm;
    s.epsilon = get_number(a, "algorithm", "epsilon", s.epsilon);
    const double r = get_number(a, "algorithm", "r_max", s.r_max);
    if (r != std::floor(r)) parse_fail("algorithm", "r_max must be an integer");
    s.r_max = static_cast<int>(r);
    s.big_m_dual = get_number(a, "algorithm", "big_m_dual", s.big_m_dual);
    s.milp_gap = get_number(a, "algorithm", "milp_gap", s.milp_gap);
  }
  return d;
}

json case_to_json(const CaseData& d) {
  json j;
  if (!d.name.empty()) j["name"] = d.name;
  json& pw = j["power"];
  pw["nodes"] = json::array();
  for (const PowerNode& n : d.power.nodes) {
    pw["nodes"].push_back({{"id", n.id}, {"is_reference", n.is_reference}});
  }
  pw["lines"] = json::array();
  for (const PowerLine& l : d.power.lines) {
    json x = {{"id", l.id},
              {"from_node", l.from_node},
              {"to_node", l.to_node},
              {"susceptance", l.susceptance}};
    if (l.capacity) x["capacity"] = *l.capacity;
    pw["lines"].push_back(x);
  }
  pw["units"] = json::array();
  for (const GeneratingUnit& u : d.power.units) {
    json x = {{"id", u.id},
              {"node", u.node},
              {"owner", u.owner},
              {"strategic", u.strategic},
              {"gas_fired", u.gas_fired}};
    if (!u.gas_node.empty()) x["gas_node"] = u.gas_node;
    x["efficiency"] = json::array();
    x["blocks"] = json::array();
    for (const EnergyBlock& b : u.blocks) {
      x["efficiency"].push_back(b.efficiency);
      x["blocks"].push_back(
          {{"capacity", b.capacity}, {"marginal_cost", b.marginal_cost}});
    }
    pw["units"].push_back(x);
  }
  auto loads = [](const std::vector<Load>& list) {
    json arr = json::array();
    for (const Load& l : list) {
      arr.push_back({{"id", l.id},
                     {"node", l.node},
                     {"demand", l.demand},
                     {"market", to_string(l.market)}});
    }
    return arr;
  };
  pw["loads"] = loads(d.power.loads);

  json& gs = j["gas"];
  gs["nodes"] = json::array();
  for (const GasNode& n : d.gas.nodes) gs["nodes"].push_back({{"id", n.id}});
  gs["pipelines"] = json::array();
  for (const GasPipeline& p : d.gas.pipelines) {
    json x = {{"id", p.id},
              {"from_node", p.from_node},
              {"to_node", p.to_node},
              {"active", p.active}};
    if (p.capacity) x["capacity"] = *p.capacity;
    gs["pipelines"].push_back(x);
  }
  gs["wells"] = json::array();
  for (const GasWell& w : d.gas.wells) {
    gs["wells"].push_back({{"id", w.id},
                           {"node", w.node},
                           {"owner", w.owner},
                           {"strategic", w.strategic},
                           {"capacity", w.capacity},
                           {"marginal_cost", w.marginal_cost}});
  }
  gs["loads"] = loads(d.gas.loads);

  j["p2g"] = json::array();
  for (const P2GFacility& z : d.p2g) {
    json x = {{"id", z.id},
              {"power_node", z.power_node},
              {"gas_node", z.gas_node},
              {"efficiency", z.efficiency}};
    if (z.power_capacity) x["power_capacity"] = *z.power_capacity;
    j["p2g"].push_back(x);
  }
  j["constants"] = {{"tau", d.constants.tau},
                    {"alpha_max", d.constants.alpha_max},
                    {"delta_max", d.constants.delta_max}};
  j["algorithm"] = {{"epsilon", d.algorithm.epsilon},
                    {"r_max", d.algorithm.r_max},
                    {"big_m_dual", d.algorithm.big_m_dual},
                    {"milp_gap", d.algorithm.milp_gap}};
  return j;
}

CaseData parse_case(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CaseParseError(std::string("malformed case file: ") + e.what());
  }
  CaseData d = case_from_json(j);
  std::vector<Diagnostic> diags = validate_topology(d);
  if (!diags.empty()) throw CaseValidationError(std::move(diags));
  return d;
}

CaseData load_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CaseParseError("cannot open case file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_case(ss.str());
}

void save_case(const CaseData& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << case_to_json(data).dump(2) << '\n';
}

CaseData relaxed_capacities(const CaseData& data) {
  CaseData out = data;
  for (PowerLine& l : out.power.lines) l.capacity.reset();
  for (GasPipeline& p : out.gas.pipelines) p.capacity.reset();
  return out;
}

CaseData scale_loads(const CaseData& data, double elr, double glr) {
  CaseData out = data;
  for (Load& l : out.power.loads) l.demand *= elr;
  for (Load& l : out.gas.loads) l.demand *= glr;
  return out;
}

json to_json(const BidProfile& bids) {
  return {{"units", bids.unit_bids}, {"wells", bids.well_bids}};
}

BidProfile bids_from_json(const json& j) {
  BidProfile b;
  try {
    if (j.contains("units")) {
      b.unit_bids = j["units"].get<std::map<std::string, std::vector<double>>>();
    }
    if (j.contains("wells")) {
      b.well_bids = j["wells"].get<std::map<std::string, double>>();
    }
  } catch (const json::exception& e) {
    throw CaseParseError(std::string("malformed bids: ") + e.what());
  }
  return b;
}

json to_json(const CouplingState& c) {
  return {{"lmep", c.lmep},
          {"lmgp", c.lmgp},
          {"p2g_demand", c.p2g_demand},
          {"gasfired_dispatch", c.gasfired_dispatch}};
}

CouplingState coupling_from_json(const json& j) {
  CouplingState c;
  try {
    c.lmep = j.at("lmep").get<std::map<std::string, double>>();
    c.lmgp = j.at("lmgp").get<std::map<std::string, double>>();
    c.p2g_demand = j.at("p2g_demand").get<std::map<std::string, double>>();
    c.gasfired_dispatch =
        j.at("gasfired_dispatch")
            .get<std::map<std::string, std::vector<double>>>();
  } catch (const json::exception& e) {
    throw CaseParseError(std::string("malformed coupling state: ") + e.what());
  }
  return c;
}

}  // namespace gepec

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

// gepec: strategic bidding equilibria of coupled power and gas pool markets.
//
// Exit codes: 0 ok, 1 error, 2 not converged, 3 verification failed,
// 64 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "gepec/case_model.hpp"
#include "gepec/clearing.hpp"
#include "gepec/equilibrium.hpp"
#include "gepec/sweep.hpp"
#include "gepec/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNotConverged = 2;
constexpr int kVerifyFailed = 3;
constexpr int kUsage = 64;

// A bad flag value or a violated precondition.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Overrides {
  std::optional<double> epsilon;
  std::optional<int> r_max;
  std::optional<double> gap;
  std::optional<double> big_m_dual;
  std::optional<int> multi_start;
  std::uint64_t seed = 1;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--epsilon", o.epsilon, "relative convergence tolerance");
  cmd->add_option("--rmax", o.r_max, "iteration cap of every DA loop");
  cmd->add_option("--gap", o.gap, "relative MILP gap");
  cmd->add_option("--bigm-dual", o.big_m_dual, "initial dual big-M");
}

gepec::DaConfig make_config(const gepec::CaseData& data, const Overrides& o) {
  gepec::DaConfig cfg = gepec::DaConfig::from(data.algorithm);
  if (o.epsilon) cfg.epsilon = *o.epsilon;
  if (o.r_max) cfg.r_max = *o.r_max;
  if (o.gap) cfg.milp_gap = *o.gap;
  if (o.big_m_dual) cfg.big_m_dual = *o.big_m_dual;
  if (o.multi_start) cfg.multi_start = *o.multi_start;
  cfg.seed = o.seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

gepec::CaseData load_market_case(const std::string& path, bool congested) {
  gepec::CaseData data = gepec::load_case(path);
  return congested ? data : gepec::relaxed_capacities(data);
}

json read_json(const std::string& path, const char* what) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(std::string("cannot open ") + what + ": " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw gepec::CaseParseError(std::string(what) + " " + path + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

fs::path make_out_dir(const std::string& out) {
  fs::path dir(out);
  fs::create_directories(dir);
  return dir;
}

// ---- run

struct RunArgs {
  std::string case_path;
  bool congested = false;
  std::string out = "out";
  bool dump_models = false;
  bool no_verify = false;
  Overrides overrides;
};

int cmd_run(const RunArgs& a) {
  const gepec::CaseData data = load_market_case(a.case_path, a.congested);
  gepec::DaConfig cfg = make_config(data, a.overrides);
  const fs::path dir = make_out_dir(a.out);
  if (a.dump_models) cfg.dump_dir = (dir / "models").string();

  json starts = json::array();
  gepec::EquilibriumReport report;
  if (cfg.multi_start > 0) {
    std::vector<gepec::EquilibriumReport> all = gepec::outer_da_multi_start(data, cfg);
    int chosen = -1;
    for (size_t k = 0; k < all.size(); ++k) {
      starts.push_back({{"start", k}, {"status", all[k].status},
                        {"rounds", all[k].trace.rounds.size()}});
      if (chosen < 0 && all[k].converged) chosen = static_cast<int>(k);
    }
    report = std::move(all[chosen < 0 ? 0 : chosen]);
  } else {
    report = gepec::outer_da(data, cfg);
  }

  bool verify_failed = false;
  if (report.converged && !a.no_verify) {
    const gepec::VerificationVerdict v = gepec::certify_equilibrium(report);
    report.verdict = gepec::to_json(v);
    write_file(dir / "verdict.csv", gepec::verdict_table(v));
    verify_failed = !v.pass;
  }

  write_file(dir / "report.json", gepec::to_json(report).dump(2) + "\n");
  write_file(dir / "table.csv", gepec::report_csv(report));
  write_file(dir / "prices.csv", gepec::prices_csv(report));
  write_file(dir / "exchange.csv", gepec::exchange_csv(report));
  write_file(dir / "trace.csv", gepec::trace_csv(report));

  if (!report.converged) std::cerr << "gepec: " << report.status << ": " << report.message << "\n";
  json summary = {{"command", "run"},
                  {"status", report.status},
                  {"converged", report.converged},
                  {"rounds", report.trace.rounds.size()},
                  {"out", dir.string()}};
  if (report.verdict) summary["verified"] = (*report.verdict)["pass"];
  if (!starts.empty()) summary["starts"] = starts;
  std::cout << summary.dump() << "\n";

  if (report.status == "error") return kError;
  if (!report.converged) return kNotConverged;
  return verify_failed ? kVerifyFailed : kOk;
}

// ---- clear

struct ClearArgs {
  std::string case_path;
  bool congested = false;
  std::string market = "both";
  std::string bids_path;
  std::string coupling_path;
  std::string out;
};

int cmd_clear(const ClearArgs& a) {
  const gepec::CaseData data = load_market_case(a.case_path, a.congested);
  gepec::CouplingState coupling =
      a.coupling_path.empty()
          ? gepec::initial_coupling(data)
          : gepec::coupling_from_json(read_json(a.coupling_path, "coupling"));
  const gepec::BidProfile bids =
      a.bids_path.empty() ? gepec::truthful_bids(data, coupling)
                          : gepec::bids_from_json(read_json(a.bids_path, "bids"));
  gepec::check_bids(data, bids);

  std::optional<gepec::ElectricityClearing> e;
  std::optional<gepec::GasClearing> g;
  if (a.market != "gas") {
    e = gepec::clear_electricity(data, bids, coupling);
    gepec::update_coupling(*e, coupling);
  }
  if (a.market != "power") {
    g = gepec::clear_gas(data, bids, coupling);
    gepec::update_coupling(*g, coupling);
  }

  json out = {{"command", "clear"}, {"market", a.market}};
  if (e) out["electricity"] = gepec::to_json(*e);
  if (g) out["gas"] = gepec::to_json(*g);
  if (a.out.empty()) {
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  const fs::path dir = make_out_dir(a.out);
  write_file(dir / "clearing.json", out.dump(2) + "\n");
  write_file(dir / "clearing.csv",
             gepec::clearing_csv(e ? &*e : nullptr, g ? &*g : nullptr));
  std::cout << json{{"command", "clear"}, {"market", a.market},
                    {"out", dir.string()}}.dump()
            << "\n";
  return kOk;
}

// ---- sweep

struct SweepArgs {
  std::string case_path;
  bool congested = false;
  std::string elr = "1";
  std::string glr = "1";
  std::string out = "sweep";
  Overrides overrides;
};

int cmd_sweep(const SweepArgs& a) {
  gepec::SweepSpec spec;
  try {
    spec.elr = gepec::parse_range(a.elr);
    spec.glr = gepec::parse_range(a.glr);
    spec.congested = a.congested;
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const gepec::CaseData data = gepec::load_case(a.case_path);
  const gepec::DaConfig cfg = make_config(data, a.overrides);
  const gepec::SweepResult r = gepec::run_sweep(data, spec, cfg);

  const fs::path dir = make_out_dir(a.out);
  write_file(dir / "sweep_prices.csv", gepec::sweep_prices_csv(r));
  write_file(dir / "sweep_cells.csv", gepec::sweep_cells_csv(r));

  long converged = 0;
  for (const gepec::SweepCell& c : r.cells) converged += c.converged ? 1 : 0;
  for (const std::string& v : r.feasibility_violations) {
    std::cerr << "gepec: feasibility not monotone: " << v << "\n";
  }
  std::cout << json{{"command", "sweep"},
                    {"cells", r.cells.size()},
                    {"converged", converged},
                    {"feasibility_violations", r.feasibility_violations.size()},
                    {"out", dir.string()}}.dump()
            << "\n";
  return converged == static_cast<long>(r.cells.size()) ? kOk : kNotConverged;
}

// ---- verify

struct VerifyArgs {
  std::string report_path;
  std::string case_path;
  std::string out;
  int levels = 50;
};

int cmd_verify(const VerifyArgs& a) {
  gepec::EquilibriumReport report =
      gepec::report_from_json(read_json(a.report_path, "report"));
  if (!a.case_path.empty()) report.data = gepec::load_case(a.case_path);
  if (!report.converged) {
    throw UsageError("report " + a.report_path + " is not a converged equilibrium");
  }
  gepec::GridOracleConfig grid;
  grid.levels = a.levels;
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const gepec::VerificationVerdict v = gepec::certify_equilibrium(report, grid);
  if (!a.out.empty()) {
    const fs::path dir = make_out_dir(a.out);
    write_file(dir / "verdict.json", gepec::to_json(v).dump(2) + "\n");
    write_file(dir / "verdict.csv", gepec::verdict_table(v));
  }
  std::cout << gepec::verdict_table(v);
  if (!v.pass) std::cerr << "gepec: verification failed\n";
  return v.pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Strategic bidding equilibria of coupled power and gas markets"};
  app.require_subcommand(1);

  RunArgs run;
  CLI::App* run_cmd = app.add_subcommand("run", "compute an equilibrium");
  run_cmd->add_option("--case", run.case_path, "case JSON")->required();
  run_cmd->add_flag("--congested", run.congested, "enforce line and pipeline capacities");
  run_cmd->add_option("--out", run.out, "output directory");
  run_cmd->add_flag("--dump-models", run.dump_models, "write every best-response MILP as LP text");
  run_cmd->add_flag("--no-verify", run.no_verify, "skip certification of the result");
  run_cmd->add_option("--multi-start", run.overrides.multi_start, "perturbed restarts");
  run_cmd->add_option("--seed", run.overrides.seed, "seed of the restarts");
  add_overrides(run_cmd, run.overrides);

  ClearArgs clear;
  CLI::App* clear_cmd = app.add_subcommand("clear", "clear one or both markets at given bids");
  clear_cmd->add_option("--case", clear.case_path, "case JSON")->required();
  clear_cmd->add_flag("--congested", clear.congested, "enforce line and pipeline capacities");
  clear_cmd->add_option("--market", clear.market, "power, gas or both")
      ->check(CLI::IsMember({"power", "gas", "both"}));
  clear_cmd->add_option("--bids", clear.bids_path, "bid profile JSON (default: true costs)");
  clear_cmd->add_option("--coupling", clear.coupling_path, "coupling state JSON");
  clear_cmd->add_option("--out", clear.out, "output directory (default: JSON on stdout)");

  SweepArgs sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "equilibria over a grid of load ratios");
  sweep_cmd->add_option("--case", sweep.case_path, "case JSON")->required();
  sweep_cmd->add_flag("--congested", sweep.congested, "enforce line and pipeline capacities");
  sweep_cmd->add_option("--elr", sweep.elr, "electricity load ratios a:b:s");
  sweep_cmd->add_option("--glr", sweep.glr, "gas load ratios a:b:s");
  sweep_cmd->add_option("--out", sweep.out, "output directory");
  add_overrides(sweep_cmd, sweep.overrides);

  VerifyArgs verify;
  CLI::App* verify_cmd = app.add_subcommand("verify", "certify a saved equilibrium report");
  verify_cmd->add_option("--report", verify.report_path, "report.json of a run")->required();
  verify_cmd->add_option("--case", verify.case_path, "case JSON replacing the embedded one");
  verify_cmd->add_option("--out", verify.out, "output directory");
  verify_cmd->add_option("--levels", verify.levels, "grid levels per bid");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e);
      return kOk;
    }
    std::cerr << "gepec: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*clear_cmd) return cmd_clear(clear);
    if (*sweep_cmd) return cmd_sweep(sweep);
    return cmd_verify(verify);
  } catch (const UsageError& e) {
    std::cerr << "gepec: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "gepec: " << e.what() << "\n";
    return kError;
  }
}

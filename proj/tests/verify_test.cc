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

#include <gtest/gtest.h>

#include <stdexcept>

#include "gepec/solver_backend.hpp"
#include "gepec/verify.hpp"
#include "test_cases.hpp"

namespace gepec {
namespace {

using testing::data_file;

Producer strategic(const CaseData& c, const std::string& id) {
  for (const Producer& p : producers(c)) {
    if (p.id == id) return p;
  }
  throw std::out_of_range(id);
}

TEST(GridTest, SizeCountsNondecreasingTuples) {
  CaseData c = load_case(data_file("minimal.json"));
  EXPECT_EQ(grid_size(c, strategic(c, "SEP1"), 50), 50);
  EXPECT_EQ(grid_size(c, strategic(c, "SGP1"), 50), 50);
  c.power.units[0].blocks = {{50, 10, 1}, {50, 12, 1}};
  EXPECT_EQ(grid_size(c, strategic(c, "SEP1"), 50), 1275);  // C(51, 2)
  c.power.units.push_back(c.power.units[0]);
  c.power.units.back().id = "U2";
  EXPECT_EQ(grid_size(c, strategic(c, "SEP1"), 50), 1275 * 1275);
}

TEST(GridTest, BudgetIsEnforced) {
  CaseData c = load_case(data_file("minimal.json"));
  c.power.units[0].blocks = {{50, 10, 1}, {50, 12, 1}};
  c.power.units.push_back(c.power.units[0]);
  c.power.units.back().id = "U2";
  EXPECT_THROW(grid_best_response("SEP1", c, initial_bids(c), initial_coupling(c)),
               BudgetExceeded);
  GridOracleConfig cfg;
  cfg.levels = 1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(GridTest, MonopolyFindsTheCap) {
  const CaseData c = load_case(data_file("minimal.json"));
  BidProfile bids = initial_bids(c);
  bids.unit_bids["U1"] = {15};
  const GridResult r = grid_best_response("SEP1", c, bids, initial_coupling(c));
  EXPECT_EQ(r.bids.unit_bids.at("U1")[0], 40.0);
  EXPECT_NEAR(r.profit, 1500.0, 1e-9);
  EXPECT_EQ(r.points, 51);  // 50 levels plus the current bid
  EXPECT_NEAR(r.step, 40.0 / 49, 1e-12);
}

TEST(CheckKktTest, OptimalClearingIsClean) {
  const CaseData c = testing::two_bus(50, 10, 20, 80);
  const ElectricityClearing e = clear_electricity(c, {}, initial_coupling(c));
  EXPECT_LT(check_kkt(e.solution, derive_kkt(e.lp)), 1e-9);
}

TEST(CertifyTest, MonopolyPasses) {
  const CaseData c = load_case(data_file("minimal.json"));
  const EquilibriumReport r = outer_da(c, {});
  ASSERT_TRUE(r.converged);
  const VerificationVerdict v = certify_equilibrium(r);
  EXPECT_TRUE(v.pass);
  EXPECT_FALSE(v.partial);
  ASSERT_EQ(v.producers.size(), 2u);
  for (const ProducerVerdict& p : v.producers) {
    EXPECT_TRUE(p.checked);
    EXPECT_NEAR(p.regret, 0.0, 1e-9);
  }
  // No pair dual is positive: bids equal prices and nothing is congested.
  EXPECT_EQ(v.big_m_margin, 1.0);
}

TEST(CertifyTest, TamperedBidFails) {
  const CaseData c = relaxed_capacities(load_case(data_file("case6_7.json")));
  EquilibriumReport r = outer_da(c, {});
  ASSERT_TRUE(r.converged);
  ASSERT_TRUE(certify_equilibrium(r).pass);
  for (double& b : r.bids.unit_bids.at("P1")) b *= 1.2;
  const VerificationVerdict v = certify_equilibrium(r);
  EXPECT_FALSE(v.pass);
  EXPECT_FALSE(v.regret_pass);
  for (const ProducerVerdict& p : v.producers) {
    if (p.producer == "SEP1") EXPECT_GT(p.regret, p.threshold);
  }
}

TEST(CertifyTest, NonConvergedReportIsRejected) {
  const CaseData c = load_case(data_file("case6_7.json"));
  DaConfig cfg;
  cfg.r_max = 1;
  const EquilibriumReport r = outer_da(c, cfg);
  ASSERT_FALSE(r.converged);
  EXPECT_THROW(certify_equilibrium(r), std::invalid_argument);
}

TEST(CertifyTest, VerdictSerialization) {
  const EquilibriumReport r = outer_da(load_case(data_file("minimal.json")), {});
  const VerificationVerdict v = certify_equilibrium(r);
  const nlohmann::json j = to_json(v);
  EXPECT_EQ(j.at("pass"), true);
  EXPECT_EQ(j.at("producers").size(), 2u);
  const std::string table = verdict_table(v);
  EXPECT_EQ(table.rfind("check,value,threshold,result\n", 0), 0u);
  EXPECT_NE(table.find("regret:SEP1"), std::string::npos);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 1 + 3 + 2);
}

}  // namespace
}  // namespace gepec

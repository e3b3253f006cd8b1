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

#include "gepec/sweep.hpp"
#include "test_cases.hpp"

namespace gepec {
namespace {

using testing::data_file;

TEST(RangeTest, Parse) {
  const std::vector<double> v = parse_range("0.7:1.3:0.2").values();
  ASSERT_EQ(v.size(), 4u);
  EXPECT_NEAR(v[0], 0.7, 1e-12);
  EXPECT_NEAR(v[3], 1.3, 1e-12);
  EXPECT_EQ(parse_range("1.1").values(), std::vector<double>{1.1});
  EXPECT_EQ(parse_range("1:2:1").values().size(), 2u);
  EXPECT_THROW(parse_range("a:b"), std::invalid_argument);
  EXPECT_THROW(parse_range("1:2"), std::invalid_argument);
  EXPECT_THROW(parse_range("1x"), std::invalid_argument);
}

TEST(RangeTest, ZeroStepIsRejected) {
  SweepSpec spec;
  spec.elr = parse_range("1");
  spec.glr = parse_range("1:1:0");
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.glr = parse_range("1.2:1:0.1");
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(SweepTest, SingleCell) {
  const CaseData c = load_case(data_file("minimal.json"));
  SweepSpec spec;
  const SweepResult r = run_sweep(c, spec, {});
  ASSERT_EQ(r.cells.size(), 1u);
  EXPECT_TRUE(r.cells[0].converged);
  EXPECT_EQ(r.cells[0].lmep.at("b1"), 40.0);
  EXPECT_EQ(r.cells[0].lmgp.at("g1"), 2.0);
  EXPECT_NEAR(r.cells[0].power_cost, 500.0, 1e-9);
  EXPECT_NEAR(r.cells[0].gas_cost, 500.0, 1e-9);
}

TEST(SweepTest, GridOrderAndCount) {
  const CaseData c = load_case(data_file("minimal.json"));
  SweepSpec spec;
  spec.elr = parse_range("0.5:1.5:0.5");
  spec.glr = parse_range("0.5:1.5:0.5");
  const SweepResult r = run_sweep(c, spec, {});
  ASSERT_EQ(r.cells.size(), 9u);
  EXPECT_EQ(r.cells[1].elr, 0.5);
  EXPECT_EQ(r.cells[1].glr, 1.0);
  EXPECT_EQ(r.cells[3].elr, 1.0);
  for (const SweepCell& cell : r.cells) EXPECT_TRUE(cell.converged);
  const std::string cells = sweep_cells_csv(r);
  EXPECT_EQ(std::count(cells.begin(), cells.end(), '\n'), 10);
  EXPECT_EQ(sweep_prices_csv(r).rfind("elr,glr,market,node,price\n", 0), 0u);
}

TEST(SweepTest, InfeasibleCellsAreMarked) {
  // 50 MW of load against 100 MW of capacity.
  const CaseData c = load_case(data_file("minimal.json"));
  SweepSpec spec;
  spec.elr = parse_range("1:3:1");
  const SweepResult r = run_sweep(c, spec, {});
  ASSERT_EQ(r.cells.size(), 3u);
  EXPECT_TRUE(r.cells[0].feasible);
  EXPECT_TRUE(r.cells[1].feasible);
  EXPECT_FALSE(r.cells[2].feasible);
  EXPECT_FALSE(r.cells[2].converged);
  EXPECT_TRUE(r.feasibility_violations.empty());
}

TEST(SweepTest, LooseCapacitiesMakeCongestionIrrelevant) {
  CaseData c = load_case(data_file("case6_7.json"));
  for (PowerLine& l : c.power.lines) *l.capacity *= 1000;
  for (GasPipeline& p : c.gas.pipelines) *p.capacity *= 1000;
  SweepSpec spec;
  spec.congested = true;
  const SweepResult a = run_sweep(c, spec, {});
  spec.congested = false;
  const SweepResult b = run_sweep(c, spec, {});
  EXPECT_EQ(sweep_prices_csv(a), sweep_prices_csv(b));
}

TEST(SweepTest, CongestionFlagChangesAnalogPrices) {
  const CaseData c = load_case(data_file("case6_7.json"));
  SweepSpec spec;
  spec.congested = true;
  const SweepResult a = run_sweep(c, spec, {});
  spec.congested = false;
  const SweepResult b = run_sweep(c, spec, {});
  EXPECT_NE(sweep_prices_csv(a), sweep_prices_csv(b));
}

TEST(CongestionTest, CostsRiseAndGasToPowerFalls) {
  const CaseData c = load_case(data_file("case6_7.json"));
  const CongestionComparison k = compare_congestion(c, {});
  ASSERT_TRUE(k.uncongested.converged);
  ASSERT_TRUE(k.congested.converged);
  EXPECT_GE(k.power_cost_congested, k.power_cost_uncongested);
  EXPECT_GE(k.gas_cost_congested, k.gas_cost_uncongested);
  EXPECT_LE(k.gas_to_power_congested, k.gas_to_power_uncongested);
  const nlohmann::json j = to_json(k);
  EXPECT_TRUE(j.contains("bids_at_cap"));
}

}  // namespace
}  // namespace gepec

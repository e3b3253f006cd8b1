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
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "test_cases.hpp"

namespace gepec {
namespace {

using testing::data_file;

bool mentions(const std::vector<Diagnostic>& diags, const std::string& what) {
  return std::any_of(diags.begin(), diags.end(), [&](const Diagnostic& d) {
    return to_string(d).find(what) != std::string::npos;
  });
}

TEST(CaseModelTest, LoadsMinimalCase) {
  const CaseData c = load_case(data_file("minimal.json"));
  EXPECT_EQ(c.power.units.size(), 1u);
  EXPECT_EQ(c.gas.wells.size(), 1u);
  EXPECT_EQ(c.reference_node(), "b1");
  EXPECT_TRUE(validate_topology(c).empty());
}

TEST(CaseModelTest, LoadsBundledAnalogCase) {
  const CaseData c = load_case(data_file("case6_7.json"));
  EXPECT_EQ(c.power.nodes.size(), 6u);
  EXPECT_EQ(c.gas.nodes.size(), 7u);
  EXPECT_EQ(c.power.units.size(), 8u);
  EXPECT_EQ(c.gas.wells.size(), 6u);
  EXPECT_EQ(c.p2g.size(), 2u);
  EXPECT_EQ(std::count_if(c.gas.pipelines.begin(), c.gas.pipelines.end(),
                          [](const GasPipeline& p) { return p.active; }),
            1);
  EXPECT_EQ(std::count_if(c.power.units.begin(), c.power.units.end(),
                          [](const GeneratingUnit& u) { return u.gas_fired; }),
            4);
}

TEST(CaseModelTest, RoundTripPreservesEveryField) {
  for (const char* name : {"minimal.json", "case6_7.json"}) {
    const CaseData c = load_case(data_file(name));
    const CaseData back = parse_case(case_to_json(c).dump());
    EXPECT_EQ(back, c) << name;
  }
}

TEST(CaseModelTest, DuplicateNodeIdNamed) {
  CaseData c = testing::skeleton();
  c.power.nodes.push_back({"b1", false});
  const auto diags = validate_topology(c);
  ASSERT_FALSE(diags.empty());
  EXPECT_TRUE(mentions(diags, "b1: duplicate power node id"));
  EXPECT_THROW(parse_case(case_to_json(c).dump()), CaseValidationError);
}

TEST(CaseModelTest, GasFiredUnitWithoutGasNode) {
  CaseData c = testing::skeleton();
  c.power.units = {testing::gas_unit("G", "b1", "", "o", false, 50, 0.5)};
  const auto diags = validate_topology(c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].subject, "G");
}

TEST(CaseModelTest, DisconnectedGasNode) {
  CaseData c = testing::skeleton();
  c.gas.nodes.push_back({"g2"});
  c.gas.nodes.push_back({"g3"});
  c.gas.pipelines = {{"P12", "g1", "g2", 10.0, false}};
  const auto diags = validate_topology(c);
  ASSERT_EQ(diags.size(), 1u);
  EXPECT_EQ(diags[0].subject, "g3");
}

TEST(CaseModelTest, ReferenceNodeMustBeUnique) {
  CaseData c = testing::skeleton();
  c.power.nodes.push_back({"b2", true});
  c.power.lines = {{"L", "b1", "b2", 1.0, std::nullopt}};
  EXPECT_TRUE(mentions(validate_topology(c), "exactly one reference"));
  c.power.nodes[0].is_reference = false;
  c.power.nodes[1].is_reference = false;
  EXPECT_TRUE(mentions(validate_topology(c), "found 0"));
}

TEST(CaseModelTest, StrategicCostsMustStayBelowCaps) {
  CaseData c = testing::skeleton();
  c.power.units = {testing::unit("U", "b1", "S", true, {{10, 45, 1}})};
  c.gas.wells = {testing::well("W", "g1", "G", true, 10, 2.5)};
  const auto diags = validate_topology(c);
  EXPECT_TRUE(mentions(diags, "alpha_max"));
  EXPECT_TRUE(mentions(diags, "delta_max"));
}

TEST(CaseModelTest, NonStrategicCostsMustBeNondecreasing) {
  CaseData c = testing::skeleton();
  c.power.units = {testing::unit("U", "b1", "F", false, {{10, 5, 1}, {10, 4, 1}})};
  EXPECT_TRUE(mentions(validate_topology(c), "nondecreasing"));
  // Strategic true costs are not required to be monotone.
  c.power.units[0].strategic = true;
  EXPECT_TRUE(validate_topology(c).empty());
}

TEST(CaseModelTest, OwnersCannotMixRoles) {
  CaseData c = testing::skeleton();
  c.power.units = {testing::unit("U1", "b1", "X", true, {{10, 5, 1}}),
                   testing::unit("U2", "b1", "X", false, {{10, 5, 1}})};
  EXPECT_TRUE(mentions(validate_topology(c), "mixes strategic"));
  c.power.units.pop_back();
  c.gas.wells = {testing::well("W", "g1", "X", true, 10, 0.5)};
  EXPECT_TRUE(mentions(validate_topology(c), "both markets"));
}

TEST(CaseModelTest, ParseErrors) {
  EXPECT_THROW(parse_case("{not json"), CaseParseError);
  EXPECT_THROW(parse_case(R"({"power": {}, "gas": {}})"), CaseParseError);
  nlohmann::json j = case_to_json(testing::skeleton());
  j["power"]["nodes"][0]["colour"] = "red";
  EXPECT_THROW(parse_case(j.dump()), CaseParseError);
  EXPECT_THROW(load_case("/nonexistent/case.json"), CaseParseError);
}

TEST(CaseModelTest, ScalarEfficiencyBroadcastsToBlocks) {
  nlohmann::json j = case_to_json(testing::skeleton());
  j["power"]["units"] = nlohmann::json::array(
      {{{"id", "G"}, {"node", "b1"}, {"owner", "o"}, {"gas_fired", true},
        {"gas_node", "g1"}, {"efficiency", 0.5},
        {"blocks", {{{"capacity", 10}}, {{"capacity", 20}}}}}});
  const CaseData c = parse_case(j.dump());
  EXPECT_EQ(c.power.units[0].blocks[1].efficiency, 0.5);
}

TEST(CaseModelTest, InitialBidsAreCapsAndSatisfyBoxes) {
  const CaseData c = load_case(data_file("case6_7.json"));
  const BidProfile b = initial_bids(c);
  for (const auto& [unit, bids] : b.unit_bids) {
    for (double a : bids) EXPECT_EQ(a, c.constants.alpha_max);
  }
  for (const auto& [well, d] : b.well_bids) EXPECT_EQ(d, c.constants.delta_max);
  EXPECT_NO_THROW(check_bids(c, b));
  EXPECT_NO_THROW(check_bids(c, truthful_bids(c, initial_coupling(c))));

  BidProfile bad = b;
  bad.unit_bids.begin()->second[0] = c.constants.alpha_max + 1;
  EXPECT_THROW(check_bids(c, bad), std::invalid_argument);
}

TEST(CaseModelTest, RelaxAndScale) {
  const CaseData c = load_case(data_file("case6_7.json"));
  const CaseData r = relaxed_capacities(c);
  for (const PowerLine& l : r.power.lines) EXPECT_FALSE(l.capacity);
  for (const GasPipeline& p : r.gas.pipelines) EXPECT_FALSE(p.capacity);
  const CaseData s = scale_loads(c, 2.0, 0.5);
  EXPECT_DOUBLE_EQ(s.power.loads[0].demand, 2.0 * c.power.loads[0].demand);
  EXPECT_DOUBLE_EQ(s.gas.loads[0].demand, 0.5 * c.gas.loads[0].demand);
}

TEST(CaseModelTest, ProducersFollowDeclarationOrder) {
  const CaseData c = load_case(data_file("case6_7.json"));
  const auto seps = strategic_producers(c, Market::kPower);
  const auto sgps = strategic_producers(c, Market::kGas);
  ASSERT_EQ(seps.size(), 4u);
  ASSERT_EQ(sgps.size(), 3u);
  EXPECT_EQ(seps[0].id, "SEP1");
  EXPECT_EQ(sgps[2].id, "SGP3");
}

}  // namespace
}  // namespace gepec

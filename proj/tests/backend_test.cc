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

#include <algorithm>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "gepec/lp_text.hpp"
#include "gepec/solver_backend.hpp"

namespace gepec::lp {
namespace {

using R = Relation;

LinearProgram small_lp() {
  LinearProgram p;
  const int x = p.add_variable("x", 0, 10, 2);
  const int y = p.add_variable("y", -kInf, kInf, -1);
  p.add_constraint("c1", {{x, 1}, {y, 1}}, R::kGreaterEqual, 3);
  p.add_constraint("c2", {{x, 1}, {y, -1}}, R::kEqual, 1);
  p.add_constraint("c3", {{y, 1}}, R::kLessEqual, 4);
  return p;
}

TEST(LpTextTest, Layout) {
  std::ostringstream out;
  write_lp_text(out, small_lp());
  const std::string text = out.str();
  for (const char* part : {"Minimize", "Subject To", "Bounds", "End",
                           " c1: x + y >= 3", " c2: x - y = 1", " c3: y <= 4",
                           "y free"}) {
    EXPECT_NE(text.find(part), std::string::npos) << part << "\n" << text;
  }
  EXPECT_EQ(text.find("-0"), std::string::npos);
}

TEST(LpTextTest, BinariesSection) {
  MilpModel m;
  m.lp = small_lp();
  m.add_binary("h");
  const std::string text = lp_text(m);
  EXPECT_NE(text.find("Binaries"), std::string::npos);
  EXPECT_NE(text.find(" h\n"), std::string::npos);
}

TEST(BackendTest, BuiltinIsDefault) {
  const std::vector<std::string> names = backend_names();
  EXPECT_NE(std::find(names.begin(), names.end(), kBuiltinBackend), names.end());
  EXPECT_EQ(make_backend(kBuiltinBackend)->name(), kBuiltinBackend);
  EXPECT_THROW(make_backend("no-such-solver"), std::invalid_argument);
}

TEST(BackendTest, BuiltinSolvesLpAndMilp) {
  const std::unique_ptr<SolverBackend> b = make_backend(kBuiltinBackend);
  const LpSolution s = b->solve(small_lp());
  ASSERT_EQ(s.status, LpStatus::kOptimal);
  // y = x - 1, x + y >= 3 -> x >= 2; cost 2x - (x - 1) = x + 1.
  EXPECT_NEAR(s.objective, 3.0, 1e-9);
  MilpModel m;
  const int h = m.add_binary("h");
  m.lp.set_cost(h, -1);
  const MilpSolution ms = b->solve(m, MilpOptions{});
  ASSERT_EQ(ms.status, MilpStatus::kOptimal);
  EXPECT_NEAR(ms.objective, -1.0, 1e-12);
}

// Counts calls so the test can tell which backend ran.
class CountingBackend : public SolverBackend {
 public:
  explicit CountingBackend(int* calls) : calls_(calls) {}
  std::string name() const override { return "counting"; }
  LpSolution solve(const LinearProgram& lp) const override {
    ++*calls_;
    return make_backend(kBuiltinBackend)->solve(lp);
  }
  MilpSolution solve(const MilpModel& model,
                     const MilpOptions& options) const override {
    ++*calls_;
    return make_backend(kBuiltinBackend)->solve(model, options);
  }

 private:
  int* calls_;
};

TEST(BackendTest, RegisteredBackendIsSelectable) {
  static int calls = 0;
  register_backend("counting", [] { return std::make_unique<CountingBackend>(&calls); });
  const std::unique_ptr<SolverBackend> b = make_backend("counting");
  EXPECT_EQ(b->solve(small_lp()).status, LpStatus::kOptimal);
  EXPECT_EQ(calls, 1);
}

}  // namespace
}  // namespace gepec::lp

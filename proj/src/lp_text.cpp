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

#include "gepec/lp_text.hpp"

#include <cmath>
#include <iomanip>
#include <span>
#include <sstream>

namespace gepec::lp {
namespace {

void write_number(std::ostream& out, double v) {
  if (std::isinf(v)) {
    out << (v > 0 ? "+inf" : "-inf");
  } else {
    out << std::setprecision(17) << v + 0.0;  // no "-0"
  }
}

// Wraps long rows the way most LP writers do.
void write_terms(std::ostream& out, const LinearProgram& lp,
                 std::span<const Term> terms) {
  int on_line = 0;
  bool first = true;
  for (const Term& t : terms) {
    if (t.coef == 0.0) continue;
    if (on_line == 6) {
      out << "\n   ";
      on_line = 0;
    }
    out << (t.coef < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
    if (std::abs(t.coef) != 1.0) {
      write_number(out, std::abs(t.coef));
      out << ' ';
    }
    out << lp.variable(t.var).name;
    first = false;
    ++on_line;
  }
  if (first) out << '0';
}

void write_body(std::ostream& out, const LinearProgram& lp,
                std::span<const int> binaries) {
  out << "\\ " << lp.num_variables() << " variables, " << lp.num_constraints()
      << " constraints\nMinimize\n obj: ";
  std::vector<Term> obj;
  for (int j = 0; j < lp.num_variables(); ++j) {
    if (lp.variable(j).cost != 0.0) obj.push_back({j, lp.variable(j).cost});
  }
  write_terms(out, lp, obj);
  if (lp.objective_offset() != 0.0) {
    out << (lp.objective_offset() < 0 ? " - " : " + ");
    write_number(out, std::abs(lp.objective_offset()));
  }
  out << "\nSubject To\n";
  for (int i = 0; i < lp.num_constraints(); ++i) {
    const Constraint& c = lp.constraint(i);
    out << ' ' << c.name << ": ";
    write_terms(out, lp, c.terms);
    out << ' ' << to_string(c.relation) << ' ';
    write_number(out, c.rhs);
    out << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < lp.num_variables(); ++j) {
    const Variable& v = lp.variable(j);
    if (v.lower == 0.0 && std::isinf(v.upper)) continue;
    out << ' ';
    if (std::isinf(v.lower) && std::isinf(v.upper)) {
      out << v.name << " free\n";
      continue;
    }
    write_number(out, v.lower);
    out << " <= " << v.name << " <= ";
    write_number(out, v.upper);
    out << '\n';
  }
  if (!binaries.empty()) {
    out << "Binaries\n";
    for (int j : binaries) out << ' ' << lp.variable(j).name << '\n';
  }
  out << "End\n";
}

}  // namespace

void write_lp_text(std::ostream& out, const LinearProgram& lp) {
  write_body(out, lp, {});
}

void write_lp_text(std::ostream& out, const MilpModel& model) {
  write_body(out, model.lp, model.binaries);
}

std::string lp_text(const MilpModel& model) {
  std::ostringstream out;
  write_lp_text(out, model);
  return out.str();
}

}  // namespace gepec::lp

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

// Human-readable LP dump in the usual "Minimize / Subject To / Bounds /
// Binaries / End" layout. Meant for eyeballing models, not for round trips.

#ifndef GEPEC_LP_TEXT_HPP_
#define GEPEC_LP_TEXT_HPP_

#include <ostream>
#include <string>

#include "gepec/linear_program.hpp"

namespace gepec::lp {

void write_lp_text(std::ostream& out, const LinearProgram& lp);
void write_lp_text(std::ostream& out, const MilpModel& model);
std::string lp_text(const MilpModel& model);

}  // namespace gepec::lp

#endif  // GEPEC_LP_TEXT_HPP_

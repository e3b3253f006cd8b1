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

#ifndef GEPEC_SOLVER_BACKEND_HPP_
#define GEPEC_SOLVER_BACKEND_HPP_

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gepec/branch_and_bound.hpp"
#include "gepec/linear_program.hpp"

namespace gepec::lp {

// Environment variable naming the backend used by default_backend().
inline constexpr char kBackendEnvVar[] = "GEPEC_SOLVER_BACKEND";
inline constexpr char kBuiltinBackend[] = "builtin";

class SolverBackend {
 public:
  virtual ~SolverBackend() = default;
  virtual std::string name() const = 0;
  virtual LpSolution solve(const LinearProgram& lp) const = 0;
  virtual MilpSolution solve(const MilpModel& model,
                             const MilpOptions& options) const = 0;
};

using BackendFactory = std::function<std::unique_ptr<SolverBackend>()>;

// Registering an existing name replaces it. Thread-safe.
void register_backend(const std::string& name, BackendFactory factory);
std::vector<std::string> backend_names();
// Throws std::invalid_argument for an unknown name.
std::unique_ptr<SolverBackend> make_backend(std::string_view name);
// The backend named by $GEPEC_SOLVER_BACKEND, or the built-in one.
std::unique_ptr<SolverBackend> default_backend();

}  // namespace gepec::lp

#endif  // GEPEC_SOLVER_BACKEND_HPP_

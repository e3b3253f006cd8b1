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

#include "gepec/solver_backend.hpp"

#include <cstdlib>
#include <map>
#include <mutex>
#include <stdexcept>

#include "gepec/simplex.hpp"

namespace gepec::lp {
namespace {

class BuiltinBackend : public SolverBackend {
 public:
  std::string name() const override { return kBuiltinBackend; }
  LpSolution solve(const LinearProgram& lp) const override {
    return solve_lp(lp);
  }
  MilpSolution solve(const MilpModel& model,
                     const MilpOptions& options) const override {
    return solve_milp(model, options);
  }
};

struct Registry {
  std::mutex mu;
  std::map<std::string, BackendFactory, std::less<>> factories;
  Registry() {
    factories[kBuiltinBackend] = [] {
      return std::make_unique<BuiltinBackend>();
    };
  }
};

Registry& registry() {
  static Registry* r = new Registry;
  return *r;
}

}  // namespace

void register_backend(const std::string& name, BackendFactory factory) {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  r.factories[name] = std::move(factory);
}

std::vector<std::string> backend_names() {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> out;
  for (const auto& [name, _] : r.factories) out.push_back(name);
  return out;
}

std::unique_ptr<SolverBackend> make_backend(std::string_view name) {
  Registry& r = registry();
  std::lock_guard lock(r.mu);
  auto it = r.factories.find(name);
  if (it == r.factories.end()) {
    throw std::invalid_argument("unknown solver backend: " + std::string(name));
  }
  return it->second();
}

std::unique_ptr<SolverBackend> default_backend() {
  const char* env = std::getenv(kBackendEnvVar);
  return make_backend(env != nullptr && *env != '\0' ? env : kBuiltinBackend);
}

}  // namespace gepec::lp

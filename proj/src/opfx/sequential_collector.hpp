// Copyright 2026 The opfx Authors
//
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

#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opfx/nlp_solver.hpp"
#include "opfx/objective_catalog.hpp"
#include "opfx/opf_problem.hpp"
#include "opfx/solution_library.hpp"

namespace opfx {

enum class DnfPolicy { SkipAndPerturb, Abort };

std::string to_string(DnfPolicy p);
DnfPolicy dnf_policy_from_string(const std::string& s);

struct CollectorConfig {
  std::string objective_id = "f36";
  std::size_t n = 1;  // target library size, seed included
  DnfPolicy dnf_policy = DnfPolicy::SkipAndPerturb;
  double perturbation = 1e-2;  // uniform half-width on v and theta
  std::uint64_t seed = 0;
  SolverOptions solver;

  // Throws std::invalid_argument.
  void validate() const;
};

struct DnfEvent {
  int iteration = 0;
  std::string objective_id;
  SolveStatus status = SolveStatus::NumericalFailure;
  int attempts = 0;
  std::string message;

  bool operator==(const DnfEvent&) const = default;
};

// Raised for an infeasible seed and, under DnfPolicy::Abort, for a failed
// step.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(SolveStatus status, const std::string& what)
      : std::runtime_error(what), status_(status) {}
  SolveStatus status() const { return status_; }

 private:
  SolveStatus status_;
};

// Points accepted into a library must pass this residual check.
inline constexpr double kFeasibilityCheck = 1e-6;

class SequentialCollector {
 public:
  // Builds the maximised objective for one step from the library as it is
  // before the step. Replaceable so tests can inject failing objectives.
  using ObjectiveBuilder = std::function<ObjectiveFn(
      const ObjectiveSpec&, const VariableLayout&, const SolutionLibrary&)>;

  SequentialCollector(Network net, CollectorConfig cfg,
                      const ObjectiveCatalog& catalog =
                          ObjectiveCatalog::builtin());

  void set_objective_builder(ObjectiveBuilder b) { builder_ = std::move(b); }

  // Feasible point for the zero objective from the flat start.
  SolutionLibrary seed_point() const;

  // One maximisation against `lib`. Returns true when a point was appended;
  // otherwise a DnfEvent was recorded.
  bool step(SolutionLibrary& lib);

  // Seed plus n - 1 steps.
  SolutionLibrary collect();

  const std::vector<DnfEvent>& dnf_events() const { return dnf_; }
  const CollectorConfig& config() const { return cfg_; }
  const OpfModel& model() const { return model_; }
  const ObjectiveSpec& objective() const { return spec_; }

 private:
  std::vector<double> warm_start(const SolutionLibrary& lib, int attempt) const;

  OpfModel model_;
  CollectorConfig cfg_;
  ObjectiveSpec spec_;
  ObjectiveBuilder builder_;
  std::vector<DnfEvent> dnf_;
  int iteration_ = 0;
};

// Counter-based uniform draw in [-1, 1). Independent of the standard
// library's distribution implementations, so streams match across
// platforms.
double signed_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                   std::uint64_t k);

}  // namespace opfx

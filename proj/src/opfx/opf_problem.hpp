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

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "opfx/acpf.hpp"
#include "opfx/case_model.hpp"
#include "opfx/nlp_solver.hpp"

namespace opfx {

// Replaces the voltage bounds of one bus.
struct VoltageOverride {
  std::size_t bus = 0;
  double lo = 0.0;
  double hi = 0.0;
};

using ObjectiveFn =
    std::function<double(std::span<const double>, std::span<double>)>;

// A network prepared for repeated solves over the flat variable layout.
// Simple bounds and the slack angle become variable bounds; balance,
// angle-difference and thermal rows go to the solver as constraints.
class OpfModel {
 public:
  explicit OpfModel(Network net);

  const Network& network() const { return state_->net; }
  const VariableLayout& layout() const { return state_->layout; }
  const AdmittanceStructure& admittance() const { return state_->y; }

  // An empty objective means the constant zero.
  ProblemDef problem(ObjectiveFn objective,
                     std::span<const VoltageOverride> box = {}) const;

  // v at the middle of its (possibly overridden) bounds, theta = 0 and
  // dispatch at the middle of its bounds.
  std::vector<double> flat_start(std::span<const VoltageOverride> box = {}) const;

  // Independent check with the full residual report.
  double max_violation(std::span<const double> flat) const;

 private:
  struct State {
    Network net;
    AdmittanceStructure y;
    VariableLayout layout;
    std::size_t n_eq;
    std::size_t n_ineq;
  };
  std::shared_ptr<const State> state_;

  void bounds(std::span<const VoltageOverride> box, std::vector<double>& lo,
              std::vector<double>& hi) const;
};

}  // namespace opfx

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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "opfx/acpf.hpp"
#include "opfx/nlp_solver.hpp"

namespace opfx {

struct Provenance {
  std::string objective_id;  // empty for the zero-objective seed
  int iteration = 0;
  SolveStatus status = SolveStatus::Optimal;
  // Logical insertion counter. Wall-clock stamps would break byte-identical
  // replays, so they are kept out of the library.
  std::uint64_t sequence = 0;
  // Objective value at the point against the library before it was added.
  double objective_value = 0.0;

  bool operator==(const Provenance&) const = default;
};

// Ordered set of feasible operating points found so far.
struct SolutionLibrary {
  std::string network_hash;
  std::vector<OperatingPoint> points;
  std::vector<Provenance> provenance;
  // Collection steps that ended without a point.
  std::size_t dnf_count = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
  // More than half of the steps after the seed ended as DNF.
  bool dnf_dominated() const {
    const std::size_t steps = points.size() - (points.empty() ? 0 : 1) + dnf_count;
    return 2 * dnf_count > steps;
  }

  void append(OperatingPoint x, Provenance p) {
    p.sequence = points.size();
    points.push_back(std::move(x));
    provenance.push_back(std::move(p));
  }

  bool operator==(const SolutionLibrary&) const = default;
};

}  // namespace opfx

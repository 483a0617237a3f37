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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opfx/nlp_solver.hpp"
#include "opfx/objective_catalog.hpp"
#include "opfx/opf_problem.hpp"

namespace opfx {

// One hypercube of generator-bus voltage ranges. Digit k selects the
// sub-range of buses[k]; digit 0 varies fastest in the partition order.
struct VoltageBox {
  std::size_t index = 0;
  std::vector<std::size_t> digits;
  std::vector<std::size_t> buses;
  std::vector<double> lo;
  std::vector<double> hi;

  std::vector<VoltageOverride> overrides() const;
  // Generator-bus voltages of x inside the box, up to `slack`.
  bool contains(const OperatingPoint& x, double slack = 1e-8) const;
};

class PartitionCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultPartitionCap = 1'000'000;

// m^n boxes, n = number of generator buses, in mixed-radix order. Sub-range
// k of [a, b] is [a + (b - a) k / m, a + (b - a) (k + 1) / m] with the ends
// pinned to a and b, so neighbours share their boundary exactly.
std::vector<VoltageBox> partition(const Network& net, std::size_t m,
                                  std::size_t cap = kDefaultPartitionCap);

// Number of boxes partition() would create; throws PartitionCapError above
// the cap.
std::size_t partition_count(const Network& net, std::size_t m,
                            std::size_t cap = kDefaultPartitionCap);

struct PartitionRecord {
  std::size_t index = 0;
  std::vector<std::size_t> digits;
  bool feasible = false;
  SolveStatus probe_status = SolveStatus::NumericalFailure;
  std::size_t points = 0;
  std::size_t duplicates = 0;
  // Statuses of the exploration solves in order.
  std::vector<SolveStatus> statuses;
  bool stopped_early = false;
  double solve_seconds = 0.0;
};

struct ExhaustiveSet {
  std::string network_hash;
  std::size_t m = 0;
  std::size_t t = 0;
  std::vector<OperatingPoint> points;
  std::vector<std::size_t> partition_of;  // box index per point
  std::vector<PartitionRecord> records;

  double feasible_fraction() const;
};

struct SamplerConfig {
  std::size_t m = 2;
  std::size_t t = 5;
  std::size_t cap = kDefaultPartitionCap;
  // Probe threads; 0 or 1 probes serially. The verdicts do not depend on it.
  unsigned threads = 1;
  double duplicate_tol = 1e-6;
  double perturbation = 1e-2;
  std::uint64_t seed = 0;
  std::string objective_id = "f03";
  SolverOptions solver;

  void validate() const;
};

class ExhaustiveSampler {
 public:
  ExhaustiveSampler(Network net, SamplerConfig cfg,
                    const ObjectiveCatalog& catalog =
                        ObjectiveCatalog::builtin());

  // Zero-objective solve restricted to the box, from the box midpoint.
  SolveResult probe(const VoltageBox& box) const;

  // Up to t repelling solves inside a box that probed feasible, starting at
  // `start` (the probe point). Accepted points are appended to xe at once.
  // When xe is empty the probe point itself becomes the first point, since
  // the repelling objective needs a non-empty set. Throws
  // std::invalid_argument for a box that the record marks infeasible.
  std::vector<OperatingPoint> explore(const VoltageBox& box,
                                      std::span<const double> start,
                                      ExhaustiveSet& xe,
                                      PartitionRecord& record) const;

  ExhaustiveSet run() const;

  const OpfModel& model() const { return model_; }
  const SamplerConfig& config() const { return cfg_; }

 private:
  bool duplicate(const OperatingPoint& x, const ExhaustiveSet& xe) const;

  OpfModel model_;
  SamplerConfig cfg_;
  ObjectiveSpec spec_;
};

}  // namespace opfx

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

#include "opfx/sequential_collector.hpp"

#include <algorithm>
#include <cmath>

namespace opfx {

std::string to_string(DnfPolicy p) {
  return p == DnfPolicy::Abort ? "abort" : "skip-and-perturb";
}

DnfPolicy dnf_policy_from_string(const std::string& s) {
  if (s == "skip-and-perturb") return DnfPolicy::SkipAndPerturb;
  if (s == "abort") return DnfPolicy::Abort;
  throw std::invalid_argument("unknown DNF policy '" + s + "'");
}

void CollectorConfig::validate() const {
  if (n < 1) throw std::invalid_argument("N must be at least 1");
  if (!(perturbation >= 0.0) || !std::isfinite(perturbation)) {
    throw std::invalid_argument("perturbation scale must be finite and >= 0");
  }
  if (solver.max_iter < 1) {
    throw std::invalid_argument("max_iter must be at least 1");
  }
}

double signed_unit(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                   std::uint64_t k) {
  // splitmix64 over a mixed key
  std::uint64_t z = seed;
  for (std::uint64_t v : {a, b, k}) {
    z += 0x9e3779b97f4a7c15ULL + v;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z ^= z >> 31;
  }
  return static_cast<double>(z >> 11) * 0x1.0p-52 - 1.0;
}

SequentialCollector::SequentialCollector(Network net, CollectorConfig cfg,
                                         const ObjectiveCatalog& catalog)
    : model_(std::move(net)), cfg_(std::move(cfg)) {
  cfg_.validate();
  spec_ = catalog.at(cfg_.objective_id);
  builder_ = [](const ObjectiveSpec& spec, const VariableLayout& layout,
                const SolutionLibrary& lib) -> ObjectiveFn {
    auto f = std::make_shared<BoundObjective>(spec, layout, lib.points);
    return [f](std::span<const double> x, std::span<double> g) {
      return (*f)(x, g);
    };
  };
}

SolutionLibrary SequentialCollector::seed_point() const {
  const ProblemDef p = model_.problem({});
  SolveResult r = find_feasible(p, model_.flat_start(), cfg_.solver);
  if (!r.optimal()) {
    throw SolverFailure(r.status, "no feasible seed point: " +
                                      to_string(r.status) +
                                      (r.message.empty() ? "" : ", " + r.message));
  }
  const double viol = model_.max_violation(r.x);
  if (!(viol <= kFeasibilityCheck)) {
    throw SolverFailure(SolveStatus::NumericalFailure,
                        "seed point fails the residual check");
  }
  SolutionLibrary lib;
  lib.network_hash = network_hash(model_.network());
  Provenance prov;
  prov.status = r.status;
  lib.append(model_.layout().unpack(r.x), prov);
  return lib;
}

std::vector<double> SequentialCollector::warm_start(const SolutionLibrary& lib,
                                                    int attempt) const {
  const VariableLayout& L = model_.layout();
  std::vector<double> x = L.pack(lib.points.back());
  const std::size_t count = 2 * L.buses;  // v then theta
  for (std::size_t k = 0; k < count; ++k) {
    x[k] += cfg_.perturbation *
            signed_unit(cfg_.seed, static_cast<std::uint64_t>(iteration_),
                        static_cast<std::uint64_t>(attempt), k);
  }
  return x;
}

bool SequentialCollector::step(SolutionLibrary& lib) {
  if (lib.empty()) throw std::invalid_argument("step needs a seeded library");
  ++iteration_;
  const ProblemDef p =
      model_.problem(builder_(spec_, model_.layout(), lib));
  const int attempts = cfg_.dnf_policy == DnfPolicy::SkipAndPerturb ? 2 : 1;

  SolveResult r;
  std::string why;
  for (int a = 0; a < attempts; ++a) {
    r = solve(p, warm_start(lib, a), cfg_.solver);
    why = r.message;
    if (r.optimal() && !(model_.max_violation(r.x) <= kFeasibilityCheck)) {
      r.status = SolveStatus::NumericalFailure;
      why = "residual check failed";
    }
    if (r.optimal()) {
      OperatingPoint x = model_.layout().unpack(r.x);
      Provenance prov;
      prov.objective_id = spec_.id;
      prov.iteration = iteration_;
      prov.status = r.status;
      prov.objective_value = evaluate(spec_, x, lib);
      lib.append(std::move(x), prov);
      return true;
    }
  }
  if (cfg_.dnf_policy == DnfPolicy::Abort) {
    throw SolverFailure(r.status, "step " + std::to_string(iteration_) +
                                      " with " + spec_.id + ": " +
                                      to_string(r.status));
  }
  dnf_.push_back({iteration_, spec_.id, r.status, attempts, why});
  return false;
}

SolutionLibrary SequentialCollector::collect() {
  SolutionLibrary lib = seed_point();
  iteration_ = 0;
  dnf_.clear();
  for (std::size_t i = 1; i < cfg_.n; ++i) step(lib);
  lib.dnf_count = dnf_.size();
  return lib;
}

}  // namespace opfx

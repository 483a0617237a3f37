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
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace opfx {

// Smooth NLP in maximization form:
//
//   max f(x)  s.t.  c(x) = 0,  d(x) >= 0,  lower <= x <= upper.
//
// Jacobians are dense row-major (rows x dimension). A callback receives an
// empty `jac` span when only values are needed. Variables with
// lower == upper are held fixed and removed from the iteration.
struct ProblemDef {
  std::size_t dimension = 0;
  std::size_t n_eq = 0;
  std::size_t n_ineq = 0;

  std::function<double(std::span<const double> x, std::span<double> grad)>
      objective;
  std::function<void(std::span<const double> x, std::span<double> values,
                     std::span<double> jac)>
      equalities;
  std::function<void(std::span<const double> x, std::span<double> values,
                     std::span<double> jac)>
      inequalities;

  std::vector<double> lower;
  std::vector<double> upper;

  static constexpr double kInf = std::numeric_limits<double>::infinity();
};

enum class SolveStatus { Optimal, Infeasible, IterationLimit, NumericalFailure };

std::string to_string(SolveStatus status);
SolveStatus solve_status_from_string(const std::string& s);

enum class HessianApproximation {
  // Forward differences of the analytic Lagrangian gradient.
  FiniteDifference,
  // Powell-damped BFGS.
  DampedBfgs,
};

struct SolverOptions {
  int max_iter = 500;
  // Scaled KKT error for convergence.
  double tol = 1e-8;
  double acceptable_tol = 1e-6;
  int acceptable_iter = 10;
  // Unscaled limits that an Optimal point must satisfy.
  double constr_viol_tol = 1e-8;
  double acceptable_constr_viol_tol = 1e-7;
  double stationarity_tol = 1e-6;

  double mu_init = 0.1;
  double bound_push = 1e-2;
  // Elastic phase: a local minimum of the l1 violation above this value
  // proves (local) infeasibility.
  double infeasibility_threshold = 1e-5;
  // Smallest proximity weight of the elastic phase.
  double restoration_proximity = 1e-4;
  int max_restorations = 3;

  HessianApproximation hessian = HessianApproximation::FiniteDifference;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> x;
  double objective = 0.0;
  // Unscaled max violation of equalities, inequalities and bounds.
  double constraint_violation = 0.0;
  // Unscaled Lagrangian gradient inf-norm (multiplier-normalised).
  double stationarity = 0.0;
  int iterations = 0;
  double wall_seconds = 0.0;
  std::string message;

  bool optimal() const { return status == SolveStatus::Optimal; }
};

/// Primal-dual interior-point method with a logarithmic barrier on bounds and
/// inequality slacks, monotone barrier updates, inertia-corrected Newton
/// steps, and a backtracking filter line search with one second-order
/// correction. When the line search fails, or the infeasibility stops
/// shrinking, the solver enters an elastic restoration phase; if that phase ends at a positive local minimum of the
/// constraint violation the problem is reported Infeasible.
///
/// The start is projected into the bounds. Results are deterministic for
/// identical inputs.
SolveResult solve(const ProblemDef& problem, std::span<const double> start,
                  const SolverOptions& options = {});

/// Feasibility with a constant-zero objective. Runs the elastic phase first,
/// then projects its point onto the feasible set; Optimal means a feasible
/// point was found. The reported objective is 0.
SolveResult find_feasible(const ProblemDef& problem,
                          std::span<const double> start,
                          const SolverOptions& options = {});

// Max violation of `problem` at x (equalities, inequalities, bounds).
double constraint_violation(const ProblemDef& problem,
                            std::span<const double> x);

}  // namespace opfx

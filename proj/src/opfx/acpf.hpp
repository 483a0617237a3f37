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
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "opfx/case_model.hpp"

namespace opfx {

struct OperatingPoint {
  std::vector<double> v;      // per bus, p.u.
  std::vector<double> theta;  // per bus, rad
  std::vector<double> p_gen;  // per generator, p.u.
  std::vector<double> q_gen;

  bool operator==(const OperatingPoint&) const = default;
};

// Flat decision-vector layout shared by the solver and the objectives:
// [v (n) | theta (n) | p_gen (g) | q_gen (g)].
struct VariableLayout {
  std::size_t buses = 0;
  std::size_t gens = 0;

  explicit VariableLayout(const Network& net)
      : buses(net.bus_count()), gens(net.generator_count()) {}
  VariableLayout(std::size_t n, std::size_t g) : buses(n), gens(g) {}

  std::size_t size() const { return 2 * buses + 2 * gens; }
  std::size_t v(std::size_t i) const { return i; }
  std::size_t theta(std::size_t i) const { return buses + i; }
  std::size_t p_gen(std::size_t j) const { return 2 * buses + j; }
  std::size_t q_gen(std::size_t j) const { return 2 * buses + gens + j; }

  std::vector<double> pack(const OperatingPoint& x) const;
  OperatingPoint unpack(std::span<const double> flat) const;
};

struct Injections {
  std::vector<double> p;
  std::vector<double> q;
};

Injections injections(const OperatingPoint& x, const AdmittanceStructure& y);

struct BranchFlow {
  double p_ij = 0.0, q_ij = 0.0;
  double p_ji = 0.0, q_ji = 0.0;
};

BranchFlow branch_flows(const OperatingPoint& x, const Branch& br,
                        const BranchAdmittance& y);
BranchFlow branch_flows(const OperatingPoint& x, const Branch& br);

enum class ConstraintKind {
  ActiveBalance,  // one per bus
  ReactiveBalance,
  SlackAngle,
  VoltageMin,
  VoltageMax,
  ActiveGenMin,
  ActiveGenMax,
  ReactiveGenMin,
  ReactiveGenMax,
  AngleDiffMax,
  AngleDiffMin,
  ThermalFrom,  // squared
  ThermalTo,
};

std::string to_string(ConstraintKind kind);

struct ConstraintRow {
  ConstraintKind kind;
  std::size_t element;  // bus, generator or branch index
};

// Equalities are residuals (feasible = 0); inequalities are slacks
// (feasible >= 0). Balance rows use p_i(x) - (p_G - p_D).
struct ResidualReport {
  std::vector<ConstraintRow> eq_rows;
  std::vector<double> equalities;
  std::vector<ConstraintRow> ineq_rows;
  std::vector<double> inequalities;
  double max_violation = 0.0;

  double value(ConstraintKind kind, std::size_t element) const;
};

ResidualReport residuals(const OperatingPoint& x, const Network& net);
ResidualReport residuals(const OperatingPoint& x, const Network& net,
                         const AdmittanceStructure& y);

// Row structure of residuals(); identical for every operating point.
struct ResidualLayout {
  std::vector<ConstraintRow> eq_rows;
  std::vector<ConstraintRow> ineq_rows;
};
ResidualLayout residual_layout(const Network& net);

struct ResidualJacobians {
  // Columns follow VariableLayout; rows follow ResidualReport.
  Eigen::SparseMatrix<double, Eigen::RowMajor> equalities;
  Eigen::SparseMatrix<double, Eigen::RowMajor> inequalities;
};

ResidualJacobians jacobians(const OperatingPoint& x, const Network& net);
ResidualJacobians jacobians(const OperatingPoint& x, const Network& net,
                            const AdmittanceStructure& y);

// Constraint block handed to the solver: nodal balance as equalities,
// angle-difference and thermal limits as inequalities g(x) >= 0. Voltage and
// dispatch bounds and the slack angle become variable bounds instead.
struct NetworkConstraints {
  std::vector<ConstraintRow> eq_rows;
  std::vector<ConstraintRow> ineq_rows;
};

NetworkConstraints network_constraints(const Network& net);

// Evaluates the rows of network_constraints() and their dense Jacobians.
void evaluate_network_constraints(const Network& net,
                                  const AdmittanceStructure& y,
                                  std::span<const double> flat,
                                  std::span<double> eq,
                                  std::span<double> ineq,
                                  double* eq_jac,    // row-major, may be null
                                  double* ineq_jac); // row-major, may be null

}  // namespace opfx

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

#include "opfx/opf_problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opfx {

OpfModel::OpfModel(Network net) {
  auto s = std::make_shared<State>(State{
      std::move(net), {}, VariableLayout(0, 0), 0, 0});
  s->y = build_admittance(s->net);
  s->layout = VariableLayout(s->net);
  const NetworkConstraints rows = network_constraints(s->net);
  s->n_eq = rows.eq_rows.size();
  s->n_ineq = rows.ineq_rows.size();
  state_ = std::move(s);
}

void OpfModel::bounds(std::span<const VoltageOverride> box,
                      std::vector<double>& lo, std::vector<double>& hi) const {
  const Network& net = state_->net;
  const VariableLayout& L = state_->layout;
  constexpr double inf = ProblemDef::kInf;
  lo.assign(L.size(), -inf);
  hi.assign(L.size(), inf);
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    lo[L.v(i)] = net.buses[i].v_min;
    hi[L.v(i)] = net.buses[i].v_max;
  }
  for (const VoltageOverride& o : box) {
    if (o.bus >= net.bus_count()) {
      throw std::out_of_range("voltage override references an unknown bus");
    }
    lo[L.v(o.bus)] = o.lo;
    hi[L.v(o.bus)] = o.hi;
  }
  lo[L.theta(net.slack_bus)] = 0.0;
  hi[L.theta(net.slack_bus)] = 0.0;
  for (std::size_t j = 0; j < net.generator_count(); ++j) {
    const Generator& g = net.generators[j];
    lo[L.p_gen(j)] = g.p_min;
    hi[L.p_gen(j)] = g.p_max;
    lo[L.q_gen(j)] = g.q_min;
    hi[L.q_gen(j)] = g.q_max;
  }
}

ProblemDef OpfModel::problem(ObjectiveFn objective,
                             std::span<const VoltageOverride> box) const {
  ProblemDef p;
  p.dimension = state_->layout.size();
  p.n_eq = state_->n_eq;
  p.n_ineq = state_->n_ineq;
  if (objective) {
    p.objective = std::move(objective);
  } else {
    p.objective = [](std::span<const double>, std::span<double> g) {
      std::fill(g.begin(), g.end(), 0.0);
      return 0.0;
    };
  }
  std::shared_ptr<const State> s = state_;
  const std::size_t n_eq = s->n_eq, n_ineq = s->n_ineq;
  // One evaluation fills both blocks; each callback keeps its half.
  p.equalities = [s, n_ineq](std::span<const double> x, std::span<double> v,
                             std::span<double> jac) {
    std::vector<double> other(n_ineq);
    evaluate_network_constraints(s->net, s->y, x, v, other,
                                 jac.empty() ? nullptr : jac.data(), nullptr);
  };
  p.inequalities = [s, n_eq](std::span<const double> x, std::span<double> v,
                             std::span<double> jac) {
    std::vector<double> other(n_eq);
    evaluate_network_constraints(s->net, s->y, x, other, v, nullptr,
                                 jac.empty() ? nullptr : jac.data());
  };
  bounds(box, p.lower, p.upper);
  return p;
}

std::vector<double> OpfModel::flat_start(
    std::span<const VoltageOverride> box) const {
  std::vector<double> lo, hi;
  bounds(box, lo, hi);
  const VariableLayout& L = state_->layout;
  std::vector<double> x(L.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (std::isfinite(lo[k]) && std::isfinite(hi[k])) x[k] = 0.5 * (lo[k] + hi[k]);
  }
  for (std::size_t i = 0; i < L.buses; ++i) x[L.theta(i)] = 0.0;
  return x;
}

double OpfModel::max_violation(std::span<const double> flat) const {
  return residuals(state_->layout.unpack(flat), state_->net, state_->y)
      .max_violation;
}

}  // namespace opfx

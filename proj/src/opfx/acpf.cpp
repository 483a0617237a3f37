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

#include "opfx/acpf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace opfx {

std::vector<double> VariableLayout::pack(const OperatingPoint& x) const {
  if (x.v.size() != buses || x.theta.size() != buses ||
      x.p_gen.size() != gens || x.q_gen.size() != gens) {
    throw std::invalid_argument("operating point does not match the network");
  }
  std::vector<double> flat;
  flat.reserve(size());
  flat.insert(flat.end(), x.v.begin(), x.v.end());
  flat.insert(flat.end(), x.theta.begin(), x.theta.end());
  flat.insert(flat.end(), x.p_gen.begin(), x.p_gen.end());
  flat.insert(flat.end(), x.q_gen.begin(), x.q_gen.end());
  return flat;
}

OperatingPoint VariableLayout::unpack(std::span<const double> flat) const {
  if (flat.size() != size()) {
    throw std::invalid_argument("decision vector has the wrong length");
  }
  OperatingPoint x;
  auto it = flat.begin();
  x.v.assign(it, it + buses);
  it += buses;
  x.theta.assign(it, it + buses);
  it += buses;
  x.p_gen.assign(it, it + gens);
  it += gens;
  x.q_gen.assign(it, it + gens);
  return x;
}

std::string to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::ActiveBalance: return "active_balance";
    case ConstraintKind::ReactiveBalance: return "reactive_balance";
    case ConstraintKind::SlackAngle: return "slack_angle";
    case ConstraintKind::VoltageMin: return "voltage_min";
    case ConstraintKind::VoltageMax: return "voltage_max";
    case ConstraintKind::ActiveGenMin: return "active_gen_min";
    case ConstraintKind::ActiveGenMax: return "active_gen_max";
    case ConstraintKind::ReactiveGenMin: return "reactive_gen_min";
    case ConstraintKind::ReactiveGenMax: return "reactive_gen_max";
    case ConstraintKind::AngleDiffMax: return "angle_diff_max";
    case ConstraintKind::AngleDiffMin: return "angle_diff_min";
    case ConstraintKind::ThermalFrom: return "thermal_from";
    case ConstraintKind::ThermalTo: return "thermal_to";
  }
  return "unknown";
}

double ResidualReport::value(ConstraintKind kind, std::size_t element) const {
  for (std::size_t r = 0; r < eq_rows.size(); ++r) {
    if (eq_rows[r].kind == kind && eq_rows[r].element == element) {
      return equalities[r];
    }
  }
  for (std::size_t r = 0; r < ineq_rows.size(); ++r) {
    if (ineq_rows[r].kind == kind && ineq_rows[r].element == element) {
      return inequalities[r];
    }
  }
  throw std::out_of_range("no such residual row");
}

namespace {

// Reads the flat layout without copying into an OperatingPoint.
struct StateView {
  VariableLayout layout;
  std::span<const double> x;

  double v(std::size_t i) const { return x[layout.v(i)]; }
  double theta(std::size_t i) const { return x[layout.theta(i)]; }
  double pg(std::size_t j) const { return x[layout.p_gen(j)]; }
  double qg(std::size_t j) const { return x[layout.q_gen(j)]; }
};

// Sink receives (column, partial derivative) for the row being evaluated.
template <typename Sink>
double eval_injection(const StateView& s, const AdmittanceStructure& y,
                      std::size_t i, bool reactive, Sink&& sink) {
  const double vi = s.v(i);
  const double ti = s.theta(i);
  double total = 0.0;
  double d_vi = 0.0;
  double d_ti = 0.0;
  for (const auto& e : y.rows[i]) {
    const std::size_t k = e.col;
    const double vk = s.v(k);
    const double tik = ti - s.theta(k);
    const double c = std::cos(tik);
    const double sn = std::sin(tik);
    // term = vi * vk * h(theta_ik)
    double h, dh;
    if (!reactive) {
      h = e.g * c + e.b * sn;
      dh = -e.g * sn + e.b * c;
    } else {
      h = e.g * sn - e.b * c;
      dh = e.g * c + e.b * sn;
    }
    total += vi * vk * h;
    if (k == i) {
      d_vi += 2.0 * vi * h;  // theta_ii = 0, dh terms cancel
    } else {
      d_vi += vk * h;
      sink(s.layout.v(k), vi * h);
      d_ti += vi * vk * dh;
      sink(s.layout.theta(k), -vi * vk * dh);
    }
  }
  sink(s.layout.v(i), d_vi);
  sink(s.layout.theta(i), d_ti);
  return total;
}

struct EndFlow {
  double p, q;
  // partials w.r.t. (v_a, v_b, theta_a, theta_b) for sending end a
  double dp[4], dq[4];
};

EndFlow end_flow(double va, double vb, double tab, double g_aa, double b_aa,
                 double g_ab, double b_ab) {
  const double c = std::cos(tab);
  const double s = std::sin(tab);
  EndFlow f;
  const double pc = g_ab * c + b_ab * s;
  const double ps = -g_ab * s + b_ab * c;
  f.p = va * va * g_aa + va * vb * pc;
  f.dp[0] = 2.0 * va * g_aa + vb * pc;
  f.dp[1] = va * pc;
  f.dp[2] = va * vb * ps;
  f.dp[3] = -va * vb * ps;
  const double qc = g_ab * s - b_ab * c;
  const double qs = g_ab * c + b_ab * s;
  f.q = -va * va * b_aa + va * vb * qc;
  f.dq[0] = -2.0 * va * b_aa + vb * qc;
  f.dq[1] = va * qc;
  f.dq[2] = va * vb * qs;
  f.dq[3] = -va * vb * qs;
  return f;
}

template <typename Sink>
double eval_row(const Network& net, const AdmittanceStructure& y,
                const StateView& s, const ConstraintRow& row, Sink&& sink) {
  const auto& L = s.layout;
  const std::size_t e = row.element;
  switch (row.kind) {
    case ConstraintKind::ActiveBalance:
    case ConstraintKind::ReactiveBalance: {
      const bool reactive = row.kind == ConstraintKind::ReactiveBalance;
      double value = eval_injection(s, y, e, reactive, sink);
      const Bus& bus = net.buses[e];
      value += reactive ? bus.q_load : bus.p_load;
      for (std::size_t j = 0; j < net.generators.size(); ++j) {
        if (net.generators[j].bus != e) continue;
        if (reactive) {
          value -= s.qg(j);
          sink(L.q_gen(j), -1.0);
        } else {
          value -= s.pg(j);
          sink(L.p_gen(j), -1.0);
        }
      }
      return value;
    }
    case ConstraintKind::SlackAngle:
      sink(L.theta(e), 1.0);
      return s.theta(e);
    case ConstraintKind::VoltageMin:
      sink(L.v(e), 1.0);
      return s.v(e) - net.buses[e].v_min;
    case ConstraintKind::VoltageMax:
      sink(L.v(e), -1.0);
      return net.buses[e].v_max - s.v(e);
    case ConstraintKind::ActiveGenMin:
      sink(L.p_gen(e), 1.0);
      return s.pg(e) - net.generators[e].p_min;
    case ConstraintKind::ActiveGenMax:
      sink(L.p_gen(e), -1.0);
      return net.generators[e].p_max - s.pg(e);
    case ConstraintKind::ReactiveGenMin:
      sink(L.q_gen(e), 1.0);
      return s.qg(e) - net.generators[e].q_min;
    case ConstraintKind::ReactiveGenMax:
      sink(L.q_gen(e), -1.0);
      return net.generators[e].q_max - s.qg(e);
    case ConstraintKind::AngleDiffMax: {
      const Branch& br = net.branches[e];
      sink(L.theta(br.from), -1.0);
      sink(L.theta(br.to), 1.0);
      return br.angle_max - (s.theta(br.from) - s.theta(br.to));
    }
    case ConstraintKind::AngleDiffMin: {
      const Branch& br = net.branches[e];
      sink(L.theta(br.from), 1.0);
      sink(L.theta(br.to), -1.0);
      return (s.theta(br.from) - s.theta(br.to)) - br.angle_min;
    }
    case ConstraintKind::ThermalFrom:
    case ConstraintKind::ThermalTo: {
      const Branch& br = net.branches[e];
      const BranchAdmittance& t = y.branches[e];
      const bool from = row.kind == ConstraintKind::ThermalFrom;
      const std::size_t a = from ? br.from : br.to;
      const std::size_t b = from ? br.to : br.from;
      EndFlow f = from ? end_flow(s.v(a), s.v(b), s.theta(a) - s.theta(b),
                                  t.g_ff, t.b_ff, t.g_ft, t.b_ft)
                       : end_flow(s.v(a), s.v(b), s.theta(a) - s.theta(b),
                                  t.g_tt, t.b_tt, t.g_tf, t.b_tf);
      const std::size_t cols[4] = {L.v(a), L.v(b), L.theta(a), L.theta(b)};
      for (int k = 0; k < 4; ++k) {
        sink(cols[k], -2.0 * f.p * f.dp[k] - 2.0 * f.q * f.dq[k]);
      }
      return br.s_max * br.s_max - (f.p * f.p + f.q * f.q);
    }
  }
  return 0.0;
}

struct NoSink {
  void operator()(std::size_t, double) const {}
};

void check_dims(const OperatingPoint& x, const Network& net) {
  if (x.v.size() != net.bus_count() || x.theta.size() != net.bus_count() ||
      x.p_gen.size() != net.generator_count() ||
      x.q_gen.size() != net.generator_count()) {
    throw std::invalid_argument("operating point does not match the network");
  }
}

}  // namespace

Injections injections(const OperatingPoint& x, const AdmittanceStructure& y) {
  const std::size_t n = y.size();
  if (x.v.size() != n || x.theta.size() != n) {
    throw std::invalid_argument("operating point does not match admittance");
  }
  VariableLayout layout(n, 0);
  std::vector<double> flat(x.v);
  flat.insert(flat.end(), x.theta.begin(), x.theta.end());
  StateView s{layout, flat};
  Injections out;
  out.p.resize(n);
  out.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.p[i] = eval_injection(s, y, i, false, NoSink{});
    out.q[i] = eval_injection(s, y, i, true, NoSink{});
  }
  return out;
}

BranchFlow branch_flows(const OperatingPoint& x, const Branch& br,
                        const BranchAdmittance& t) {
  const double vf = x.v.at(br.from), vt = x.v.at(br.to);
  const double tft = x.theta.at(br.from) - x.theta.at(br.to);
  EndFlow f = end_flow(vf, vt, tft, t.g_ff, t.b_ff, t.g_ft, t.b_ft);
  EndFlow r = end_flow(vt, vf, -tft, t.g_tt, t.b_tt, t.g_tf, t.b_tf);
  return {f.p, f.q, r.p, r.q};
}

BranchFlow branch_flows(const OperatingPoint& x, const Branch& br) {
  return branch_flows(x, br, branch_admittance(br));
}

ResidualLayout residual_layout(const Network& net) {
  ResidualLayout out;
  const std::size_t n = net.bus_count();
  for (std::size_t i = 0; i < n; ++i) {
    out.eq_rows.push_back({ConstraintKind::ActiveBalance, i});
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.eq_rows.push_back({ConstraintKind::ReactiveBalance, i});
  }
  out.eq_rows.push_back({ConstraintKind::SlackAngle, net.slack_bus});
  for (std::size_t i = 0; i < n; ++i) {
    out.ineq_rows.push_back({ConstraintKind::VoltageMin, i});
    out.ineq_rows.push_back({ConstraintKind::VoltageMax, i});
  }
  for (std::size_t j = 0; j < net.generator_count(); ++j) {
    out.ineq_rows.push_back({ConstraintKind::ActiveGenMin, j});
    out.ineq_rows.push_back({ConstraintKind::ActiveGenMax, j});
    out.ineq_rows.push_back({ConstraintKind::ReactiveGenMin, j});
    out.ineq_rows.push_back({ConstraintKind::ReactiveGenMax, j});
  }
  for (std::size_t l = 0; l < net.branch_count(); ++l) {
    out.ineq_rows.push_back({ConstraintKind::AngleDiffMax, l});
    out.ineq_rows.push_back({ConstraintKind::AngleDiffMin, l});
    if (net.branches[l].has_thermal_limit()) {
      out.ineq_rows.push_back({ConstraintKind::ThermalFrom, l});
      out.ineq_rows.push_back({ConstraintKind::ThermalTo, l});
    }
  }
  return out;
}

ResidualReport residuals(const OperatingPoint& x, const Network& net,
                         const AdmittanceStructure& y) {
  check_dims(x, net);
  VariableLayout layout(net);
  const std::vector<double> flat = layout.pack(x);
  StateView s{layout, flat};
  ResidualLayout rl = residual_layout(net);
  ResidualReport rep;
  rep.eq_rows = std::move(rl.eq_rows);
  rep.ineq_rows = std::move(rl.ineq_rows);
  rep.equalities.reserve(rep.eq_rows.size());
  rep.inequalities.reserve(rep.ineq_rows.size());
  double worst = 0.0;
  for (const auto& row : rep.eq_rows) {
    double r = eval_row(net, y, s, row, NoSink{});
    rep.equalities.push_back(r);
    worst = std::max(worst, std::abs(r));
  }
  for (const auto& row : rep.ineq_rows) {
    double r = eval_row(net, y, s, row, NoSink{});
    rep.inequalities.push_back(r);
    worst = std::max(worst, -r);
  }
  rep.max_violation = worst;
  return rep;
}

ResidualReport residuals(const OperatingPoint& x, const Network& net) {
  return residuals(x, net, build_admittance(net));
}

namespace {

Eigen::SparseMatrix<double, Eigen::RowMajor> row_jacobian(
    const Network& net, const AdmittanceStructure& y, const StateView& s,
    const std::vector<ConstraintRow>& rows) {
  std::vector<Eigen::Triplet<double>> trip;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    eval_row(net, y, s, rows[r], [&](std::size_t col, double d) {
      trip.emplace_back(static_cast<int>(r), static_cast<int>(col), d);
    });
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> m(
      static_cast<Eigen::Index>(rows.size()),
      static_cast<Eigen::Index>(s.layout.size()));
  // Duplicates (e.g. v_i partial emitted once per term) are summed.
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

ResidualJacobians jacobians(const OperatingPoint& x, const Network& net,
                            const AdmittanceStructure& y) {
  check_dims(x, net);
  VariableLayout layout(net);
  const std::vector<double> flat = layout.pack(x);
  StateView s{layout, flat};
  ResidualLayout rl = residual_layout(net);
  return {row_jacobian(net, y, s, rl.eq_rows),
          row_jacobian(net, y, s, rl.ineq_rows)};
}

ResidualJacobians jacobians(const OperatingPoint& x, const Network& net) {
  return jacobians(x, net, build_admittance(net));
}

NetworkConstraints network_constraints(const Network& net) {
  NetworkConstraints out;
  const std::size_t n = net.bus_count();
  for (std::size_t i = 0; i < n; ++i) {
    out.eq_rows.push_back({ConstraintKind::ActiveBalance, i});
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.eq_rows.push_back({ConstraintKind::ReactiveBalance, i});
  }
  for (std::size_t l = 0; l < net.branch_count(); ++l) {
    out.ineq_rows.push_back({ConstraintKind::AngleDiffMax, l});
    out.ineq_rows.push_back({ConstraintKind::AngleDiffMin, l});
    if (net.branches[l].has_thermal_limit()) {
      out.ineq_rows.push_back({ConstraintKind::ThermalFrom, l});
      out.ineq_rows.push_back({ConstraintKind::ThermalTo, l});
    }
  }
  return out;
}

void evaluate_network_constraints(const Network& net,
                                  const AdmittanceStructure& y,
                                  std::span<const double> flat,
                                  std::span<double> eq, std::span<double> ineq,
                                  double* eq_jac, double* ineq_jac) {
  VariableLayout layout(net);
  StateView s{layout, flat};
  const std::size_t nx = layout.size();
  // The row lists are cheap to rebuild; callers hold no state.
  NetworkConstraints rows = network_constraints(net);
  auto run = [&](const std::vector<ConstraintRow>& list, std::span<double> out,
                 double* jac) {
    if (jac != nullptr) std::fill(jac, jac + list.size() * nx, 0.0);
    for (std::size_t r = 0; r < list.size(); ++r) {
      if (jac != nullptr) {
        double* row = jac + r * nx;
        out[r] = eval_row(net, y, s, list[r],
                          [row](std::size_t col, double d) { row[col] += d; });
      } else {
        out[r] = eval_row(net, y, s, list[r], NoSink{});
      }
    }
  };
  run(rows.eq_rows, eq, eq_jac);
  run(rows.ineq_rows, ineq, ineq_jac);
}

}  // namespace opfx

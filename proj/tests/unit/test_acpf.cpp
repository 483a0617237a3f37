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

#include <doctest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "opfx/acpf.hpp"

using namespace opfx;

namespace {

OperatingPoint flat(const Network& net) {
  OperatingPoint x;
  x.v.assign(net.bus_count(), 1.0);
  x.theta.assign(net.bus_count(), 0.0);
  x.p_gen.assign(net.generator_count(), 0.0);
  x.q_gen.assign(net.generator_count(), 0.0);
  return x;
}

std::size_t row_of(const std::vector<ConstraintRow>& rows, ConstraintKind kind,
                   std::size_t element) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].kind == kind && rows[r].element == element) return r;
  }
  FAIL("row not found");
  return 0;
}

// Central differences of every residual row against every flat coordinate.
void check_jacobians(const Network& net, const OperatingPoint& x0) {
  const VariableLayout L(net);
  const ResidualJacobians J = jacobians(x0, net);
  const Eigen::MatrixXd je(J.equalities);
  const Eigen::MatrixXd ji(J.inequalities);
  std::vector<double> flat = L.pack(x0);
  const double h = 1e-6;
  for (std::size_t c = 0; c < flat.size(); ++c) {
    const double keep = flat[c];
    flat[c] = keep + h;
    const ResidualReport up = residuals(L.unpack(flat), net);
    flat[c] = keep - h;
    const ResidualReport dn = residuals(L.unpack(flat), net);
    flat[c] = keep;
    for (std::size_t r = 0; r < up.equalities.size(); ++r) {
      const double fd = (up.equalities[r] - dn.equalities[r]) / (2 * h);
      CHECK(test::close_rel(je(r, c), fd, 1e-5));
    }
    for (std::size_t r = 0; r < up.inequalities.size(); ++r) {
      const double fd = (up.inequalities[r] - dn.inequalities[r]) / (2 * h);
      CHECK(test::close_rel(ji(r, c), fd, 1e-5));
    }
  }
}

}  // namespace

TEST_CASE("flat start on a lossless network injects no active power") {
  const Network net = test::two_bus(0.0, 0.1);
  const Injections s = injections(flat(net), build_admittance(net));
  for (double p : s.p) CHECK(p == 0.0);
}

TEST_CASE("two-bus injections by hand") {
  // ys = 1 - 5j gives G = [[1,-1],[-1,1]], B = [[-5,5],[5,-5]]
  const Network net = test::two_bus(1.0 / 26.0, 5.0 / 26.0);
  const AdmittanceStructure y = build_admittance(net);
  REQUIRE(y.g(0, 0) == doctest::Approx(1.0));
  REQUIRE(y.b(0, 1) == doctest::Approx(5.0));
  OperatingPoint x = flat(net);
  x.v = {1.1, 1.0};
  const Injections s = injections(x, y);
  CHECK(s.p[0] == doctest::Approx(0.11).epsilon(1e-12));
  CHECK(s.q[0] == doctest::Approx(0.55).epsilon(1e-12));
}

TEST_CASE("branch flows") {
  const Network net = test::two_bus(0.0, 0.1);
  OperatingPoint x = flat(net);
  CHECK(branch_flows(x, net.branches[0]).p_ij == doctest::Approx(0.0));
  x.theta = {0.1, 0.0};
  const BranchFlow f = branch_flows(x, net.branches[0]);
  CHECK(f.p_ij == doctest::Approx(10.0 * std::sin(0.1)).epsilon(1e-12));

  std::mt19937_64 rng(7);
  for (int k = 0; k < 20; ++k) {
    const BranchFlow g = branch_flows(test::random_point(net, rng), net.branches[0]);
    CHECK(std::abs(g.p_ij + g.p_ji) <= 1e-12);
  }
}

TEST_CASE("residual signs") {
  const Network net = test::case3();
  SUBCASE("balance residual is p_i minus net generation") {
    OperatingPoint x = flat(net);
    x.v = {1.05, 0.98, 1.01};
    x.theta = {0.0, 0.05, -0.04};
    Network no_load = net;
    for (Bus& b : no_load.buses) b.p_load = b.q_load = 0.0;
    const ResidualReport r = residuals(x, no_load);
    const Injections s = injections(x, build_admittance(no_load));
    for (std::size_t i = 0; i < net.bus_count(); ++i) {
      CHECK(r.value(ConstraintKind::ActiveBalance, i) == doctest::Approx(s.p[i]));
      CHECK(r.value(ConstraintKind::ReactiveBalance, i) == doctest::Approx(s.q[i]));
    }
  }
  SUBCASE("voltage above its bound") {
    OperatingPoint x = flat(net);
    x.v[1] = net.buses[1].v_max + 0.05;
    const ResidualReport r = residuals(x, net);
    CHECK(r.value(ConstraintKind::VoltageMax, 1) == doctest::Approx(-0.05));
    CHECK(r.max_violation >= 0.05 - 1e-12);
  }
  SUBCASE("slack angle") {
    OperatingPoint x = flat(net);
    x.theta[net.slack_bus] = 0.1;
    CHECK(residuals(x, net).value(ConstraintKind::SlackAngle, net.slack_bus) ==
          doctest::Approx(0.1));
  }
}

TEST_CASE("jacobians match central differences") {
  std::mt19937_64 rng(11);
  for (const Network& net : {test::case3(), test::case5()}) {
    for (int k = 0; k < 5; ++k) check_jacobians(net, test::random_point(net, rng));
  }
}

TEST_CASE("jacobian structure") {
  const Network net = test::case5();
  const VariableLayout L(net);
  std::mt19937_64 rng(3);
  const OperatingPoint x = test::random_point(net, rng);
  const ResidualReport rep = residuals(x, net);
  const Eigen::MatrixXd je(jacobians(x, net).equalities);
  const AdmittanceStructure y = build_admittance(net);
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    const std::size_t r = row_of(rep.eq_rows, ConstraintKind::ActiveBalance, i);
    const auto nb = y.neighbors(i);
    for (std::size_t k = 0; k < net.bus_count(); ++k) {
      if (std::find(nb.begin(), nb.end(), k) == nb.end()) {
        CHECK(je(r, L.theta(k)) == 0.0);
      }
    }
    for (std::size_t j = 0; j < net.generator_count(); ++j) {
      CHECK(je(r, L.p_gen(j)) == (net.generators[j].bus == i ? -1.0 : 0.0));
    }
  }
}

TEST_CASE("layout pack and unpack are inverse") {
  const Network net = test::case5();
  std::mt19937_64 rng(5);
  const OperatingPoint x = test::random_point(net, rng);
  const VariableLayout L(net);
  CHECK(L.unpack(L.pack(x)) == x);
  CHECK(L.size() == 2 * 5 + 2 * 5);
}

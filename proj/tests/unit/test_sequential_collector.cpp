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

#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "opfx/sequential_collector.hpp"
#include "opfx/set_metrics.hpp"

using namespace opfx;

namespace {

CollectorConfig config(std::size_t n, const std::string& id = "f36") {
  CollectorConfig c;
  c.objective_id = id;
  c.n = n;
  return c;
}

double pq_distance(const OperatingPoint& a, const OperatingPoint& b) {
  const PointSet s = project({a, b}, NormKind::PQ, InjectionSet::Generators, Network{});
  double d = 0.0;
  for (std::size_t k = 0; k < s[0].size(); ++k) d += (s[0][k] - s[1][k]) * (s[0][k] - s[1][k]);
  return std::sqrt(d);
}

Network overloaded() {
  Network net = test::two_bus(0.01, 0.1);
  net.buses[1].p_load = 10.0;  // far above the only generator's p_max
  return net;
}

}  // namespace

TEST_CASE("seed point on case3") {
  const Network net = test::case3();
  const SequentialCollector col(net, config(1));
  const SolutionLibrary lib = col.seed_point();
  REQUIRE(lib.size() == 1);
  CHECK(lib.provenance[0].objective_id.empty());
  CHECK(residuals(lib.points[0], net).max_violation <= 1e-6);
  CHECK(lib.network_hash == network_hash(net));
  CHECK(col.seed_point() == lib);
}

TEST_CASE("infeasible network stops at the seed") {
  SequentialCollector col(overloaded(), config(5));
  try {
    col.collect();
    FAIL("expected SolverFailure");
  } catch (const SolverFailure& e) {
    CHECK(e.status() == SolveStatus::Infeasible);
  }
}

TEST_CASE("one step moves away from the seed") {
  const Network net = test::case3();
  SequentialCollector col(net, config(2));
  SolutionLibrary lib = col.seed_point();
  REQUIRE(col.step(lib));
  REQUIRE(lib.size() == 2);
  CHECK(pq_distance(lib.points[0], lib.points[1]) > 1e-4);
  CHECK(residuals(lib.points[1], net).max_violation <= kFeasibilityCheck);
  CHECK(lib.provenance[1].objective_id == "f36");
  CHECK(std::isfinite(lib.provenance[1].objective_value));
}

TEST_CASE("a failing objective is recorded as DNF") {
  const Network net = test::case3();
  const auto nan_objective = [](const ObjectiveSpec&, const VariableLayout&,
                                const SolutionLibrary&) -> ObjectiveFn {
    return [](std::span<const double>, std::span<double> g) {
      for (double& v : g) v = std::numeric_limits<double>::quiet_NaN();
      return std::numeric_limits<double>::quiet_NaN();
    };
  };

  SUBCASE("skip and perturb") {
    SequentialCollector col(net, config(3, "g01"));
    col.set_objective_builder(nan_objective);
    SolutionLibrary lib = col.seed_point();
    const SolutionLibrary before = lib;
    CHECK_FALSE(col.step(lib));
    CHECK(lib == before);
    REQUIRE(col.dnf_events().size() == 1);
    CHECK(col.dnf_events()[0].objective_id == "g01");
    CHECK(col.dnf_events()[0].attempts >= 1);
  }
  SUBCASE("abort") {
    CollectorConfig c = config(3, "g01");
    c.dnf_policy = DnfPolicy::Abort;
    SequentialCollector col(net, c);
    col.set_objective_builder(nan_objective);
    SolutionLibrary lib = col.seed_point();
    CHECK_THROWS_AS(col.step(lib), SolverFailure);
  }
}

TEST_CASE("n = 1 returns the seed library") {
  SequentialCollector col(test::case3(), config(1));
  const SolutionLibrary lib = col.collect();
  CHECK(lib.size() == 1);
  CHECK(col.dnf_events().empty());
}

TEST_CASE("ten f36 points are feasible and distinct, and reproducible") {
  const Network net = test::case3();
  SequentialCollector a(net, config(10));
  const SolutionLibrary lib = a.collect();
  REQUIRE(lib.size() == 10);
  for (std::size_t i = 0; i < lib.size(); ++i) {
    CHECK(lib.provenance[i].sequence == i);
    CHECK(residuals(lib.points[i], net).max_violation <= kFeasibilityCheck);
    for (std::size_t j = 0; j < i; ++j) CHECK(pq_distance(lib.points[i], lib.points[j]) > 0.0);
  }
  SequentialCollector b(net, config(10));
  CHECK(b.collect() == lib);
}

TEST_CASE("configuration is validated") {
  CHECK_THROWS_AS(config(0).validate(), std::invalid_argument);
  CollectorConfig c = config(3);
  c.perturbation = -1.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK_THROWS_AS(SequentialCollector(test::case3(), config(3, "nope")), CatalogError);
}

TEST_CASE("counter-based draws") {
  double sum = 0.0;
  for (std::uint64_t k = 0; k < 20000; ++k) {
    const double u = signed_unit(42, 1, 2, k);
    CHECK(u >= -1.0);
    CHECK(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / 20000) < 0.02);
  CHECK(signed_unit(42, 1, 2, 3) == signed_unit(42, 1, 2, 3));
  CHECK(signed_unit(42, 1, 2, 3) != signed_unit(43, 1, 2, 3));
}

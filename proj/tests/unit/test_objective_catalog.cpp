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
#include <random>
#include <set>

#include "fixtures.hpp"
#include "opfx/objective_catalog.hpp"

using namespace opfx;

namespace {

using G = VariableGroup;

SolutionLibrary one_point(const OperatingPoint& y) {
  SolutionLibrary lib;
  lib.append(y, {});
  return lib;
}

}  // namespace

TEST_CASE("named entries") {
  const ObjectiveCatalog& cat = ObjectiveCatalog::builtin();
  const ObjectiveSpec& f36 = cat.at("f36");
  CHECK(f36.transform == Transform::Ln);
  CHECK(f36.metric == Metric::Euclidean);
  CHECK(f36.groups == std::vector<G>{G::P, G::Q, G::V, G::Theta});
  const ObjectiveSpec& f38 = cat.at("f38");
  CHECK(f38.transform == Transform::Ln);
  CHECK(f38.metric == Metric::Manhattan);
  CHECK(f38.groups == std::vector<G>{G::P, G::Q, G::V});
  const ObjectiveSpec& f03 = cat.at("f03");
  CHECK(f03.transform == Transform::Ln);
  CHECK(f03.metric == Metric::SquaredEuclidean);
  CHECK(f03.groups == std::vector<G>{G::P, G::Q});
  CHECK_THROWS_AS(cat.at("nope"), CatalogError);
}

TEST_CASE("catalog covers log and exp families with unique ids") {
  const ObjectiveCatalog& cat = ObjectiveCatalog::builtin();
  std::size_t logs = 0, exps = 0;
  std::set<std::string> ids;
  for (const ObjectiveSpec& s : cat.entries()) {
    logs += s.log_family();
    exps += s.exp_family();
    CHECK(ids.insert(s.id).second);
    CHECK(!s.groups.empty());
  }
  CHECK(logs >= 5);
  CHECK(exps >= 5);
}

TEST_CASE("f03 values by hand") {
  const Network net = test::two_bus(0.0, 0.1);
  std::mt19937_64 rng(1);
  const OperatingPoint y = test::random_point(net, rng);
  const ObjectiveSpec& f03 = ObjectiveCatalog::builtin().at("f03");

  SUBCASE("identical point hits the guard") {
    CHECK(evaluate(f03, y, one_point(y)) == doctest::Approx(2 * std::log(kLogGuard)));
    for (double g : gradient(f03, y, one_point(y))) CHECK(g == 0.0);
  }
  SUBCASE("unit differences") {
    OperatingPoint x = y;
    x.p_gen[0] += 1.0;
    x.q_gen[0] -= 1.0;
    CHECK(evaluate(f03, x, one_point(y)) == doctest::Approx(0.0));
  }
}

TEST_CASE("f38 value by hand") {
  const Network net = test::two_bus(0.0, 0.1);
  std::mt19937_64 rng(2);
  const OperatingPoint y = test::random_point(net, rng);
  OperatingPoint x = y;
  x.p_gen[0] += M_E;
  x.q_gen[0] -= M_E;
  x.v[0] += M_E / 2;
  x.v[1] -= M_E / 2;
  x.theta[1] += 0.3;  // not in f38
  CHECK(evaluate(ObjectiveCatalog::builtin().at("f38"), x, one_point(y)) ==
        doctest::Approx(3.0));
}

TEST_CASE("groups outside the objective have zero partials") {
  const Network net = test::case5();
  std::mt19937_64 rng(3);
  const OperatingPoint y = test::random_point(net, rng);
  const OperatingPoint x = test::random_point(net, rng);
  const VariableLayout L(net);
  const auto g = gradient(ObjectiveCatalog::builtin().at("f03"), x, one_point(y));
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    CHECK(g[L.v(i)] == 0.0);
    CHECK(g[L.theta(i)] == 0.0);
  }
}

TEST_CASE("every entry matches central differences") {
  std::mt19937_64 rng(4);
  for (const Network& net : {test::case3(), test::case5()}) {
    const VariableLayout L(net);
    SolutionLibrary lib;
    for (int k = 0; k < 3; ++k) lib.append(test::random_point(net, rng), {});
    for (const ObjectiveSpec& spec : ObjectiveCatalog::builtin().entries()) {
      const BoundObjective f(spec, L, lib.points);
      for (int trial = 0; trial < 3; ++trial) {
        std::vector<double> x = L.pack(test::random_point(net, rng));
        std::vector<double> g(x.size());
        const double f0 = f(x, g);
        REQUIRE(std::isfinite(f0));
        const double h = 1e-6;
        for (std::size_t c = 0; c < x.size(); ++c) {
          const double keep = x[c];
          x[c] = keep + h;
          const double up = f(x, {});
          x[c] = keep - h;
          const double dn = f(x, {});
          x[c] = keep;
          const double fd = (up - dn) / (2 * h);
          INFO(spec.id << " coordinate " << c);
          CHECK(test::close_rel(g[c], fd, 1e-5, 1e-6 * std::max(1.0, std::abs(f0))));
        }
      }
    }
  }
}

TEST_CASE("bound objective agrees with evaluate") {
  const Network net = test::case5();
  const VariableLayout L(net);
  std::mt19937_64 rng(5);
  SolutionLibrary lib;
  for (int k = 0; k < 4; ++k) lib.append(test::random_point(net, rng), {});
  const OperatingPoint x = test::random_point(net, rng);
  for (const ObjectiveSpec& spec : ObjectiveCatalog::builtin().entries()) {
    const BoundObjective f(spec, L, lib.points);
    CHECK(f(L.pack(x), {}) == doctest::Approx(evaluate(spec, x, lib)).epsilon(1e-12));
  }
}

TEST_CASE("registration") {
  ObjectiveCatalog cat;
  const std::size_t before = cat.size();
  ObjectiveSpec s;
  s.id = "h01";
  s.metric = Metric::MaxDifference;
  s.transform = Transform::Log10;
  s.groups = {G::P};
  CHECK(cat.register_spec(s) == "h01");
  CHECK(cat.size() == before + 1);
  CHECK(cat.find("h01") != nullptr);

  ObjectiveSpec dup = cat.at("f36");
  CHECK_THROWS_AS(cat.register_spec(dup), CatalogError);

  ObjectiveSpec empty = s;
  empty.id = "h02";
  empty.groups.clear();
  CHECK_THROWS_AS(cat.register_spec(empty), CatalogError);

  ObjectiveSpec unordered = s;
  unordered.id = "h03";
  unordered.groups = {G::V, G::P};
  cat.register_spec(unordered);
  CHECK(cat.at("h03").groups == std::vector<G>{G::P, G::V});
}

TEST_CASE("manifest round trip") {
  const ObjectiveCatalog& cat = ObjectiveCatalog::builtin();
  const ObjectiveCatalog back = ObjectiveCatalog::from_manifest_json(cat.manifest_json());
  CHECK(back.entries() == cat.entries());
}

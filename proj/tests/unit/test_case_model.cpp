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

#include "fixtures.hpp"
#include "opfx/case_model.hpp"

using namespace opfx;

namespace {

const char* kTinyCase = R"(
function mpc = tiny
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0 0 0 1 1.0 0 230 1 1.1 0.9;
  2 1 50 10 0 0 1 1.0 0 230 1 1.1 0.9;
];
mpc.gen = [
  1 0 0 100 -100 1.0 100 1 200 0;
];
mpc.branch = [
  1 2 0.0 0.1 0.0 0 0 0 0 0 1 -30 30;
];
)";

}  // namespace

TEST_CASE("case3 parses with the published counts") {
  const Network net = test::case3();
  CHECK(net.bus_count() == 3);
  CHECK(net.generator_count() == 3);
  CHECK(net.branch_count() == 3);
  CHECK(net.buses[net.slack_bus].type == BusType::Reference);
  CHECK(validate(net).empty());
}

TEST_CASE("case5 parses with the published counts") {
  const Network net = test::case5();
  CHECK(net.bus_count() == 5);
  CHECK(net.generator_count() == 5);
  CHECK(net.branch_count() == 6);
  CHECK(validate(net).empty());
  // two generators share bus 1
  CHECK(net.generator_buses().size() == 4);
}

TEST_CASE("per-unit and radian conversion") {
  const Network net = parse_case(kTinyCase);
  CHECK(net.buses[1].p_load == doctest::Approx(0.5));
  CHECK(net.buses[1].q_load == doctest::Approx(0.1));
  CHECK(net.generators[0].p_max == doctest::Approx(2.0));
  CHECK(net.branches[0].angle_max == doctest::Approx(M_PI / 6));
  CHECK(net.branches[0].tap == 1.0);
  CHECK(net.branches[0].s_max == 0.0);
}

TEST_CASE("generator on an unknown bus is a reference error") {
  std::string text = kTinyCase;
  text.replace(text.find("  1 0 0 100"), 4, " 99 ");
  CHECK_THROWS_AS(parse_case(text), CaseReferenceError);
}

TEST_CASE("malformed numbers report their line") {
  std::string text = kTinyCase;
  text.replace(text.find("50 10"), 2, "5x");
  try {
    parse_case(text);
    FAIL("expected a parse error");
  } catch (const CaseParseError& e) {
    CHECK(e.line() == 6);
  }
}

TEST_CASE("lossless line admittance by hand") {
  const Network net = test::two_bus(0.0, 0.1);
  const AdmittanceStructure y = build_admittance(net);
  CHECK(y.b(0, 0) == doctest::Approx(-10.0));
  CHECK(y.b(0, 1) == doctest::Approx(10.0));
  CHECK(y.b(1, 0) == doctest::Approx(10.0));
  CHECK(y.b(1, 1) == doctest::Approx(-10.0));
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t k = 0; k < 2; ++k) CHECK(y.g(i, k) == 0.0);
  }
}

TEST_CASE("no branches leaves a diagonal structure") {
  Network net = test::two_bus(0.0, 0.1);
  net.branches.clear();
  const AdmittanceStructure y = build_admittance(net);
  CHECK(y.neighbors(0) == std::vector<std::size_t>{0});
  CHECK(y.neighbors(1) == std::vector<std::size_t>{1});
}

TEST_CASE("untapped networks have symmetric admittance") {
  const Network net = test::case5();
  const AdmittanceStructure y = build_admittance(net);
  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    for (std::size_t k = 0; k < net.bus_count(); ++k) {
      CHECK(y.g(i, k) == y.g(k, i));
      CHECK(y.b(i, k) == y.b(k, i));
    }
  }
}

TEST_CASE("validation findings") {
  SUBCASE("inverted voltage band names the bus") {
    Network net = test::case5();
    net.buses[2].v_min = 1.1;
    net.buses[2].v_max = 0.9;
    const auto v = validate(net);
    REQUIRE(v.size() == 1);
    CHECK(v[0].element == "bus");
    CHECK(v[0].index == 2);
  }
  SUBCASE("two reference buses") {
    Network net = test::case5();
    net.buses[(net.slack_bus + 1) % net.bus_count()].type = BusType::Reference;
    CHECK(validate(net).size() == 1);
  }
}

TEST_CASE("json round trip and stable hash") {
  const Network net = test::case5();
  const Network back = network_from_json(network_to_json(net));
  CHECK(back == net);
  CHECK(network_hash(back) == network_hash(net));
  Network other = net;
  other.buses[0].p_load += 1e-9;
  CHECK(network_hash(other) != network_hash(net));
}

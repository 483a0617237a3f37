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

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "opfx/acpf.hpp"
#include "opfx/case_model.hpp"

namespace opfx::test {

inline std::string data_path(const std::string& file) {
  return std::string(OPFX_DATA_DIR) + "/" + file;
}

inline Network case3() { return load_case_file(data_path("pglib_opf_case3_lmbd.m")); }
inline Network case5() { return load_case_file(data_path("pglib_opf_case5_pjm.m")); }

// Two buses joined by one line; bus 0 is the reference and hosts the only
// generator.
inline Network two_bus(double r, double x) {
  Network net;
  net.name = "two-bus";
  Bus b0;
  b0.id = 1;
  b0.type = BusType::Reference;
  Bus b1;
  b1.id = 2;
  b1.p_load = 0.5;
  b1.q_load = 0.1;
  net.buses = {b0, b1};
  Generator g;
  g.bus = 0;
  g.p_max = 2.0;
  g.q_min = -2.0;
  g.q_max = 2.0;
  net.generators = {g};
  Branch br;
  br.from = 0;
  br.to = 1;
  br.r = r;
  br.x = x;
  br.angle_min = -M_PI / 2;
  br.angle_max = M_PI / 2;
  net.branches = {br};
  net.slack_bus = 0;
  return net;
}

// A point drawn inside the variable bounds, angles within +-0.3 rad.
inline OperatingPoint random_point(const Network& net, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  OperatingPoint x;
  for (const Bus& b : net.buses) {
    x.v.push_back(b.v_min + (b.v_max - b.v_min) * u(rng));
    x.theta.push_back(-0.3 + 0.6 * u(rng));
  }
  for (const Generator& g : net.generators) {
    x.p_gen.push_back(g.p_min + (g.p_max - g.p_min) * u(rng));
    x.q_gen.push_back(g.q_min + (g.q_max - g.q_min) * u(rng));
  }
  return x;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-7) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace opfx::test

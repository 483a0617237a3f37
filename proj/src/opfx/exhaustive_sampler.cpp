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

#include "opfx/exhaustive_sampler.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "opfx/sequential_collector.hpp"

namespace opfx {

std::vector<VoltageOverride> VoltageBox::overrides() const {
  std::vector<VoltageOverride> o;
  o.reserve(buses.size());
  for (std::size_t k = 0; k < buses.size(); ++k) o.push_back({buses[k], lo[k], hi[k]});
  return o;
}

bool VoltageBox::contains(const OperatingPoint& x, double slack) const {
  for (std::size_t k = 0; k < buses.size(); ++k) {
    const double v = x.v.at(buses[k]);
    if (v < lo[k] - slack || v > hi[k] + slack) return false;
  }
  return true;
}

std::size_t partition_count(const Network& net, std::size_t m,
                            std::size_t cap) {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  const std::size_t n = net.generator_buses().size();
  std::size_t count = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (count > cap / m) {
      throw PartitionCapError(
          std::to_string(m) + "^" + std::to_string(n) +
          " partitions exceed the cap of " + std::to_string(cap) +
          "; use a smaller m");
    }
    count *= m;
  }
  if (count > cap) {
    throw PartitionCapError("partition count exceeds the cap of " +
                            std::to_string(cap) + "; use a smaller m");
  }
  return count;
}

std::vector<VoltageBox> partition(const Network& net, std::size_t m,
                                  std::size_t cap) {
  const std::size_t count = partition_count(net, m, cap);
  const std::vector<std::size_t> gb = net.generator_buses();
  const std::size_t n = gb.size();

  // Shared edges per generator bus.
  std::vector<std::vector<double>> edges(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = net.buses[gb[k]].v_min, b = net.buses[gb[k]].v_max;
    edges[k].resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
      edges[k][j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(m);
    }
    edges[k][0] = a;
    edges[k][m] = b;
  }

  std::vector<VoltageBox> boxes(count);
  for (std::size_t i = 0; i < count; ++i) {
    VoltageBox& box = boxes[i];
    box.index = i;
    box.buses = gb;
    box.digits.resize(n);
    box.lo.resize(n);
    box.hi.resize(n);
    std::size_t r = i;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t d = r % m;
      r /= m;
      box.digits[k] = d;
      box.lo[k] = edges[k][d];
      box.hi[k] = edges[k][d + 1];
    }
  }
  return boxes;
}

double ExhaustiveSet::feasible_fraction() const {
  if (records.empty()) return 0.0;
  std::size_t f = 0;
  for (const PartitionRecord& r : records) f += r.feasible ? 1 : 0;
  return static_cast<double>(f) / static_cast<double>(records.size());
}

void SamplerConfig::validate() const {
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  if (!(duplicate_tol >= 0.0)) {
    throw std::invalid_argument("duplicate tolerance must be >= 0");
  }
  if (!(perturbation >= 0.0) || !std::isfinite(perturbation)) {
    throw std::invalid_argument("perturbation scale must be finite and >= 0");
  }
  if (solver.max_iter < 1) {
    throw std::invalid_argument("max_iter must be at least 1");
  }
}

ExhaustiveSampler::ExhaustiveSampler(Network net, SamplerConfig cfg,
                                     const ObjectiveCatalog& catalog)
    : model_(std::move(net)), cfg_(std::move(cfg)) {
  cfg_.validate();
  spec_ = catalog.at(cfg_.objective_id);
}

SolveResult ExhaustiveSampler::probe(const VoltageBox& box) const {
  const std::vector<VoltageOverride> o = box.overrides();
  const ProblemDef p = model_.problem({}, o);
  SolveResult r = find_feasible(p, model_.flat_start(o), cfg_.solver);
  if (r.optimal() && !(model_.max_violation(r.x) <= kFeasibilityCheck)) {
    r.status = SolveStatus::NumericalFailure;
    r.message = "residual check failed";
  }
  return r;
}

bool ExhaustiveSampler::duplicate(const OperatingPoint& x,
                                  const ExhaustiveSet& xe) const {
  const double tol2 = cfg_.duplicate_tol * cfg_.duplicate_tol;
  for (const OperatingPoint& y : xe.points) {
    double d2 = 0.0;
    for (std::size_t j = 0; j < x.p_gen.size(); ++j) {
      const double dp = x.p_gen[j] - y.p_gen[j], dq = x.q_gen[j] - y.q_gen[j];
      d2 += dp * dp + dq * dq;
    }
    if (d2 <= tol2) return true;
  }
  return false;
}

std::vector<OperatingPoint> ExhaustiveSampler::explore(
    const VoltageBox& box, std::span<const double> start, ExhaustiveSet& xe,
    PartitionRecord& record) const {
  if (!record.feasible) {
    throw std::invalid_argument("explore needs a box that probed feasible");
  }
  const VariableLayout& L = model_.layout();
  const std::vector<VoltageOverride> o = box.overrides();
  std::vector<OperatingPoint> found;
  std::vector<double> last(start.begin(), start.end());

  auto accept = [&](const OperatingPoint& x) {
    xe.points.push_back(x);
    xe.partition_of.push_back(box.index);
    found.push_back(x);
    ++record.points;
  };

  std::size_t solves = 0;
  if (xe.points.empty() && cfg_.t > 0) {
    accept(L.unpack(start));
    ++solves;
  }
  for (; solves < cfg_.t; ++solves) {
    auto f = std::make_shared<BoundObjective>(spec_, L, xe.points);
    const ProblemDef p = model_.problem(
        [f](std::span<const double> x, std::span<double> g) { return (*f)(x, g); },
        o);
    std::vector<double> x0 = last;
    for (std::size_t k = 0; k < 2 * L.buses; ++k) {
      x0[k] += cfg_.perturbation * signed_unit(cfg_.seed, box.index, solves, k);
    }
    const SolveResult r = solve(p, x0, cfg_.solver);
    SolveStatus st = r.status;
    OperatingPoint x = L.unpack(r.x);
    if (st == SolveStatus::Optimal &&
        (!(model_.max_violation(r.x) <= kFeasibilityCheck) || !box.contains(x))) {
      st = SolveStatus::NumericalFailure;
    }
    record.statuses.push_back(st);
    if (st != SolveStatus::Optimal) {
      record.stopped_early = true;
      break;
    }
    last = r.x;
    if (duplicate(x, xe)) {
      ++record.duplicates;
      continue;
    }
    accept(x);
  }
  return found;
}

ExhaustiveSet ExhaustiveSampler::run() const {
  const std::vector<VoltageBox> boxes = partition(model_.network(), cfg_.m, cfg_.cap);
  ExhaustiveSet xe;
  xe.network_hash = network_hash(model_.network());
  xe.m = cfg_.m;
  xe.t = cfg_.t;
  xe.records.resize(boxes.size());

  std::vector<SolveResult> probes(boxes.size());
  std::vector<double> probe_seconds(boxes.size());
  auto do_probe = [&](std::size_t i) {
    const auto t0 = std::chrono::steady_clock::now();
    probes[i] = probe(boxes[i]);
    probe_seconds[i] = std::chrono::duration<double>(
                           std::chrono::steady_clock::now() - t0)
                           .count();
  };
  const unsigned threads = std::max(1u, cfg_.threads);
  if (threads == 1) {
    for (std::size_t i = 0; i < boxes.size(); ++i) do_probe(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < boxes.size();) do_probe(i);
      });
    }
    for (std::thread& th : pool) th.join();
  }

  for (std::size_t i = 0; i < boxes.size(); ++i) {
    PartitionRecord& rec = xe.records[i];
    rec.index = i;
    rec.digits = boxes[i].digits;
    rec.probe_status = probes[i].status;
    rec.feasible = probes[i].optimal();
    rec.solve_seconds = probe_seconds[i];
    if (!rec.feasible || cfg_.t == 0) continue;
    const auto t0 = std::chrono::steady_clock::now();
    explore(boxes[i], probes[i].x, xe, rec);
    rec.solve_seconds += std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
  }
  return xe;
}

}  // namespace opfx

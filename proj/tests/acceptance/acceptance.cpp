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

// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes. Usage: acceptance [work-dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "opfx/io.hpp"
#include "opfx/objective_catalog.hpp"
#include "opfx/runs.hpp"

using namespace opfx;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

const std::string kCase3 = std::string(OPFX_DATA_DIR) + "/pglib_opf_case3_lmbd.m";
const std::string kCase5 = std::string(OPFX_DATA_DIR) + "/pglib_opf_case5_pjm.m";
const std::vector<std::string> kLogFamily = {"f03", "f18", "f36", "f37", "f38"};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream os;
  os.precision(precision);
  os << v;
  return os.str();
}

// Shared state between criteria.
struct Work {
  fs::path dir;
  std::vector<std::string> manifests;
  std::string xe3_path;
  std::vector<std::string> case3_libraries;

  std::string out(const std::string& sub) const { return (dir / sub).string(); }

  RunResult keep(RunResult r) {
    manifests.push_back(r.manifest_path);
    return r;
  }
};

// ---- 1 ----------------------------------------------------------------

double brute_directed(const PointSet& a, const PointSet& b) {
  double worst = 0.0;
  for (const auto& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b) {
      double s = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) s += (p[k] - q[k]) * (p[k] - q[k]);
      best = std::min(best, std::sqrt(s));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

Outcome hausdorff_oracle() {
  std::mt19937_64 rng(20261015);
  std::uniform_int_distribution<std::size_t> count(1, 50), dims(1, 20);
  std::normal_distribution<double> g(0.0, 1.0);
  auto draw = [&](std::size_t n, std::size_t d) {
    PointSet s(n, std::vector<double>(d));
    for (auto& p : s) {
      for (double& v : p) v = g(rng);
    }
    return s;
  };
  std::size_t equal = 0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t d = dims(rng);
    const PointSet a = draw(count(rng), d);
    const PointSet b = draw(count(rng), d);
    const double ref = std::max(brute_directed(a, b), brute_directed(b, a));
    equal += hausdorff(a, b) == ref;
  }
  return {equal == 200, std::to_string(equal) + "/200 pairs bit-identical"};
}

// ---- 2 ----------------------------------------------------------------

struct FdStats {
  std::size_t entries = 0;
  std::size_t failures = 0;
  std::size_t excluded = 0;
  std::size_t unresolved = 0;
  double worst = 0.0;
  std::string worst_where;
};

std::pair<std::size_t, std::size_t> group_range(const VariableLayout& L, VariableGroup g) {
  switch (g) {
    case VariableGroup::V: return {L.v(0), L.buses};
    case VariableGroup::Theta: return {L.theta(0), L.buses};
    case VariableGroup::P: return {L.p_gen(0), L.gens};
    case VariableGroup::Q: return {L.q_gen(0), L.gens};
  }
  return {0, 0};
}

double log_of_base(Transform t) {
  switch (t) {
    case Transform::Exp10: return std::log(10.0);
    case Transform::Exp2: return std::log(2.0);
    default: return 1.0;
  }
}

double transform(Transform t, double m) {
  switch (t) {
    case Transform::Identity: return m;
    case Transform::Ln: return std::log(std::max(m, kLogGuard));
    case Transform::Log10: return std::log10(std::max(m, kLogGuard));
    case Transform::Log2: return std::log2(std::max(m, kLogGuard));
    default: return std::exp(std::min(m * log_of_base(t), kExpCap));
  }
}

// Error bound of a central difference of the inner metric: rounding of m
// itself, plus the truncation of |d|^3 whose third derivative jumps at 0.
double resolution(Metric metric, double m, double d, double h) {
  const double eps = std::numeric_limits<double>::epsilon();
  double bound = 4 * eps * std::max(std::abs(m), 1e-300) / (2 * h);
  if (metric == Metric::CubedDifference && std::abs(d) <= 2 * h) bound += 3 * h * (h + std::abs(d));
  return bound;
}

// True when moving x[c] by +-h crosses a point where the term is not
// differentiable, so a central difference says nothing about the gradient.
bool straddles_kink(const ObjectiveSpec& spec, const std::vector<double>& x,
                    const std::vector<double>& y, std::size_t lo, std::size_t len,
                    std::size_t c, double m, double dm, double h) {
  const double d = x[c] - y[c];
  const double reach = 2 * h * std::max(1.0, std::abs(dm));
  switch (spec.metric) {
    case Metric::Manhattan:
      if (std::abs(d) <= 2 * h) return true;
      break;
    case Metric::SquaredAbsDifference:
      if (std::abs(x[c] * x[c] - y[c] * y[c]) <= 2 * h * (2 * std::abs(x[c]) + h)) return true;
      break;
    case Metric::MaxDifference: {
      double other = 0.0;
      for (std::size_t k = lo; k < lo + len; ++k) {
        if (k != c) other = std::max(other, std::abs(x[k] - y[k]));
      }
      if (std::abs(d) <= 2 * h || std::abs(std::abs(d) - other) <= 2 * h) return true;
      break;
    }
    case Metric::Euclidean:
      if (m <= 2 * h) return true;
      break;
    default:
      break;
  }
  if (spec.log_family() && m <= kLogGuard + reach) return true;
  if (spec.exp_family()) {
    const double b = log_of_base(spec.transform);
    if (std::abs(m * b - kExpCap) <= b * reach) return true;
  }
  return false;
}

// Relative error with a unit floor on the denominator.
double rel_err(double analytic, double fd) {
  return std::abs(analytic - fd) / std::max({1.0, std::abs(analytic), std::abs(fd)});
}

void record(FdStats& s, double analytic, double fd, const std::string& where) {
  const double e = rel_err(analytic, fd);
  ++s.entries;
  if (!(e <= 1e-5)) ++s.failures;
  if (!(e <= s.worst)) {
    s.worst = e;
    s.worst_where = where;
  }
}

void check_point(const Network& net, const std::vector<OperatingPoint>& library,
                 const OperatingPoint& x0, FdStats& obj, FdStats& jac) {
  const VariableLayout L(net);
  const double h = 1e-6;
  std::vector<double> x = L.pack(x0);

  const ResidualJacobians J = jacobians(x0, net);
  const Eigen::MatrixXd je(J.equalities);
  const Eigen::MatrixXd ji(J.inequalities);
  for (std::size_t c = 0; c < x.size(); ++c) {
    const double keep = x[c];
    x[c] = keep + h;
    const ResidualReport up = residuals(L.unpack(x), net);
    x[c] = keep - h;
    const ResidualReport dn = residuals(L.unpack(x), net);
    x[c] = keep;
    for (std::size_t r = 0; r < up.equalities.size(); ++r) {
      record(jac, je(r, c), (up.equalities[r] - dn.equalities[r]) / (2 * h),
             "eq row " + std::to_string(r));
    }
    for (std::size_t r = 0; r < up.inequalities.size(); ++r) {
      record(jac, ji(r, c), (up.inequalities[r] - dn.inequalities[r]) / (2 * h),
             "ineq row " + std::to_string(r));
    }
  }

  for (const ObjectiveSpec& spec : ObjectiveCatalog::builtin().entries()) {
    const BoundObjective f(spec, L, library);
    std::vector<double> g(x.size());
    f(x, g);
    std::vector<double> fd(x.size(), 0.0);
    std::vector<bool> kink(x.size(), false);
    std::vector<double> noise(x.size(), 0.0);
    // Each (library point, group) term T(m(x)) is differenced through the
    // chain rule: m in x, then the scalar T in m. Differencing T(m(x))
    // directly loses every digit near the exp cap, where T is ~1e21.
    for (const OperatingPoint& y : library) {
      const std::vector<double> yf = L.pack(y);
      for (VariableGroup grp : spec.groups) {
        ObjectiveSpec term = spec;
        term.groups = {grp};
        term.transform = Transform::Identity;
        const BoundObjective raw(term, L, std::vector<OperatingPoint>{y});
        std::vector<double> dm(x.size());
        const double m = raw(x, dm);
        const double hm = m > 0.0 ? h * m : h;
        const double outer = (transform(spec.transform, m + hm) -
                              transform(spec.transform, m - hm)) / (2 * hm);
        const auto [lo, len] = group_range(L, grp);
        for (std::size_t c = lo; c < lo + len; ++c) {
          const double keep = x[c];
          x[c] = keep + h;
          const double up = raw(x, {});
          x[c] = keep - h;
          const double dn = raw(x, {});
          x[c] = keep;
          fd[c] += outer * (up - dn) / (2 * h);
          noise[c] += std::abs(outer) * resolution(spec.metric, m, x[c] - yf[c], h);
          if (straddles_kink(spec, x, yf, lo, len, c, m, dm[c], h)) kink[c] = true;
        }
      }
    }
    for (std::size_t c = 0; c < x.size(); ++c) {
      if (kink[c]) {
        ++obj.excluded;
        continue;
      }
      if (noise[c] > 1e-6 * std::max({1.0, std::abs(g[c]), std::abs(fd[c])})) {
        ++obj.unresolved;
        continue;
      }
      record(obj, g[c], fd[c], spec.id + " coordinate " + std::to_string(c));
    }
  }
}

// 100 feasible points drawn at random from an exhaustive set; the
// repelling library is three non-seed points of a collected library.
struct BatteryInput {
  std::string case_path;
  std::string exhaustive;
  std::string library;
};

Outcome gradient_battery(const std::vector<BatteryInput>& inputs) {
  FdStats obj, jac;
  std::string detail;
  bool enough = true;
  std::mt19937_64 rng(7);
  for (const BatteryInput& in : inputs) {
    const ExhaustiveSet xe = exhaustive_from_jsonl(read_file(in.exhaustive));
    const SolutionLibrary lib = library_from_jsonl(read_file(in.library));
    const Network net = load_case_file(in.case_path);
    if (xe.points.size() < 100 || lib.size() < 4) {
      enough = false;
      continue;
    }
    std::vector<std::size_t> idx(xe.points.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    const std::vector<OperatingPoint> gamma(lib.points.begin() + 1, lib.points.begin() + 4);
    for (std::size_t k = 0; k < 100; ++k) {
      const OperatingPoint& x = xe.points[idx[k]];
      if (!(residuals(x, net).max_violation <= 1e-6)) enough = false;
      check_point(net, gamma, x, obj, jac);
    }
  }
  detail = "objectives " + std::to_string(obj.entries - obj.failures) + "/" +
           std::to_string(obj.entries) + " (worst " + fmt(obj.worst) + " at " +
           obj.worst_where + "; " + std::to_string(obj.excluded) +
           " entries at non-differentiable points and " +
           std::to_string(obj.unresolved) +
           " below the difference quotient's resolution skipped), jacobians " + std::to_string(jac.entries - jac.failures) +
           "/" + std::to_string(jac.entries) + " (worst " + fmt(jac.worst) + ")";
  if (!enough) detail += "; fewer than 100 feasible points available";
  return {enough && obj.failures == 0 && jac.failures == 0, detail};
}

// ---- 3 ----------------------------------------------------------------

Outcome feasibility_sweep(Work& w, const std::string& case_path, const std::string& tag,
                          double& seconds) {
  const auto t0 = Clock::now();
  CollectRequest req;
  req.case_path = case_path;
  req.config.objective_id = "f36";
  req.config.n = 50;
  req.out_dir = w.out("c3-" + tag);
  const RunResult r = w.keep(run_collect(req));
  seconds = seconds_since(t0);
  const Network net = load_case_file(case_path);
  const SolutionLibrary lib =
      library_from_jsonl(read_file(req.out_dir + "/f36.library.jsonl"));
  double worst = 0.0;
  for (const OperatingPoint& x : lib.points) {
    worst = std::max(worst, residuals(x, net).max_violation);
  }
  if (tag == "case3") w.case3_libraries.push_back(req.out_dir + "/f36.library.jsonl");
  const bool ok = lib.size() == 50 && worst <= 1e-6 && seconds < 300.0;
  return {ok, tag + ": " + std::to_string(lib.size()) + " points, max violation " +
                  fmt(worst) + ", " + fmt(seconds) + " s"};
}

// ---- 4 ----------------------------------------------------------------

Outcome partition_correctness(Work& w) {
  const auto t0 = Clock::now();
  ExhaustRequest req;
  req.case_path = kCase3;
  req.config.m = 3;
  req.config.t = 5;
  req.config.threads = std::max(1u, std::thread::hardware_concurrency());
  req.out_dir = w.out("c4");
  w.keep(run_exhaust(req));
  const double seconds = seconds_since(t0);
  w.xe3_path = req.out_dir + "/exhaustive.set.jsonl";

  const Network net = load_case_file(kCase3);
  const std::size_t n = net.generator_buses().size();
  const auto boxes = partition(net, 3);
  const ExhaustiveSet xe = exhaustive_from_jsonl(read_file(w.xe3_path));
  bool count_ok = boxes.size() == static_cast<std::size_t>(std::pow(3, n)) &&
                  xe.records.size() == boxes.size();

  double worst_width = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const Bus& b = net.buses[boxes[0].buses[k]];
    double width = 0.0;
    for (std::size_t d = 0; d < 3; ++d) {
      const auto it = std::find_if(boxes.begin(), boxes.end(),
                                   [&](const VoltageBox& v) { return v.digits[k] == d; });
      width += it->hi[k] - it->lo[k];
    }
    worst_width = std::max(worst_width, std::abs(width - (b.v_max - b.v_min)));
  }
  std::size_t inside = 0;
  for (std::size_t i = 0; i < xe.points.size(); ++i) {
    inside += boxes.at(xe.partition_of[i]).contains(xe.points[i], 0.0);
  }
  const bool ok = count_ok && worst_width <= 1e-12 && inside == xe.points.size() &&
                  !xe.points.empty() && seconds < 600.0;
  return {ok, std::to_string(boxes.size()) + " partitions for |G| = " + std::to_string(n) +
                  ", width error " + fmt(worst_width) + ", " + std::to_string(inside) + "/" +
                  std::to_string(xe.points.size()) + " points inside their box, " +
                  fmt(seconds) + " s"};
}

// ---- 5 ----------------------------------------------------------------

Outcome directed_monotonicity(Work& w) {
  for (const std::string& id : kLogFamily) {
    if (id == "f36") continue;
    CollectRequest req;
    req.case_path = kCase3;
    req.config.objective_id = id;
    req.config.n = 50;
    req.out_dir = w.out("c5");
    w.keep(run_collect(req));
    w.case3_libraries.push_back(req.out_dir + "/" + id + ".library.jsonl");
  }
  const Network net = load_case_file(kCase3);
  const ExhaustiveSet xe = exhaustive_from_jsonl(read_file(w.xe3_path));
  const NormKind norms[] = {NormKind::P,  NormKind::Q,  NormKind::V,     NormKind::Theta,
                            NormKind::PQ, NormKind::PV, NormKind::VTheta};
  std::size_t curves = 0, monotone = 0, steps = 0;
  for (const std::string& path : w.case3_libraries) {
    const SolutionLibrary lib = library_from_jsonl(read_file(path));
    for (InjectionSet inj : {InjectionSet::Generators, InjectionSet::AllBuses}) {
      for (NormKind k : norms) {
        const Progression p = progression(project(lib.points, k, inj, net),
                                          project(xe.points, k, inj, net));
        bool ok = true;
        for (std::size_t i = 1; i < p.directed.size(); ++i) {
          ok = ok && p.directed[i] <= p.directed[i - 1];
          ++steps;
        }
        ++curves;
        monotone += ok;
      }
    }
  }
  return {curves > 0 && monotone == curves,
          std::to_string(monotone) + "/" + std::to_string(curves) +
              " curves non-increasing over " + std::to_string(w.case3_libraries.size()) +
              " libraries (" + std::to_string(steps) + " steps)"};
}

// ---- 6 ----------------------------------------------------------------

Outcome log_versus_exp(Work& w, std::string& xe5_path, std::string& f36_case5) {
  const auto t0 = Clock::now();
  ExhaustRequest ex;
  ex.case_path = kCase5;
  ex.config.m = 4;
  ex.config.t = 20;
  ex.config.threads = std::max(1u, std::thread::hardware_concurrency());
  ex.out_dir = w.out("c6");
  const RunResult er = w.keep(run_exhaust(ex));
  xe5_path = ex.out_dir + "/exhaustive.set.jsonl";
  const ExhaustiveSet xe = exhaustive_from_jsonl(read_file(xe5_path));

  std::vector<std::string> ids = kLogFamily;
  for (const ObjectiveSpec& s : ObjectiveCatalog::builtin().entries()) {
    if (s.exp_family()) ids.push_back(s.id);
  }
  CompareRequest cmp;
  cmp.exhaustive = xe5_path;
  cmp.norms = {NormKind::PQ};
  cmp.case_path = kCase5;
  cmp.out_dir = ex.out_dir;
  for (const std::string& id : ids) {
    CollectRequest req;
    req.case_path = kCase5;
    req.config.objective_id = id;
    req.config.n = 100;
    req.out_dir = ex.out_dir;
    w.keep(run_collect(req));
    cmp.libraries.push_back(req.out_dir + "/" + id + ".library.jsonl");
  }
  f36_case5 = ex.out_dir + "/f36.library.jsonl";
  w.keep(run_compare(cmp));
  const double seconds = seconds_since(t0);

  const DistanceTable table =
      distance_table_from_csv(read_file(ex.out_dir + "/compare.distances.csv"));
  auto value = [&](const std::string& id) {
    for (const DistanceRow& r : table) {
      if (r.objective == id) return r.value;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };
  double best_exp = std::numeric_limits<double>::infinity();
  std::string best_exp_id = "none";
  std::size_t completed = 0, dnf = 0;
  for (std::size_t i = kLogFamily.size(); i < ids.size(); ++i) {
    const double v = value(ids[i]);
    if (std::isnan(v)) {
      ++dnf;
      continue;
    }
    ++completed;
    if (v < best_exp) {
      best_exp = v;
      best_exp_id = ids[i];
    }
  }
  std::size_t below = 0;
  std::ostringstream logs;
  for (const std::string& id : kLogFamily) {
    const double v = value(id);
    below += !std::isnan(v) && v < best_exp;
    logs << " " << id << "=" << (std::isnan(v) ? std::string("DNF") : fmt(v, 4));
  }
  const bool ok = below >= 4 && seconds < 1800.0;
  return {ok, std::to_string(below) + "/5 log entries below every completing exp entry (" +
                  std::to_string(completed) + " completed, " + std::to_string(dnf) +
                  " DNF; best exp " + best_exp_id + "=" + fmt(best_exp, 4) + ");" +
                  logs.str() + "; feasible partitions " + fmt(xe.feasible_fraction()) +
                  ", " + fmt(seconds) + " s"};
}

// ---- 7 ----------------------------------------------------------------

Outcome scoring(Work& w) {
  const double dnf = std::numeric_limits<double>::quiet_NaN();
  DistanceTable a, b;
  const double pq[] = {0.10, 0.20, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 1.00, dnf};
  for (int k = 1; k <= 12; ++k) {
    const std::string id = (k < 10 ? "a0" : "a") + std::to_string(k);
    a.push_back({id, "A", NormKind::PQ, pq[k - 1]});
    a.push_back({id, "A", NormKind::PV, 0.05 * (13 - k)});
  }
  b.push_back({"a05", "B", NormKind::PQ, 0.2});
  b.push_back({"a01", "B", NormKind::PQ, 0.3});
  const fs::path dir = w.out("c7");
  write_file_atomic((dir / "A.distances.csv").string(), distance_table_csv(a));
  write_file_atomic((dir / "B.distances.csv").string(), distance_table_csv(b));

  ScoreRequest req;
  req.tables = {(dir / "A.distances.csv").string(), (dir / "B.distances.csv").string()};
  req.out_dir = dir.string();
  w.keep(run_score(req));

  // Worked by hand. PQ in A ranks a01 first, a02 and a03 tie for second
  // (9 each) and a04 is fourth (7); a11 is eleventh and a12 is DNF. B adds
  // 10 to a05 and 9 to a01. PV in A ranks a12 first down to a03 tenth.
  const std::string expected =
      "Func,PQ score,Func,PV score,Func,Overall\n"
      "a01,19,a12,10,a01,19\n"
      "a05,16,a11,9,a05,19\n"
      "a02,9,a10,8,a03,10\n"
      "a03,9,a09,7,a12,10\n"
      "a04,7,a08,6,a02,9\n"
      "a06,5,a07,5,a04,9\n"
      "a07,4,a06,4,a06,9\n"
      "a08,3,a05,3,a07,9\n"
      "a09,2,a04,2,a08,9\n"
      "a10,1,a03,1,a09,9\n"
      "a11,0,a01,0,a10,9\n"
      "a12,0,a02,0,a11,9\n";
  const std::string got = read_file((dir / "score.scores.csv").string());
  if (got == expected) return {true, "12 objectives over 2 systems, tie and DNF rows, exact match"};
  return {false, "score table differs from the hand computation:\n" + got};
}

// ---- 8 ----------------------------------------------------------------

Outcome determinism(Work& w) {
  std::size_t files = 0, identical = 0;
  std::vector<std::string> diffs;
  for (std::size_t i = 0; i < w.manifests.size(); ++i) {
    const fs::path manifest(w.manifests[i]);
    const fs::path out = w.dir / "replay" / std::to_string(i);
    const RunResult r = replay(manifest.string(), out.string());
    for (const std::string& a : r.artifacts) {
      const fs::path original = manifest.parent_path() / fs::path(a).filename();
      ++files;
      if (read_file(a) == read_file(original.string())) {
        ++identical;
      } else {
        diffs.push_back(original.string());
      }
    }
  }
  std::string detail = std::to_string(identical) + "/" + std::to_string(files) +
                       " artifacts byte-identical across " +
                       std::to_string(w.manifests.size()) + " replayed manifests";
  for (const std::string& d : diffs) detail += "\n    differs: " + d;
  return {files > 0 && identical == files, detail};
}

}  // namespace

int main(int argc, char** argv) {
  Work w;
  w.dir = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "opfx-acceptance";
  fs::remove_all(w.dir);
  fs::create_directories(w.dir);

  std::vector<Outcome> results(9);
  auto run = [&](int k, const std::string& title, const std::function<Outcome()>& f) {
    const auto t0 = Clock::now();
    try {
      results[k] = f();
    } catch (const std::exception& e) {
      results[k] = {false, std::string("exception: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s - %s [%.1f s]\n", k, title.c_str(),
                results[k].pass ? "PASS" : "FAIL", results[k].detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  };

  run(1, "Hausdorff oracle", [&] {
    const auto t0 = Clock::now();
    Outcome o = hausdorff_oracle();
    const double s = seconds_since(t0);
    o.pass = o.pass && s < 10.0;
    o.detail += ", " + fmt(s) + " s";
    return o;
  });

  run(3, "feasibility sweep", [&] {
    double s3 = 0.0, s5 = 0.0;
    const Outcome a = feasibility_sweep(w, kCase3, "case3", s3);
    const Outcome b = feasibility_sweep(w, kCase5, "case5", s5);
    return Outcome{a.pass && b.pass, a.detail + "; " + b.detail};
  });

  run(4, "partition correctness", [&] { return partition_correctness(w); });

  run(5, "directed monotonicity", [&] { return directed_monotonicity(w); });

  std::string xe5, f36_case5;
  run(6, "log family versus exp family on case5", [&] {
    return log_versus_exp(w, xe5, f36_case5);
  });

  run(2, "gradient battery", [&] {
    const auto t0 = Clock::now();
    Outcome o = gradient_battery(
        {{kCase3, w.xe3_path, w.case3_libraries.front()}, {kCase5, xe5, f36_case5}});
    const double s = seconds_since(t0);
    o.pass = o.pass && s < 120.0;
    o.detail += ", " + fmt(s) + " s";
    return o;
  });

  run(7, "scoring scheme", [&] { return scoring(w); });

  run(8, "determinism", [&] { return determinism(w); });

  bool all = true;
  for (int k = 1; k <= 8; ++k) all = all && results[k].pass;
  std::printf("acceptance: %s\n", all ? "all criteria pass" : "some criteria fail");
  return all ? 0 : 1;
}

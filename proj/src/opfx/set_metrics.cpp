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

#include "opfx/set_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "opfx/io.hpp"

namespace opfx {

std::string to_string(NormKind k) {
  switch (k) {
    case NormKind::P: return "P";
    case NormKind::Q: return "Q";
    case NormKind::V: return "V";
    case NormKind::Theta: return "Theta";
    case NormKind::PQ: return "PQ";
    case NormKind::PV: return "PV";
    case NormKind::VTheta: return "VTheta";
  }
  return "PQ";
}

NormKind norm_from_string(const std::string& s) {
  for (NormKind k : {NormKind::P, NormKind::Q, NormKind::V, NormKind::Theta,
                     NormKind::PQ, NormKind::PV, NormKind::VTheta}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown norm '" + s + "'");
}

std::string to_string(InjectionSet s) {
  return s == InjectionSet::AllBuses ? "all-buses" : "generators";
}

InjectionSet injection_set_from_string(const std::string& s) {
  if (s == "generators") return InjectionSet::Generators;
  if (s == "all-buses") return InjectionSet::AllBuses;
  throw std::invalid_argument("unknown injection set '" + s + "'");
}

PointSet project(const std::vector<OperatingPoint>& points, NormKind kind,
                 InjectionSet set, const Network& net) {
  const bool need_p = kind == NormKind::P || kind == NormKind::PQ ||
                      kind == NormKind::PV;
  const bool need_q = kind == NormKind::Q || kind == NormKind::PQ;
  const bool need_v = kind == NormKind::V || kind == NormKind::PV ||
                      kind == NormKind::VTheta;
  const bool need_t = kind == NormKind::Theta || kind == NormKind::VTheta;
  const bool buses = set == InjectionSet::AllBuses && (need_p || need_q);
  AdmittanceStructure y;
  if (buses) y = build_admittance(net);

  PointSet out;
  out.reserve(points.size());
  for (const OperatingPoint& x : points) {
    std::vector<double> row;
    const std::vector<double>* p = &x.p_gen;
    const std::vector<double>* q = &x.q_gen;
    Injections inj;
    if (buses) {
      inj = injections(x, y);
      p = &inj.p;
      q = &inj.q;
    }
    if (need_p) row.insert(row.end(), p->begin(), p->end());
    if (need_q) row.insert(row.end(), q->begin(), q->end());
    if (need_v) row.insert(row.end(), x.v.begin(), x.v.end());
    if (need_t) row.insert(row.end(), x.theta.begin(), x.theta.end());
    out.push_back(std::move(row));
  }
  return out;
}

namespace {

void check_sets(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("Hausdorff distance of an empty set");
  }
  const std::size_t dim = a.front().size();
  for (const PointSet* s : {&a, &b}) {
    for (const auto& x : *s) {
      if (x.size() != dim) {
        throw std::invalid_argument("point sets differ in dimension");
      }
    }
  }
}

double squared_distance(const std::vector<double>& x,
                        const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    s += d * d;
  }
  return s;
}

}  // namespace

double directed_hausdorff(const PointSet& a, const PointSet& b) {
  check_sets(a, b);
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::min(best, squared_distance(x, y));
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double directed_hausdorff_early_break(const PointSet& a, const PointSet& b) {
  check_sets(a, b);
  double worst = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) {
      best = std::min(best, squared_distance(x, y));
      // x cannot raise the maximum any more.
      if (best <= worst) break;
    }
    worst = std::max(worst, best);
  }
  return std::sqrt(worst);
}

double hausdorff(const PointSet& a, const PointSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

Progression progression(const PointSet& library, const PointSet& xe) {
  check_sets(library, xe);
  Progression out;
  std::vector<double> to_lib(xe.size(), std::numeric_limits<double>::infinity());
  double lib_side = 0.0;
  for (const auto& s : library) {
    double best = std::numeric_limits<double>::infinity();
    double xe_side = 0.0;
    for (std::size_t j = 0; j < xe.size(); ++j) {
      const double d = squared_distance(s, xe[j]);
      best = std::min(best, d);
      to_lib[j] = std::min(to_lib[j], d);
      xe_side = std::max(xe_side, to_lib[j]);
    }
    lib_side = std::max(lib_side, best);
    out.directed.push_back(std::sqrt(xe_side));
    out.hausdorff.push_back(std::max(std::sqrt(lib_side), std::sqrt(xe_side)));
  }
  return out;
}

Best pick_best(const DistanceTable& table, const std::string& system,
               NormKind norm) {
  const DistanceRow* best = nullptr;
  for (const DistanceRow& r : table) {
    if (r.system != system || r.norm != norm || !std::isfinite(r.value)) continue;
    if (!best || r.value < best->value ||
        (r.value == best->value && r.objective < best->objective)) {
      best = &r;
    }
  }
  if (!best) throw std::invalid_argument("no finite distance in the slice");
  return {best->objective, best->value};
}

std::vector<ScoreRow> score(const DistanceTable& table) {
  std::map<std::string, ScoreRow> rows;
  std::map<std::pair<std::string, NormKind>, std::vector<const DistanceRow*>>
      slices;
  for (const DistanceRow& r : table) {
    rows[r.objective].objective = r.objective;
    if (r.norm != NormKind::PQ && r.norm != NormKind::PV) continue;
    if (!std::isfinite(r.value)) continue;
    slices[{r.system, r.norm}].push_back(&r);
  }
  for (auto& [key, slice] : slices) {
    std::sort(slice.begin(), slice.end(),
              [](const DistanceRow* a, const DistanceRow* b) {
                if (a->value != b->value) return a->value < b->value;
                return a->objective < b->objective;
              });
    std::size_t rank = 1;
    for (std::size_t i = 0; i < slice.size(); ++i) {
      if (i > 0 && slice[i]->value != slice[i - 1]->value) rank = i + 1;
      if (rank > 10) break;
      const int pts = static_cast<int>(11 - rank);
      ScoreRow& s = rows[slice[i]->objective];
      (key.second == NormKind::PQ ? s.pq : s.pv) += pts;
    }
  }
  std::vector<ScoreRow> out;
  for (auto& [id, r] : rows) out.push_back(r);
  return out;
}

std::string score_table_csv(const std::vector<ScoreRow>& rows) {
  auto ranked = [&](auto points) {
    std::vector<const ScoreRow*> v;
    for (const ScoreRow& r : rows) v.push_back(&r);
    std::stable_sort(v.begin(), v.end(), [&](const ScoreRow* a, const ScoreRow* b) {
      if (points(*a) != points(*b)) return points(*a) > points(*b);
      return a->objective < b->objective;
    });
    return v;
  };
  const auto pq = ranked([](const ScoreRow& r) { return r.pq; });
  const auto pv = ranked([](const ScoreRow& r) { return r.pv; });
  const auto all = ranked([](const ScoreRow& r) { return r.overall(); });
  std::ostringstream os;
  os << "Func,PQ score,Func,PV score,Func,Overall\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << pq[i]->objective << ',' << pq[i]->pq << ',' << pv[i]->objective << ','
       << pv[i]->pv << ',' << all[i]->objective << ',' << all[i]->overall()
       << '\n';
  }
  return os.str();
}

std::string distance_table_csv(const DistanceTable& table) {
  std::ostringstream os;
  os << "objective,system,norm,value\n";
  for (const DistanceRow& r : table) {
    os << r.objective << ',' << r.system << ',' << to_string(r.norm) << ','
       << (std::isnan(r.value) ? std::string("DNF") : format_double(r.value))
       << '\n';
  }
  return os.str();
}

DistanceTable distance_table_from_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  DistanceTable t;
  if (!std::getline(is, line) || line != "objective,system,norm,value") {
    throw FormatError("distance table: missing header");
  }
  std::size_t n = 1;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 4) {
      throw FormatError("distance table line " + std::to_string(n) +
                        ": expected 4 fields");
    }
    DistanceRow r;
    r.objective = f[0];
    r.system = f[1];
    try {
      r.norm = norm_from_string(f[2]);
    } catch (const std::invalid_argument& e) {
      throw FormatError("distance table line " + std::to_string(n) + ": " +
                        e.what());
    }
    r.value = f[3] == "DNF" ? std::numeric_limits<double>::quiet_NaN()
                            : parse_double(f[3]);
    t.push_back(std::move(r));
  }
  return t;
}

std::string progression_csv(const Progression& p) {
  std::ostringstream os;
  os << "iteration,H,H_directed\n";
  for (std::size_t i = 0; i < p.hausdorff.size(); ++i) {
    os << (i + 1) << ',' << format_double(p.hausdorff[i]) << ','
       << format_double(p.directed[i]) << '\n';
  }
  return os.str();
}

}  // namespace opfx

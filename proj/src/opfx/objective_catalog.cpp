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

#include "opfx/objective_catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <json.hpp>

namespace opfx {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr VariableGroup kCanonical[] = {VariableGroup::P, VariableGroup::Q,
                                        VariableGroup::V, VariableGroup::Theta};

template <typename E, std::size_t N>
E parse_enum(const std::string& s, const E (&values)[N], const char* what) {
  for (E v : values) {
    if (to_string(v) == s) return v;
  }
  throw CatalogError(std::string("unknown ") + what + " '" + s + "'");
}

constexpr Metric kMetrics[] = {
    Metric::SquaredEuclidean, Metric::Euclidean,
    Metric::Manhattan,        Metric::CubedDifference,
    Metric::SquaredAbsDifference, Metric::MaxDifference,
    Metric::Cosine};
constexpr Transform kTransforms[] = {Transform::Identity, Transform::Ln,
                                     Transform::Log10,    Transform::Log2,
                                     Transform::Exp,      Transform::Exp10,
                                     Transform::Exp2};

struct Transformed {
  double value;
  double slope;
};

Transformed apply(Transform t, double m) {
  auto log_base = [m](double inv_ln_base) {
    if (m > kLogGuard) return Transformed{std::log(m) * inv_ln_base, inv_ln_base / m};
    return Transformed{std::log(kLogGuard) * inv_ln_base, 0.0};
  };
  auto exp_base = [m](double ln_base) {
    const double a = m * ln_base;
    if (a < kExpCap) {
      const double v = std::exp(a);
      return Transformed{v, v * ln_base};
    }
    return Transformed{std::exp(kExpCap), 0.0};
  };
  switch (t) {
    case Transform::Identity: return {m, 1.0};
    case Transform::Ln: return log_base(1.0);
    case Transform::Log10: return log_base(1.0 / std::numbers::ln10);
    case Transform::Log2: return log_base(1.0 / std::numbers::ln2);
    case Transform::Exp: return exp_base(1.0);
    case Transform::Exp10: return exp_base(std::numbers::ln10);
    case Transform::Exp2: return exp_base(std::numbers::ln2);
  }
  return {m, 1.0};
}

double sign(double a) { return a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0); }

// Metric over x[0..n) and y[0..n). When g is non-null it receives dm/dx.
double metric(Metric kind, const double* x, const double* y, std::size_t n,
              double* g) {
  switch (kind) {
    case Metric::SquaredEuclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
        if (g) g[i] = 2.0 * d;
      }
      return s;
    }
    case Metric::Euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
      }
      const double r = std::sqrt(s);
      if (g) {
        for (std::size_t i = 0; i < n; ++i) g[i] = r > 0 ? (x[i] - y[i]) / r : 0.0;
      }
      return r;
    }
    case Metric::Manhattan: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += std::abs(d);
        if (g) g[i] = sign(d);
      }
      return s;
    }
    case Metric::CubedDifference: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - y[i];
        s += std::abs(d) * d * d;
        if (g) g[i] = 3.0 * d * std::abs(d);
      }
      return s;
    }
    case Metric::SquaredAbsDifference: {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] * x[i] - y[i] * y[i];
        s += std::abs(d);
        if (g) g[i] = 2.0 * x[i] * sign(d);
      }
      return s;
    }
    case Metric::MaxDifference: {
      double best = 0.0;
      std::size_t arg = n;
      for (std::size_t i = 0; i < n; ++i) {
        const double a = std::abs(x[i] - y[i]);
        if (arg == n || a > best) {
          best = a;
          arg = i;
        }
      }
      if (g) {
        std::fill(g, g + n, 0.0);
        if (arg < n) g[arg] = sign(x[arg] - y[arg]);
      }
      return best;
    }
    case Metric::Cosine: {
      double xy = 0.0, xx = 0.0, yy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        xy += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
      }
      const double nx = std::sqrt(xx), ny = std::sqrt(yy);
      if (nx <= 0.0 || ny <= 0.0) {
        if (g) std::fill(g, g + n, 0.0);
        return 1.0;
      }
      const double c = xy / (nx * ny);
      if (g) {
        for (std::size_t i = 0; i < n; ++i) {
          g[i] = -(y[i] / (nx * ny) - c * x[i] / xx);
        }
      }
      return 1.0 - c;
    }
  }
  return 0.0;
}

void canonicalise(ObjectiveSpec& spec) {
  std::vector<VariableGroup> out;
  for (VariableGroup g : kCanonical) {
    const auto c = std::count(spec.groups.begin(), spec.groups.end(), g);
    if (c > 1) {
      throw CatalogError("objective '" + spec.id + "' repeats group " +
                         to_string(g));
    }
    if (c == 1) out.push_back(g);
  }
  spec.groups = std::move(out);
}

ordered_json spec_to_json(const ObjectiveSpec& s) {
  ordered_json j;
  j["id"] = s.id;
  j["metric"] = to_string(s.metric);
  j["transform"] = to_string(s.transform);
  ordered_json groups = ordered_json::array();
  for (VariableGroup g : s.groups) groups.push_back(to_string(g));
  j["groups"] = groups;
  j["note"] = s.note;
  return j;
}

}  // namespace

std::string to_string(Metric m) {
  switch (m) {
    case Metric::SquaredEuclidean: return "squared_euclidean";
    case Metric::Euclidean: return "euclidean";
    case Metric::Manhattan: return "manhattan";
    case Metric::CubedDifference: return "cubed_difference";
    case Metric::SquaredAbsDifference: return "squared_abs_difference";
    case Metric::MaxDifference: return "max_difference";
    case Metric::Cosine: return "cosine";
  }
  return "?";
}

std::string to_string(Transform t) {
  switch (t) {
    case Transform::Identity: return "identity";
    case Transform::Ln: return "ln";
    case Transform::Log10: return "log10";
    case Transform::Log2: return "log2";
    case Transform::Exp: return "exp";
    case Transform::Exp10: return "exp10";
    case Transform::Exp2: return "exp2";
  }
  return "?";
}

std::string to_string(VariableGroup g) {
  switch (g) {
    case VariableGroup::P: return "P";
    case VariableGroup::Q: return "Q";
    case VariableGroup::V: return "V";
    case VariableGroup::Theta: return "Theta";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  return parse_enum(s, kMetrics, "metric");
}
Transform transform_from_string(const std::string& s) {
  return parse_enum(s, kTransforms, "transform");
}
VariableGroup group_from_string(const std::string& s) {
  return parse_enum(s, kCanonical, "variable group");
}

ObjectiveCatalog::ObjectiveCatalog() {
  using M = Metric;
  using T = Transform;
  using G = VariableGroup;
  const std::vector<G> pq{G::P, G::Q};
  const std::vector<G> pqv{G::P, G::Q, G::V};
  const std::vector<G> all{G::P, G::Q, G::V, G::Theta};
  const std::vector<G> v{G::V};
  const std::vector<G> vt{G::V, G::Theta};

  register_spec({"f03", M::SquaredEuclidean, T::Ln, pq,
                 "exhaustive-sampling objective"});
  register_spec({"f18", M::Euclidean, T::Log10, pq, ""});
  register_spec({"f34", M::Euclidean, T::Log2, vt, ""});
  register_spec({"f36", M::Euclidean, T::Ln, all, ""});
  register_spec({"f37", M::Euclidean, T::Ln, pqv, ""});
  register_spec({"f38", M::Manhattan, T::Ln, pqv, ""});

  // Generated entries: metric x transform x group combinations.
  struct Gen {
    M metric;
    T transform;
    std::vector<G> groups;
  };
  const std::vector<Gen> generated{
      {M::SquaredEuclidean, T::Identity, pq},
      {M::SquaredEuclidean, T::Log10, pq},
      {M::SquaredEuclidean, T::Log2, pq},
      {M::SquaredEuclidean, T::Exp, pq},
      {M::SquaredEuclidean, T::Exp10, pq},
      {M::CubedDifference, T::Identity, pq},
      {M::CubedDifference, T::Exp, pq},
      {M::Manhattan, T::Ln, pq},
      {M::Manhattan, T::Exp, pq},
      {M::SquaredAbsDifference, T::Identity, pq},
      {M::SquaredAbsDifference, T::Ln, pq},
      {M::SquaredAbsDifference, T::Log10, pq},
      {M::SquaredAbsDifference, T::Exp, pq},
      {M::SquaredAbsDifference, T::Exp10, pq},
      {M::Euclidean, T::Identity, pq},
      {M::Euclidean, T::Ln, pq},
      {M::Euclidean, T::Log2, pq},
      {M::Euclidean, T::Exp, pq},
      {M::Euclidean, T::Exp10, pq},
      {M::Euclidean, T::Exp2, pq},
      {M::Cosine, T::Identity, pq},
      {M::MaxDifference, T::Ln, pq},
      {M::Euclidean, T::Identity, v},
      {M::Euclidean, T::Ln, v},
      {M::Euclidean, T::Log10, v},
      {M::Euclidean, T::Log2, v},
      {M::Euclidean, T::Exp, v},
      {M::Manhattan, T::Ln, v},
      {M::Manhattan, T::Log10, v},
      {M::Manhattan, T::Log2, v},
      {M::Euclidean, T::Ln, vt},
      {M::SquaredEuclidean, T::Exp, vt},
      {M::Euclidean, T::Ln, {G::Theta}},
      {M::Manhattan, T::Ln, all},
      {M::SquaredEuclidean, T::Ln, all},
  };
  for (std::size_t k = 0; k < generated.size(); ++k) {
    const std::string n = std::to_string(k + 1);
    const std::string id = (n.size() < 2 ? "g0" : "g") + n;
    register_spec({id, generated[k].metric, generated[k].transform,
                   generated[k].groups, ""});
  }
}

const ObjectiveCatalog& ObjectiveCatalog::builtin() {
  static const ObjectiveCatalog catalog;
  return catalog;
}

const ObjectiveSpec* ObjectiveCatalog::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

const ObjectiveSpec& ObjectiveCatalog::at(const std::string& id) const {
  const ObjectiveSpec* s = find(id);
  if (s == nullptr) throw CatalogError("unknown objective id '" + id + "'");
  return *s;
}

std::string ObjectiveCatalog::register_spec(ObjectiveSpec spec) {
  if (spec.id.empty()) throw CatalogError("objective id must not be empty");
  if (index_.count(spec.id)) {
    throw CatalogError("duplicate objective id '" + spec.id + "'");
  }
  if (spec.groups.empty()) {
    throw CatalogError("objective '" + spec.id + "' has no variable group");
  }
  canonicalise(spec);
  index_.emplace(spec.id, entries_.size());
  entries_.push_back(std::move(spec));
  return entries_.back().id;
}

std::string ObjectiveCatalog::manifest_json() const {
  ordered_json j;
  j["format"] = "opfx-catalog";
  j["version"] = 1;
  j["guard"] = kLogGuard;
  j["exp_cap"] = kExpCap;
  ordered_json list = ordered_json::array();
  for (const auto& s : entries_) list.push_back(spec_to_json(s));
  j["objectives"] = list;
  return j.dump(2) + "\n";
}

ObjectiveCatalog ObjectiveCatalog::from_manifest_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("catalog manifest: ") + e.what());
  }
  if (j.value("format", "") != "opfx-catalog") {
    throw CatalogError("catalog manifest: wrong format tag");
  }
  ObjectiveCatalog cat{Empty{}};
  try {
    for (const auto& e : j.at("objectives")) {
      ObjectiveSpec s;
      s.id = e.at("id").get<std::string>();
      s.metric = metric_from_string(e.at("metric").get<std::string>());
      s.transform = transform_from_string(e.at("transform").get<std::string>());
      for (const auto& g : e.at("groups")) {
        s.groups.push_back(group_from_string(g.get<std::string>()));
      }
      s.note = e.value("note", "");
      cat.register_spec(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CatalogError(std::string("catalog manifest: ") + e.what());
  }
  return cat;
}

BoundObjective::BoundObjective(ObjectiveSpec spec, VariableLayout layout,
                               const std::vector<OperatingPoint>& library)
    : BoundObjective(std::move(spec), layout, [&] {
        std::vector<std::vector<double>> flat;
        flat.reserve(library.size());
        for (const auto& p : library) flat.push_back(layout.pack(p));
        return flat;
      }()) {}

BoundObjective::BoundObjective(ObjectiveSpec spec, VariableLayout layout,
                               std::vector<std::vector<double>> flat_library)
    : spec_(std::move(spec)), layout_(layout), lib_(std::move(flat_library)) {
  if (lib_.empty()) {
    throw std::invalid_argument("objective needs a non-empty library");
  }
  for (VariableGroup g : spec_.groups) {
    switch (g) {
      case VariableGroup::P:
        ranges_.push_back({layout_.p_gen(0), layout_.gens});
        break;
      case VariableGroup::Q:
        ranges_.push_back({layout_.q_gen(0), layout_.gens});
        break;
      case VariableGroup::V:
        ranges_.push_back({layout_.v(0), layout_.buses});
        break;
      case VariableGroup::Theta:
        ranges_.push_back({layout_.theta(0), layout_.buses});
        break;
    }
  }
}

double BoundObjective::operator()(std::span<const double> x,
                                  std::span<double> grad) const {
  const bool want = !grad.empty();
  if (want) std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<double> g;
  double total = 0.0;
  for (const auto& y : lib_) {
    double sub = 0.0;
    bool first = true;
    for (const Range& r : ranges_) {
      g.resize(r.length);
      const double m = metric(spec_.metric, x.data() + r.offset,
                              y.data() + r.offset, r.length,
                              want ? g.data() : nullptr);
      const Transformed t = apply(spec_.transform, m);
      // Left-to-right accumulation, the same order as writing the terms out.
      sub = first ? t.value : sub + t.value;
      first = false;
      if (want && t.slope != 0.0) {
        for (std::size_t i = 0; i < r.length; ++i) {
          grad[r.offset + i] += t.slope * g[i];
        }
      }
    }
    total += sub;
  }
  return total;
}

double evaluate(const ObjectiveSpec& spec, const OperatingPoint& x,
                const SolutionLibrary& lib) {
  const VariableLayout layout(x.v.size(), x.p_gen.size());
  BoundObjective f(spec, layout, lib.points);
  const std::vector<double> flat = layout.pack(x);
  return f(flat, {});
}

std::vector<double> gradient(const ObjectiveSpec& spec, const OperatingPoint& x,
                             const SolutionLibrary& lib) {
  const VariableLayout layout(x.v.size(), x.p_gen.size());
  BoundObjective f(spec, layout, lib.points);
  const std::vector<double> flat = layout.pack(x);
  std::vector<double> g(flat.size());
  f(flat, g);
  return g;
}

}  // namespace opfx

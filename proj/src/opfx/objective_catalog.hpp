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

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "opfx/acpf.hpp"
#include "opfx/solution_library.hpp"

namespace opfx {

// Per-group distance between the candidate x and one library point y, with
// d = x - y over the group's coordinates.
enum class Metric {
  SquaredEuclidean,      // sum d^2
  Euclidean,             // sqrt(sum d^2)
  Manhattan,             // sum |d|
  CubedDifference,       // sum |d|^3
  SquaredAbsDifference,  // sum |x^2 - y^2|
  MaxDifference,         // max |d|
  Cosine,                // 1 - <x, y> / (|x| |y|)
};

enum class Transform { Identity, Ln, Log10, Log2, Exp, Exp10, Exp2 };

// P and Q range over generators, V and Theta over buses.
enum class VariableGroup { P, Q, V, Theta };

std::string to_string(Metric m);
std::string to_string(Transform t);
std::string to_string(VariableGroup g);
Metric metric_from_string(const std::string& s);
Transform transform_from_string(const std::string& s);
VariableGroup group_from_string(const std::string& s);

inline constexpr double kLogGuard = 1e-12;
// exp-family values are capped at exp(kExpCap).
inline constexpr double kExpCap = 50.0;

struct ObjectiveSpec {
  std::string id;
  Metric metric = Metric::Euclidean;
  Transform transform = Transform::Identity;
  std::vector<VariableGroup> groups;  // canonical order P, Q, V, Theta
  std::string note;

  bool log_family() const {
    return transform == Transform::Ln || transform == Transform::Log10 ||
           transform == Transform::Log2;
  }
  bool exp_family() const {
    return transform == Transform::Exp || transform == Transform::Exp10 ||
           transform == Transform::Exp2;
  }
  bool operator==(const ObjectiveSpec&) const = default;
};

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ObjectiveCatalog {
 public:
  // The built-in entries.
  ObjectiveCatalog();

  static const ObjectiveCatalog& builtin();

  const std::vector<ObjectiveSpec>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  const ObjectiveSpec* find(const std::string& id) const;
  const ObjectiveSpec& at(const std::string& id) const;  // throws CatalogError

  // Throws CatalogError on a duplicate id, an empty id, no groups or a
  // repeated group. Groups are stored in canonical order.
  std::string register_spec(ObjectiveSpec spec);

  std::string manifest_json() const;
  static ObjectiveCatalog from_manifest_json(const std::string& text);

 private:
  struct Empty {};
  explicit ObjectiveCatalog(Empty) {}

  std::vector<ObjectiveSpec> entries_;
  std::map<std::string, std::size_t> index_;
};

// The library flattened once for repeated evaluation during a solve.
class BoundObjective {
 public:
  BoundObjective(ObjectiveSpec spec, VariableLayout layout,
                 const std::vector<OperatingPoint>& library);
  BoundObjective(ObjectiveSpec spec, VariableLayout layout,
                 std::vector<std::vector<double>> flat_library);

  // Value at the flat vector x; adds nothing to grad when it is empty,
  // otherwise overwrites it.
  double operator()(std::span<const double> x, std::span<double> grad) const;

  const ObjectiveSpec& spec() const { return spec_; }

 private:
  struct Range {
    std::size_t offset;
    std::size_t length;
  };

  ObjectiveSpec spec_;
  VariableLayout layout_;
  std::vector<std::vector<double>> lib_;
  std::vector<Range> ranges_;
};

double evaluate(const ObjectiveSpec& spec, const OperatingPoint& x,
                const SolutionLibrary& lib);
std::vector<double> gradient(const ObjectiveSpec& spec, const OperatingPoint& x,
                             const SolutionLibrary& lib);

}  // namespace opfx

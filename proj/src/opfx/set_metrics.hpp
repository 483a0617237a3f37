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
#include <string>
#include <vector>

#include "opfx/acpf.hpp"
#include "opfx/case_model.hpp"

namespace opfx {

// Coordinates compared by a norm. PQ stacks (p, q), PV stacks (p, v).
enum class NormKind { P, Q, V, Theta, PQ, PV, VTheta };

std::string to_string(NormKind k);
NormKind norm_from_string(const std::string& s);

// Which injections P and Q refer to: generator dispatch (default) or the
// nodal injections p_i(x), q_i(x) of every bus.
enum class InjectionSet { Generators, AllBuses };

std::string to_string(InjectionSet s);
InjectionSet injection_set_from_string(const std::string& s);

using PointSet = std::vector<std::vector<double>>;

// Projects operating points onto the coordinates of `kind`. The network is
// only consulted for InjectionSet::AllBuses.
PointSet project(const std::vector<OperatingPoint>& points, NormKind kind,
                 InjectionSet set, const Network& net);

// Exact max over a in A of min over b in B of ||a - b||_2. Throws
// std::invalid_argument on an empty set or mismatched dimensions.
double directed_hausdorff(const PointSet& a, const PointSet& b);
double hausdorff(const PointSet& a, const PointSet& b);

// Same value as directed_hausdorff, bit for bit, with the early-break
// inner loop.
double directed_hausdorff_early_break(const PointSet& a, const PointSet& b);

struct Progression {
  std::vector<double> hausdorff;  // H(S_1..i, Xe)
  std::vector<double> directed;   // H*(Xe -> S_1..i)
};

// One entry per prefix of `library`, computed incrementally.
Progression progression(const PointSet& library, const PointSet& xe);

struct DistanceRow {
  std::string objective;
  std::string system;
  NormKind norm = NormKind::PQ;
  double value = 0.0;  // NaN marks a DNF run

  bool operator==(const DistanceRow&) const = default;
};

using DistanceTable = std::vector<DistanceRow>;

struct Best {
  std::string objective;
  double value = 0.0;
};

// Minimum over the finite rows of one (system, norm) slice; ties go to the
// lexicographically smaller id. Throws std::invalid_argument when the
// slice has no finite row.
Best pick_best(const DistanceTable& table, const std::string& system,
               NormKind norm);

struct ScoreRow {
  std::string objective;
  int pq = 0;
  int pv = 0;
  int overall() const { return pq + pv; }
};

// Per system and norm, finite distances are ranked ascending with shared
// ranks for ties (1, 2, 2, 4, ...). Rank r <= 10 earns 11 - r points. Points
// are summed over systems. Rows are sorted by objective id.
std::vector<ScoreRow> score(const DistanceTable& table);

// Table layout Func | PQ score | Func | PV score | Func | Overall, each
// column pair sorted by descending points, then id.
std::string score_table_csv(const std::vector<ScoreRow>& rows);

std::string distance_table_csv(const DistanceTable& table);
DistanceTable distance_table_from_csv(const std::string& text);

std::string progression_csv(const Progression& p);

}  // namespace opfx

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

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "opfx/exhaustive_sampler.hpp"
#include "opfx/sequential_collector.hpp"
#include "opfx/solution_library.hpp"

namespace opfx {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest text that parses back to the same double; "nan", "inf", "-inf"
// for non-finite values.
std::string format_double(double v);
double parse_double(std::string_view s);

std::string read_file(const std::string& path);
// Writes through a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& data);

// FNV-1a 64 as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

std::vector<std::string> split_csv_line(std::string_view line);

// JSON-lines: a header object, then one object per point.
std::string library_to_jsonl(const SolutionLibrary& lib);
SolutionLibrary library_from_jsonl(const std::string& text);
// Columns sequence, objective, iteration, status, objective_value, then
// v*, theta*, pg*, qg* (1-based).
std::string library_to_csv(const SolutionLibrary& lib);

std::string exhaustive_to_jsonl(const ExhaustiveSet& xe);
ExhaustiveSet exhaustive_from_jsonl(const std::string& text);
// index, digits, probe_status, feasible, points, duplicates, stopped_early,
// solve_seconds.
std::string partition_report_csv(const ExhaustiveSet& xe);

std::string dnf_events_csv(const std::vector<DnfEvent>& events);

}  // namespace opfx

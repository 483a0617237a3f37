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
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace opfx {

enum class BusType { Load = 1, PV = 2, Reference = 3, Isolated = 4 };

// All electrical quantities are per-unit on Network::base_mva; angles in rad.
struct Bus {
  int id = 0;  // external bus number from the case file
  BusType type = BusType::Load;
  double p_load = 0.0;
  double q_load = 0.0;
  double g_shunt = 0.0;
  double b_shunt = 0.0;
  double v_min = 0.9;
  double v_max = 1.1;

  bool operator==(const Bus&) const = default;
};

struct Generator {
  std::size_t bus = 0;  // internal bus index
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;

  bool operator==(const Generator&) const = default;
};

struct Branch {
  std::size_t from = 0;  // internal bus indices
  std::size_t to = 0;
  double r = 0.0;
  double x = 0.0;
  double b_charging = 0.0;
  double tap = 1.0;
  double shift = 0.0;
  // 0 means no thermal limit.
  double s_max = 0.0;
  double angle_min = 0.0;
  double angle_max = 0.0;

  bool has_thermal_limit() const { return s_max > 0.0; }
  bool operator==(const Branch&) const = default;
};

struct Network {
  std::string name;
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Branch> branches;
  std::size_t slack_bus = 0;

  std::size_t bus_count() const { return buses.size(); }
  std::size_t generator_count() const { return generators.size(); }
  std::size_t branch_count() const { return branches.size(); }

  // Sorted, de-duplicated list of buses that host at least one generator.
  std::vector<std::size_t> generator_buses() const;

  bool operator==(const Network&) const = default;
};

class CaseParseError : public std::runtime_error {
 public:
  CaseParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class CaseReferenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The case file could not be read.
class CaseFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the matrix tables of a MATPOWER case (`mpc.baseMVA`, `mpc.bus`,
/// `mpc.gen`, `mpc.branch`). Other tables, including `mpc.gencost`, are
/// skipped. Out-of-service generators and branches are dropped.
///
/// Conversions: loads, shunts, generator limits and `rateA` are divided by
/// `baseMVA`; angles are converted to radians; a zero tap ratio becomes 1.
/// Missing angle-difference limits (absent columns, or both zero) become
/// +-pi/2. `rateA == 0` is kept as 0, meaning unconstrained.
///
/// Throws CaseParseError for malformed text and CaseReferenceError for
/// references to unknown buses or duplicate bus numbers.
Network parse_case(std::string_view text);
Network load_case_file(const std::string& path);

struct Violation {
  std::string element;  // "network", "bus", "generator" or "branch"
  std::size_t index = 0;
  std::string field;
  std::string message;
};

std::vector<Violation> validate(const Network& net);

// Two-port admittance of one branch (MATPOWER pi model with tap and shift).
struct BranchAdmittance {
  double g_ff = 0.0, b_ff = 0.0;
  double g_ft = 0.0, b_ft = 0.0;
  double g_tf = 0.0, b_tf = 0.0;
  double g_tt = 0.0, b_tt = 0.0;
};

class SingularBranchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

BranchAdmittance branch_admittance(const Branch& br);

struct AdmittanceEntry {
  std::size_t col = 0;
  double g = 0.0;
  double b = 0.0;
};

// Nodal admittance in row-compressed form. Row i lists every k in K_i
// (neighbours plus i itself), sorted by column.
struct AdmittanceStructure {
  std::vector<std::vector<AdmittanceEntry>> rows;
  std::vector<BranchAdmittance> branches;

  std::size_t size() const { return rows.size(); }
  double g(std::size_t i, std::size_t k) const;
  double b(std::size_t i, std::size_t k) const;
  std::vector<std::size_t> neighbors(std::size_t i) const;
};

AdmittanceStructure build_admittance(const Network& net);

// Canonical JSON document (fixed key order, shortest round-trip doubles).
std::string network_to_json(const Network& net);
Network network_from_json(std::string_view text);

// FNV-1a 64 of the canonical JSON, as 16 hex digits.
std::string network_hash(const Network& net);

}  // namespace opfx

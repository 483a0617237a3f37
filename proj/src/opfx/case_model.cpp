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

#include "opfx/case_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>

#include <json.hpp>

namespace opfx {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kDefaultAngleLimit = std::numbers::pi / 2.0;

struct Table {
  std::size_t first_line = 0;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
};

struct RawCase {
  std::optional<double> base_mva;
  std::size_t base_mva_line = 0;
  std::map<std::string, Table> tables;
  std::size_t last_line = 0;
};

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string_view strip_comment(std::string_view line) {
  // '%' starts a comment; string literals on the same line are not expected
  // inside numeric tables.
  auto pos = line.find('%');
  return pos == std::string_view::npos ? line : line.substr(0, pos);
}

double parse_number(std::string_view token, std::size_t line) {
  std::string buf(token);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str() || *end != '\0') {
    throw CaseParseError(line, "expected a number, got '" + buf + "'");
  }
  return v;
}

// Splits a row body on whitespace and commas and appends the numbers.
void parse_row_tokens(std::string_view body, std::size_t line,
                      std::vector<double>& row) {
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() &&
           (body[i] == ' ' || body[i] == '\t' || body[i] == ',' ||
            body[i] == '\r')) {
      ++i;
    }
    if (i >= body.size()) break;
    std::size_t j = i;
    while (j < body.size() && body[j] != ' ' && body[j] != '\t' &&
           body[j] != ',' && body[j] != '\r') {
      ++j;
    }
    row.push_back(parse_number(body.substr(i, j - i), line));
    i = j;
  }
}

RawCase scan(std::string_view text) {
  RawCase raw;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  Table* open = nullptr;
  std::string open_name;
  std::vector<double> pending;
  std::size_t pending_line = 0;

  auto flush_row = [&]() {
    if (!pending.empty()) {
      open->rows.push_back(std::move(pending));
      open->row_lines.push_back(pending_line);
      pending.clear();
    }
  };

  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                      : nl - pos);
    pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++line_no;
    std::string_view body = trim(strip_comment(line));

    if (open != nullptr) {
      // Inside a matrix: rows end at ';' or end of line; ']' closes.
      while (!body.empty()) {
        auto stop = body.find_first_of(";]");
        std::string_view chunk = body.substr(0, stop);
        if (!trim(chunk).empty()) {
          if (pending.empty()) pending_line = line_no;
          parse_row_tokens(chunk, line_no, pending);
        }
        if (stop == std::string_view::npos) {
          body = {};
          break;
        }
        char c = body[stop];
        body = trim(body.substr(stop + 1));
        flush_row();
        if (c == ']') {
          open = nullptr;
          if (!body.empty() && body != ";") {
            throw CaseParseError(line_no, "unexpected text after ']' in mpc." +
                                              open_name);
          }
          break;
        }
      }
      if (open != nullptr) flush_row();
      continue;
    }

    if (body.empty()) continue;
    if (!body.starts_with("mpc.")) continue;  // function header, etc.

    auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw CaseParseError(line_no, "expected '=' in assignment");
    }
    std::string name(trim(body.substr(4, eq - 4)));
    std::string_view rhs = trim(body.substr(eq + 1));

    if (name == "baseMVA") {
      if (rhs.ends_with(";")) rhs = trim(rhs.substr(0, rhs.size() - 1));
      raw.base_mva = parse_number(rhs, line_no);
      raw.base_mva_line = line_no;
      continue;
    }
    if (!rhs.starts_with("[")) continue;  // version strings, cell arrays
    if (raw.tables.contains(name)) {
      throw CaseParseError(line_no, "duplicate table mpc." + name);
    }
    Table& t = raw.tables[name];
    t.first_line = line_no;
    open = &t;
    open_name = name;
    // Rows may start on the same line as '['.
    std::string_view rest = rhs.substr(1);
    while (!rest.empty()) {
      auto stop = rest.find_first_of(";]");
      std::string_view chunk = rest.substr(0, stop);
      if (!trim(chunk).empty()) {
        if (pending.empty()) pending_line = line_no;
        parse_row_tokens(chunk, line_no, pending);
      }
      if (stop == std::string_view::npos) break;
      char c = rest[stop];
      rest = trim(rest.substr(stop + 1));
      flush_row();
      if (c == ']') {
        open = nullptr;
        break;
      }
    }
    if (open != nullptr) flush_row();
  }
  raw.last_line = line_no;
  if (open != nullptr) {
    throw CaseParseError(line_no, "unterminated matrix mpc." + open_name);
  }
  return raw;
}

const Table& require_table(const RawCase& raw, const std::string& name,
                           std::size_t min_cols) {
  auto it = raw.tables.find(name);
  if (it == raw.tables.end()) {
    throw CaseParseError(raw.last_line, "missing table mpc." + name);
  }
  const Table& t = it->second;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].size() < min_cols) {
      throw CaseParseError(t.row_lines[r],
                           "mpc." + name + " row has " +
                               std::to_string(t.rows[r].size()) +
                               " columns, expected at least " +
                               std::to_string(min_cols));
    }
  }
  return t;
}

int as_int(double v, std::size_t line, const char* what) {
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw CaseParseError(line, std::string(what) + " must be an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

std::vector<std::size_t> Network::generator_buses() const {
  std::vector<std::size_t> out;
  out.reserve(generators.size());
  for (const auto& g : generators) out.push_back(g.bus);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Network parse_case(std::string_view text) {
  RawCase raw = scan(text);
  if (!raw.base_mva) {
    throw CaseParseError(raw.last_line, "missing mpc.baseMVA");
  }
  Network net;
  net.base_mva = *raw.base_mva;
  const double base = net.base_mva;
  if (!(base > 0.0)) {
    throw CaseParseError(raw.base_mva_line, "baseMVA must be positive");
  }

  const Table& bus_t = require_table(raw, "bus", 13);
  const Table& gen_t = require_table(raw, "gen", 10);
  const Table& br_t = require_table(raw, "branch", 11);

  std::map<int, std::size_t> index_of;
  bool slack_found = false;
  for (std::size_t r = 0; r < bus_t.rows.size(); ++r) {
    const auto& row = bus_t.rows[r];
    const std::size_t line = bus_t.row_lines[r];
    Bus b;
    b.id = as_int(row[0], line, "bus number");
    int type = as_int(row[1], line, "bus type");
    if (type < 1 || type > 4) {
      throw CaseParseError(line, "bus type must be 1..4");
    }
    b.type = static_cast<BusType>(type);
    b.p_load = row[2] / base;
    b.q_load = row[3] / base;
    b.g_shunt = row[4] / base;
    b.b_shunt = row[5] / base;
    b.v_max = row[11];
    b.v_min = row[12];
    if (index_of.contains(b.id)) {
      throw CaseReferenceError("duplicate bus number " + std::to_string(b.id) +
                               " (line " + std::to_string(line) + ")");
    }
    index_of[b.id] = net.buses.size();
    if (b.type == BusType::Reference && !slack_found) {
      net.slack_bus = net.buses.size();
      slack_found = true;
    }
    net.buses.push_back(b);
  }

  auto lookup = [&](double id, std::size_t line, const char* what) {
    int n = as_int(id, line, what);
    auto it = index_of.find(n);
    if (it == index_of.end()) {
      throw CaseReferenceError(std::string(what) + " references unknown bus " +
                               std::to_string(n) + " (line " +
                               std::to_string(line) + ")");
    }
    return it->second;
  };

  for (std::size_t r = 0; r < gen_t.rows.size(); ++r) {
    const auto& row = gen_t.rows[r];
    const std::size_t line = gen_t.row_lines[r];
    Generator g;
    g.bus = lookup(row[0], line, "generator");
    if (row[7] <= 0.0) continue;
    g.q_max = row[3] / base;
    g.q_min = row[4] / base;
    g.p_max = row[8] / base;
    g.p_min = row[9] / base;
    net.generators.push_back(g);
  }

  for (std::size_t r = 0; r < br_t.rows.size(); ++r) {
    const auto& row = br_t.rows[r];
    const std::size_t line = br_t.row_lines[r];
    Branch br;
    br.from = lookup(row[0], line, "branch");
    br.to = lookup(row[1], line, "branch");
    if (row[10] <= 0.0) continue;
    br.r = row[2];
    br.x = row[3];
    br.b_charging = row[4];
    br.s_max = row[5] / base;
    br.tap = row[8] == 0.0 ? 1.0 : row[8];
    br.shift = row[9] * kDegToRad;
    br.angle_min = -kDefaultAngleLimit;
    br.angle_max = kDefaultAngleLimit;
    if (row.size() >= 13 && !(row[11] == 0.0 && row[12] == 0.0)) {
      br.angle_min = row[11] <= -360.0 ? -kDefaultAngleLimit
                                       : row[11] * kDegToRad;
      br.angle_max = row[12] >= 360.0 ? kDefaultAngleLimit
                                      : row[12] * kDegToRad;
    }
    net.branches.push_back(br);
  }
  return net;
}

Network load_case_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CaseFileError("cannot open case file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  Network net = parse_case(ss.str());
  auto slash = path.find_last_of("/\\");
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  if (base.ends_with(".m")) base.resize(base.size() - 2);
  net.name = base;
  return net;
}

std::vector<Violation> validate(const Network& net) {
  std::vector<Violation> out;
  auto add = [&](std::string element, std::size_t index, std::string field,
                 std::string message) {
    out.push_back({std::move(element), index, std::move(field),
                   std::move(message)});
  };

  if (!(net.base_mva > 0.0)) {
    add("network", 0, "base_mva", "base_mva must be positive");
  }
  std::size_t slack_count = 0;
  for (const auto& b : net.buses) {
    if (b.type == BusType::Reference) ++slack_count;
  }
  if (slack_count != 1) {
    add("network", 0, "slack_bus",
        "expected exactly one reference bus, found " +
            std::to_string(slack_count));
  } else if (net.slack_bus >= net.buses.size() ||
             net.buses[net.slack_bus].type != BusType::Reference) {
    add("network", 0, "slack_bus", "slack_bus does not point at the reference bus");
  }

  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const auto& b = net.buses[i];
    if (!(b.v_min > 0.0)) {
      add("bus", i, "v_min", "v_min must be positive (bus " +
                                 std::to_string(b.id) + ")");
    }
    if (!(b.v_min <= b.v_max)) {
      add("bus", i, "v_max", "v_min exceeds v_max (bus " +
                                 std::to_string(b.id) + ")");
    }
  }
  for (std::size_t j = 0; j < net.generators.size(); ++j) {
    const auto& g = net.generators[j];
    if (g.bus >= net.buses.size()) {
      add("generator", j, "bus", "generator references a missing bus");
    }
    if (!(g.p_min <= g.p_max)) add("generator", j, "p_max", "p_min exceeds p_max");
    if (!(g.q_min <= g.q_max)) add("generator", j, "q_max", "q_min exceeds q_max");
  }
  for (std::size_t l = 0; l < net.branches.size(); ++l) {
    const auto& br = net.branches[l];
    if (br.from >= net.buses.size() || br.to >= net.buses.size()) {
      add("branch", l, "from/to", "branch references a missing bus");
    } else if (br.from == br.to) {
      add("branch", l, "to", "branch connects a bus to itself");
    }
    if (br.s_max < 0.0) add("branch", l, "s_max", "s_max must be non-negative");
    if (br.r == 0.0 && br.x == 0.0) {
      add("branch", l, "x", "zero series impedance");
    }
    if (!(br.angle_min <= br.angle_max)) {
      add("branch", l, "angle_max", "angle_min exceeds angle_max");
    }
  }
  return out;
}

BranchAdmittance branch_admittance(const Branch& br) {
  const double z2 = br.r * br.r + br.x * br.x;
  if (z2 == 0.0) {
    throw SingularBranchError("branch has zero series impedance");
  }
  // ys = 1 / (r + jx)
  const double gs = br.r / z2;
  const double bs = -br.x / z2;
  const double tap = br.tap;
  const double c = std::cos(br.shift);
  const double s = std::sin(br.shift);

  BranchAdmittance y;
  y.g_tt = gs;
  y.b_tt = bs + br.b_charging / 2.0;
  y.g_ff = y.g_tt / (tap * tap);
  y.b_ff = y.b_tt / (tap * tap);
  // Yft = -ys / (tap * exp(-j shift)) = -ys * exp(j shift) / tap
  y.g_ft = -(gs * c - bs * s) / tap;
  y.b_ft = -(gs * s + bs * c) / tap;
  // Ytf = -ys / (tap * exp(j shift)) = -ys * exp(-j shift) / tap
  y.g_tf = -(gs * c + bs * s) / tap;
  y.b_tf = -(bs * c - gs * s) / tap;
  return y;
}

double AdmittanceStructure::g(std::size_t i, std::size_t k) const {
  for (const auto& e : rows.at(i)) {
    if (e.col == k) return e.g;
  }
  return 0.0;
}

double AdmittanceStructure::b(std::size_t i, std::size_t k) const {
  for (const auto& e : rows.at(i)) {
    if (e.col == k) return e.b;
  }
  return 0.0;
}

std::vector<std::size_t> AdmittanceStructure::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (const auto& e : rows.at(i)) out.push_back(e.col);
  return out;
}

AdmittanceStructure build_admittance(const Network& net) {
  const std::size_t n = net.buses.size();
  std::vector<std::map<std::size_t, std::pair<double, double>>> acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    acc[i][i] = {net.buses[i].g_shunt, net.buses[i].b_shunt};
  }
  AdmittanceStructure y;
  y.branches.reserve(net.branches.size());
  for (const auto& br : net.branches) {
    BranchAdmittance t = branch_admittance(br);
    y.branches.push_back(t);
    auto add = [&](std::size_t i, std::size_t k, double g, double b) {
      auto& e = acc[i][k];
      e.first += g;
      e.second += b;
    };
    add(br.from, br.from, t.g_ff, t.b_ff);
    add(br.from, br.to, t.g_ft, t.b_ft);
    add(br.to, br.from, t.g_tf, t.b_tf);
    add(br.to, br.to, t.g_tt, t.b_tt);
  }
  y.rows.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [k, gb] : acc[i]) {
      y.rows[i].push_back({k, gb.first, gb.second});
    }
  }
  return y;
}

// --- canonical JSON -------------------------------------------------------

namespace {

using ojson = nlohmann::ordered_json;

ojson to_ojson(const Network& net) {
  ojson j;
  j["format"] = "opfx-network";
  j["version"] = 1;
  j["name"] = net.name;
  j["base_mva"] = net.base_mva;
  j["slack_bus"] = net.slack_bus;
  ojson buses = ojson::array();
  for (const auto& b : net.buses) {
    ojson e;
    e["id"] = b.id;
    e["type"] = static_cast<int>(b.type);
    e["p_load"] = b.p_load;
    e["q_load"] = b.q_load;
    e["g_shunt"] = b.g_shunt;
    e["b_shunt"] = b.b_shunt;
    e["v_min"] = b.v_min;
    e["v_max"] = b.v_max;
    buses.push_back(std::move(e));
  }
  j["buses"] = std::move(buses);
  ojson gens = ojson::array();
  for (const auto& g : net.generators) {
    ojson e;
    e["bus"] = g.bus;
    e["p_min"] = g.p_min;
    e["p_max"] = g.p_max;
    e["q_min"] = g.q_min;
    e["q_max"] = g.q_max;
    gens.push_back(std::move(e));
  }
  j["generators"] = std::move(gens);
  ojson brs = ojson::array();
  for (const auto& br : net.branches) {
    ojson e;
    e["from"] = br.from;
    e["to"] = br.to;
    e["r"] = br.r;
    e["x"] = br.x;
    e["b_charging"] = br.b_charging;
    e["tap"] = br.tap;
    e["shift"] = br.shift;
    e["s_max"] = br.s_max;
    e["angle_min"] = br.angle_min;
    e["angle_max"] = br.angle_max;
    brs.push_back(std::move(e));
  }
  j["branches"] = std::move(brs);
  return j;
}

}  // namespace

std::string network_to_json(const Network& net) {
  return to_ojson(net).dump(2) + "\n";
}

Network network_from_json(std::string_view text) {
  ojson j = ojson::parse(text);
  if (j.value("format", "") != "opfx-network") {
    throw CaseParseError(1, "not an opfx network document");
  }
  Network net;
  net.name = j.at("name").get<std::string>();
  net.base_mva = j.at("base_mva").get<double>();
  net.slack_bus = j.at("slack_bus").get<std::size_t>();
  for (const auto& e : j.at("buses")) {
    Bus b;
    b.id = e.at("id").get<int>();
    b.type = static_cast<BusType>(e.at("type").get<int>());
    b.p_load = e.at("p_load").get<double>();
    b.q_load = e.at("q_load").get<double>();
    b.g_shunt = e.at("g_shunt").get<double>();
    b.b_shunt = e.at("b_shunt").get<double>();
    b.v_min = e.at("v_min").get<double>();
    b.v_max = e.at("v_max").get<double>();
    net.buses.push_back(b);
  }
  for (const auto& e : j.at("generators")) {
    Generator g;
    g.bus = e.at("bus").get<std::size_t>();
    g.p_min = e.at("p_min").get<double>();
    g.p_max = e.at("p_max").get<double>();
    g.q_min = e.at("q_min").get<double>();
    g.q_max = e.at("q_max").get<double>();
    net.generators.push_back(g);
  }
  for (const auto& e : j.at("branches")) {
    Branch br;
    br.from = e.at("from").get<std::size_t>();
    br.to = e.at("to").get<std::size_t>();
    br.r = e.at("r").get<double>();
    br.x = e.at("x").get<double>();
    br.b_charging = e.at("b_charging").get<double>();
    br.tap = e.at("tap").get<double>();
    br.shift = e.at("shift").get<double>();
    br.s_max = e.at("s_max").get<double>();
    br.angle_min = e.at("angle_min").get<double>();
    br.angle_max = e.at("angle_max").get<double>();
    net.branches.push_back(br);
  }
  return net;
}

std::string network_hash(const Network& net) {
  // The name is presentation only; two files of the same grid hash equal.
  Network copy = net;
  copy.name.clear();
  const std::string doc = network_to_json(copy);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : doc) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace opfx

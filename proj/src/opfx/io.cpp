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

#include "opfx/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

namespace opfx {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(std::string_view s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw FormatError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  const fs::path tmp =
      target.string() + ".tmp." + std::to_string(static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot replace " + path);
  }
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[i] = digits[h & 0xf];
  return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (!out.empty() && !out.back().empty() && out.back().back() == '\r') {
    out.back().pop_back();
  }
  return out;
}

namespace {

ordered_json point_json(const OperatingPoint& x) {
  ordered_json j;
  j["v"] = x.v;
  j["theta"] = x.theta;
  j["p_gen"] = x.p_gen;
  j["q_gen"] = x.q_gen;
  return j;
}

OperatingPoint point_from_json(const ordered_json& j) {
  OperatingPoint x;
  x.v = j.at("v").get<std::vector<double>>();
  x.theta = j.at("theta").get<std::vector<double>>();
  x.p_gen = j.at("p_gen").get<std::vector<double>>();
  x.q_gen = j.at("q_gen").get<std::vector<double>>();
  return x;
}

std::vector<ordered_json> parse_lines(const std::string& text,
                                      const std::string& what) {
  std::vector<ordered_json> out;
  std::istringstream is(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      out.push_back(ordered_json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(what + " line " + std::to_string(n) + ": " + e.what());
    }
  }
  if (out.empty()) throw FormatError(what + ": empty file");
  return out;
}

// Wraps JSON access errors in FormatError.
template <typename F>
auto guarded(const std::string& what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(what + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(what + ": " + e.what());
  }
}

}  // namespace

std::string library_to_jsonl(const SolutionLibrary& lib) {
  std::string out;
  ordered_json h;
  h["format"] = "opfx-library";
  h["version"] = 1;
  h["network_hash"] = lib.network_hash;
  h["points"] = lib.size();
  h["dnf_count"] = lib.dnf_count;
  out += h.dump() + "\n";
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const Provenance& p = lib.provenance[i];
    ordered_json j;
    j["sequence"] = p.sequence;
    j["objective"] = p.objective_id;
    j["iteration"] = p.iteration;
    j["status"] = to_string(p.status);
    // null for non-finite values
    if (std::isfinite(p.objective_value)) {
      j["objective_value"] = p.objective_value;
    } else {
      j["objective_value"] = nullptr;
    }
    j.update(point_json(lib.points[i]));
    out += j.dump() + "\n";
  }
  return out;
}

SolutionLibrary library_from_jsonl(const std::string& text) {
  const auto lines = parse_lines(text, "library");
  return guarded("library", [&] {
    const ordered_json& h = lines.front();
    if (h.value("format", "") != "opfx-library") {
      throw FormatError("library: not an opfx-library file");
    }
    SolutionLibrary lib;
    lib.network_hash = h.at("network_hash").get<std::string>();
    lib.dnf_count = h.value("dnf_count", std::size_t{0});
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const ordered_json& j = lines[i];
      Provenance p;
      p.objective_id = j.at("objective").get<std::string>();
      p.iteration = j.at("iteration").get<int>();
      p.status = solve_status_from_string(j.at("status").get<std::string>());
      const ordered_json& ov = j.at("objective_value");
      p.objective_value = ov.is_null() ? std::numeric_limits<double>::quiet_NaN()
                                       : ov.get<double>();
      lib.append(point_from_json(j), p);
    }
    if (lib.size() != h.at("points").get<std::size_t>()) {
      throw FormatError("library: point count does not match the header");
    }
    return lib;
  });
}

std::string library_to_csv(const SolutionLibrary& lib) {
  std::ostringstream os;
  os << "sequence,objective,iteration,status,objective_value";
  if (!lib.empty()) {
    const OperatingPoint& x = lib.points.front();
    for (std::size_t i = 1; i <= x.v.size(); ++i) os << ",v" << i;
    for (std::size_t i = 1; i <= x.theta.size(); ++i) os << ",theta" << i;
    for (std::size_t i = 1; i <= x.p_gen.size(); ++i) os << ",pg" << i;
    for (std::size_t i = 1; i <= x.q_gen.size(); ++i) os << ",qg" << i;
  }
  os << '\n';
  for (std::size_t i = 0; i < lib.size(); ++i) {
    const Provenance& p = lib.provenance[i];
    os << p.sequence << ',' << p.objective_id << ',' << p.iteration << ','
       << to_string(p.status) << ',' << format_double(p.objective_value);
    const OperatingPoint& x = lib.points[i];
    for (const auto* v : {&x.v, &x.theta, &x.p_gen, &x.q_gen}) {
      for (double a : *v) os << ',' << format_double(a);
    }
    os << '\n';
  }
  return os.str();
}

std::string exhaustive_to_jsonl(const ExhaustiveSet& xe) {
  std::string out;
  ordered_json h;
  h["format"] = "opfx-exhaustive";
  h["version"] = 1;
  h["network_hash"] = xe.network_hash;
  h["m"] = xe.m;
  h["t"] = xe.t;
  h["partitions"] = xe.records.size();
  h["points"] = xe.points.size();
  out += h.dump() + "\n";
  for (const PartitionRecord& r : xe.records) {
    ordered_json j;
    j["partition"] = r.index;
    j["digits"] = r.digits;
    j["probe_status"] = to_string(r.probe_status);
    j["feasible"] = r.feasible;
    j["points"] = r.points;
    j["duplicates"] = r.duplicates;
    j["stopped_early"] = r.stopped_early;
    ordered_json st = ordered_json::array();
    for (SolveStatus s : r.statuses) st.push_back(to_string(s));
    j["statuses"] = st;
    out += j.dump() + "\n";
  }
  for (std::size_t i = 0; i < xe.points.size(); ++i) {
    ordered_json j;
    j["point"] = i;
    j["box"] = xe.partition_of[i];
    j.update(point_json(xe.points[i]));
    out += j.dump() + "\n";
  }
  return out;
}

ExhaustiveSet exhaustive_from_jsonl(const std::string& text) {
  const auto lines = parse_lines(text, "exhaustive set");
  return guarded("exhaustive set", [&] {
    const ordered_json& h = lines.front();
    if (h.value("format", "") != "opfx-exhaustive") {
      throw FormatError("exhaustive set: not an opfx-exhaustive file");
    }
    ExhaustiveSet xe;
    xe.network_hash = h.at("network_hash").get<std::string>();
    xe.m = h.at("m").get<std::size_t>();
    xe.t = h.at("t").get<std::size_t>();
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const ordered_json& j = lines[i];
      if (j.contains("partition")) {
        PartitionRecord r;
        r.index = j.at("partition").get<std::size_t>();
        r.digits = j.at("digits").get<std::vector<std::size_t>>();
        r.probe_status =
            solve_status_from_string(j.at("probe_status").get<std::string>());
        r.feasible = j.at("feasible").get<bool>();
        r.points = j.at("points").get<std::size_t>();
        r.duplicates = j.at("duplicates").get<std::size_t>();
        r.stopped_early = j.at("stopped_early").get<bool>();
        for (const auto& s : j.at("statuses")) {
          r.statuses.push_back(solve_status_from_string(s.get<std::string>()));
        }
        xe.records.push_back(std::move(r));
      } else {
        xe.partition_of.push_back(j.at("box").get<std::size_t>());
        xe.points.push_back(point_from_json(j));
      }
    }
    if (xe.records.size() != h.at("partitions").get<std::size_t>() ||
        xe.points.size() != h.at("points").get<std::size_t>()) {
      throw FormatError("exhaustive set: counts do not match the header");
    }
    return xe;
  });
}

std::string partition_report_csv(const ExhaustiveSet& xe) {
  std::ostringstream os;
  os << "index,digits,probe_status,feasible,points,duplicates,stopped_early\n";
  for (const PartitionRecord& r : xe.records) {
    os << r.index << ',';
    for (std::size_t k = 0; k < r.digits.size(); ++k) {
      os << (k ? "-" : "") << r.digits[k];
    }
    os << ',' << to_string(r.probe_status) << ',' << (r.feasible ? 1 : 0) << ','
       << r.points << ',' << r.duplicates << ',' << (r.stopped_early ? 1 : 0)
       << '\n';
  }
  return os.str();
}

std::string dnf_events_csv(const std::vector<DnfEvent>& events) {
  std::ostringstream os;
  os << "iteration,objective,status,attempts,message\n";
  for (const DnfEvent& e : events) {
    std::string msg = e.message;
    for (char& c : msg) {
      if (c == ',' || c == '\n') c = ';';
    }
    os << e.iteration << ',' << e.objective_id << ',' << to_string(e.status)
       << ',' << e.attempts << ',' << msg << '\n';
  }
  return os.str();
}

}  // namespace opfx

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

#include "opfx/runs.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "opfx/io.hpp"

namespace opfx {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

ordered_json solver_json(const SolverOptions& o) {
  ordered_json j;
  j["max_iter"] = o.max_iter;
  j["tol"] = o.tol;
  j["acceptable_tol"] = o.acceptable_tol;
  j["acceptable_iter"] = o.acceptable_iter;
  j["constr_viol_tol"] = o.constr_viol_tol;
  j["acceptable_constr_viol_tol"] = o.acceptable_constr_viol_tol;
  j["stationarity_tol"] = o.stationarity_tol;
  j["mu_init"] = o.mu_init;
  j["bound_push"] = o.bound_push;
  j["infeasibility_threshold"] = o.infeasibility_threshold;
  j["restoration_proximity"] = o.restoration_proximity;
  j["max_restorations"] = o.max_restorations;
  j["hessian"] = o.hessian == HessianApproximation::DampedBfgs
                     ? "damped-bfgs"
                     : "finite-difference";
  return j;
}

SolverOptions solver_from_json(const ordered_json& j) {
  SolverOptions o;
  o.max_iter = j.at("max_iter").get<int>();
  o.tol = j.at("tol").get<double>();
  o.acceptable_tol = j.at("acceptable_tol").get<double>();
  o.acceptable_iter = j.at("acceptable_iter").get<int>();
  o.constr_viol_tol = j.at("constr_viol_tol").get<double>();
  o.acceptable_constr_viol_tol = j.at("acceptable_constr_viol_tol").get<double>();
  o.stationarity_tol = j.at("stationarity_tol").get<double>();
  o.mu_init = j.at("mu_init").get<double>();
  o.bound_push = j.at("bound_push").get<double>();
  o.infeasibility_threshold = j.at("infeasibility_threshold").get<double>();
  o.restoration_proximity = j.at("restoration_proximity").get<double>();
  o.max_restorations = j.at("max_restorations").get<int>();
  const std::string h = j.at("hessian").get<std::string>();
  if (h == "damped-bfgs") {
    o.hessian = HessianApproximation::DampedBfgs;
  } else if (h == "finite-difference") {
    o.hessian = HessianApproximation::FiniteDifference;
  } else {
    throw FormatError("manifest: unknown hessian '" + h + "'");
  }
  return o;
}

ordered_json file_ref(const std::string& path) {
  ordered_json j;
  j["path"] = fs::absolute(path).lexically_normal().string();
  j["file_hash"] = fnv1a_hex(read_file(path));
  return j;
}

// Path of a recorded input after checking that its content is unchanged.
std::string checked_input(const ordered_json& ref) {
  const std::string path = ref.at("path").get<std::string>();
  if (fnv1a_hex(read_file(path)) != ref.at("file_hash").get<std::string>()) {
    throw MismatchError("input changed since the manifest was written: " + path);
  }
  return path;
}

ordered_json case_ref(const std::string& path, const Network& net) {
  ordered_json j = file_ref(path);
  j["network_hash"] = network_hash(net);
  return j;
}

std::string out_path(const std::string& dir, const std::string& file) {
  return (fs::absolute(dir) / file).lexically_normal().string();
}

void write_manifest(RunResult& r, const std::string& dir,
                    const std::string& name, const ordered_json& manifest) {
  const std::string text = manifest.dump(2) + "\n";
  r.manifest_path = out_path(dir, name + ".manifest.json");
  write_file_atomic(r.manifest_path, text);
  if (const char* cache = std::getenv("OPFX_CACHE_DIR"); cache && *cache) {
    const std::string command = manifest.at("command").get<std::string>();
    write_file_atomic(out_path(cache, command + "-" + fnv1a_hex(text) + ".json"),
                      text);
  }
}

ordered_json manifest_head(const std::string& command, const std::string& name) {
  ordered_json m;
  m["tool"] = "opfx";
  m["version"] = kToolVersion;
  m["command"] = command;
  m["name"] = name;
  return m;
}

void emit(RunResult& r, ordered_json& artifacts, const std::string& key,
          const std::string& dir, const std::string& file,
          const std::string& data) {
  const std::string p = out_path(dir, file);
  write_file_atomic(p, data);
  r.artifacts.push_back(p);
  artifacts[key] = file;
}

std::string fmt(double v) { return format_double(v); }

}  // namespace

std::string library_label(const SolutionLibrary& lib, const std::string& path) {
  for (const Provenance& p : lib.provenance) {
    if (!p.objective_id.empty()) return p.objective_id;
  }
  std::string stem = fs::path(path).filename().string();
  const auto dot = stem.find('.');
  return dot == std::string::npos ? stem : stem.substr(0, dot);
}

RunResult run_collect(const CollectRequest& req) {
  Network net = load_case_file(req.case_path);
  const std::string name = req.name.empty() ? req.config.objective_id : req.name;
  ordered_json m = manifest_head("collect", name);
  m["case"] = case_ref(req.case_path, net);
  ordered_json& c = m["config"];
  c["objective"] = req.config.objective_id;
  c["n"] = req.config.n;
  c["dnf_policy"] = to_string(req.config.dnf_policy);
  c["perturbation"] = req.config.perturbation;
  c["seed"] = req.config.seed;
  c["solver"] = solver_json(req.config.solver);

  SequentialCollector col(std::move(net), req.config);
  const SolutionLibrary lib = col.collect();
  const std::size_t dnf = col.dnf_events().size();

  RunResult r;
  ordered_json& a = m["artifacts"];
  emit(r, a, "library", req.out_dir, name + ".library.jsonl", library_to_jsonl(lib));
  emit(r, a, "csv", req.out_dir, name + ".library.csv", library_to_csv(lib));
  emit(r, a, "dnf", req.out_dir, name + ".dnf.csv", dnf_events_csv(col.dnf_events()));
  emit(r, a, "catalog", req.out_dir, name + ".catalog.json",
       ObjectiveCatalog::builtin().manifest_json() + "\n");
  m["summary"] = {{"points", lib.size()}, {"dnf_count", dnf}};
  write_manifest(r, req.out_dir, name, m);

  r.failed = lib.dnf_dominated();
  std::ostringstream s;
  s << "collected " << lib.size() << " of " << req.config.n << " points with "
    << req.config.objective_id << " (" << dnf << " DNF)\n";
  r.summary = s.str();
  return r;
}

RunResult run_exhaust(const ExhaustRequest& req) {
  Network net = load_case_file(req.case_path);
  ordered_json m = manifest_head("exhaust", req.name);
  m["case"] = case_ref(req.case_path, net);
  const SamplerConfig& cfg = req.config;
  ordered_json& c = m["config"];
  c["m"] = cfg.m;
  c["t"] = cfg.t;
  c["cap"] = cfg.cap;
  c["threads"] = cfg.threads;
  c["duplicate_tol"] = cfg.duplicate_tol;
  c["perturbation"] = cfg.perturbation;
  c["seed"] = cfg.seed;
  c["objective"] = cfg.objective_id;
  c["solver"] = solver_json(cfg.solver);

  ExhaustiveSampler sampler(std::move(net), cfg);
  const ExhaustiveSet xe = sampler.run();

  RunResult r;
  ordered_json& a = m["artifacts"];
  emit(r, a, "set", req.out_dir, req.name + ".set.jsonl", exhaustive_to_jsonl(xe));
  emit(r, a, "report", req.out_dir, req.name + ".partitions.csv",
       partition_report_csv(xe));
  emit(r, a, "catalog", req.out_dir, req.name + ".catalog.json",
       ObjectiveCatalog::builtin().manifest_json() + "\n");
  std::size_t feasible = 0;
  double seconds = 0.0;
  for (const PartitionRecord& p : xe.records) {
    feasible += p.feasible ? 1 : 0;
    seconds += p.solve_seconds;
  }
  m["summary"] = {{"partitions", xe.records.size()},
                  {"feasible_partitions", feasible},
                  {"points", xe.points.size()}};
  write_manifest(r, req.out_dir, req.name, m);

  r.failed = feasible == 0;
  std::ostringstream s;
  s << "partitions " << xe.records.size() << ", feasible " << feasible
    << " (fraction " << fmt(xe.feasible_fraction()) << "), points "
    << xe.points.size() << ", solver time " << std::fixed << std::setprecision(2)
    << seconds << " s\n";
  r.summary = s.str();
  return r;
}

RunResult run_compare(const CompareRequest& req) {
  if (req.libraries.empty()) {
    throw std::invalid_argument("compare needs at least one library");
  }
  if (req.norms.empty()) throw std::invalid_argument("compare needs a norm");
  const ExhaustiveSet xe = exhaustive_from_jsonl(read_file(req.exhaustive));
  if (xe.points.empty()) {
    throw std::invalid_argument("the exhaustive set holds no points");
  }
  Network net;
  bool have_net = !req.case_path.empty();
  if (have_net) {
    net = load_case_file(req.case_path);
    if (network_hash(net) != xe.network_hash) {
      throw MismatchError("case file and exhaustive set describe different networks");
    }
  } else if (req.injections == InjectionSet::AllBuses) {
    throw std::invalid_argument("all-bus injections need the case file");
  }
  const std::string system =
      !req.system.empty() ? req.system
                          : (have_net && !net.name.empty() ? net.name : "system");

  ordered_json m = manifest_head("compare", req.name);
  ordered_json& in = m["inputs"];
  in["libraries"] = ordered_json::array();
  for (const std::string& p : req.libraries) in["libraries"].push_back(file_ref(p));
  in["exhaustive"] = file_ref(req.exhaustive);
  if (have_net) in["case"] = case_ref(req.case_path, net);
  ordered_json& c = m["config"];
  c["norms"] = ordered_json::array();
  for (NormKind k : req.norms) c["norms"].push_back(to_string(k));
  c["injections"] = to_string(req.injections);
  c["system"] = system;

  RunResult r;
  ordered_json& a = m["artifacts"];
  a["progressions"] = ordered_json::array();
  DistanceTable table;
  std::vector<std::string> labels;
  std::vector<SolutionLibrary> libs;
  for (const std::string& path : req.libraries) {
    const SolutionLibrary& lib =
        libs.emplace_back(library_from_jsonl(read_file(path)));
    if (lib.network_hash != xe.network_hash) {
      throw MismatchError("library " + path +
                          " and the exhaustive set describe different networks");
    }
    if (lib.empty()) throw std::invalid_argument("library " + path + " is empty");
    labels.push_back(library_label(lib, path));
  }
  for (std::size_t i = 0; i < req.libraries.size(); ++i) {
    const SolutionLibrary& lib = libs[i];
    for (NormKind k : req.norms) {
      const PointSet s = project(lib.points, k, req.injections, net);
      const PointSet e = project(xe.points, k, req.injections, net);
      const Progression pr = progression(s, e);
      // a DNF-dominated run is reported as DNF
      const double value = lib.dnf_dominated() ? std::numeric_limits<double>::quiet_NaN()
                                               : pr.hausdorff.back();
      table.push_back({labels[i], system, k, value});
      const std::string file = req.name + "." + std::to_string(i + 1) + "-" +
                               labels[i] + "." + to_string(k) +
                               ".progression.csv";
      const std::string p = out_path(req.out_dir, file);
      write_file_atomic(p, progression_csv(pr));
      r.artifacts.push_back(p);
      a["progressions"].push_back(file);
    }
  }
  emit(r, a, "table", req.out_dir, req.name + ".distances.csv",
       distance_table_csv(table));

  std::ostringstream s;
  ordered_json best = ordered_json::object();
  for (NormKind k : req.norms) {
    const Best b = pick_best(table, system, k);
    best[to_string(k)] = {{"objective", b.objective}, {"value", b.value}};
    s << "d* " << to_string(k) << " " << b.objective << " " << fmt(b.value) << "\n";
  }
  m["summary"] = {{"d_star", best}};
  write_manifest(r, req.out_dir, req.name, m);
  r.summary = s.str();
  return r;
}

RunResult run_score(const ScoreRequest& req) {
  if (req.tables.empty()) {
    throw std::invalid_argument("score needs at least one distance table");
  }
  ordered_json m = manifest_head("score", req.name);
  m["inputs"]["tables"] = ordered_json::array();
  DistanceTable all;
  for (const std::string& p : req.tables) {
    m["inputs"]["tables"].push_back(file_ref(p));
    const DistanceTable t = distance_table_from_csv(read_file(p));
    all.insert(all.end(), t.begin(), t.end());
  }
  const std::string csv = score_table_csv(score(all));
  RunResult r;
  emit(r, m["artifacts"], "scores", req.out_dir, req.name + ".scores.csv", csv);
  write_manifest(r, req.out_dir, req.name, m);
  r.summary = csv;
  return r;
}

RunResult replay(const std::string& manifest_path, const std::string& out_dir) {
  ordered_json m;
  try {
    m = ordered_json::parse(read_file(manifest_path));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }
  const std::string dir =
      out_dir.empty() ? fs::absolute(manifest_path).parent_path().string() : out_dir;
  try {
    if (m.value("tool", "") != "opfx") throw FormatError("not an opfx manifest");
    const std::string command = m.at("command").get<std::string>();
    const std::string name = m.at("name").get<std::string>();
    const ordered_json& c = m.contains("config") ? m.at("config") : ordered_json();
    if (command == "collect") {
      CollectRequest req;
      req.case_path = checked_input(m.at("case"));
      req.config.objective_id = c.at("objective").get<std::string>();
      req.config.n = c.at("n").get<std::size_t>();
      req.config.dnf_policy = dnf_policy_from_string(c.at("dnf_policy").get<std::string>());
      req.config.perturbation = c.at("perturbation").get<double>();
      req.config.seed = c.at("seed").get<std::uint64_t>();
      req.config.solver = solver_from_json(c.at("solver"));
      req.out_dir = dir;
      req.name = name;
      return run_collect(req);
    }
    if (command == "exhaust") {
      ExhaustRequest req;
      req.case_path = checked_input(m.at("case"));
      req.config.m = c.at("m").get<std::size_t>();
      req.config.t = c.at("t").get<std::size_t>();
      req.config.cap = c.at("cap").get<std::size_t>();
      req.config.threads = c.at("threads").get<unsigned>();
      req.config.duplicate_tol = c.at("duplicate_tol").get<double>();
      req.config.perturbation = c.at("perturbation").get<double>();
      req.config.seed = c.at("seed").get<std::uint64_t>();
      req.config.objective_id = c.at("objective").get<std::string>();
      req.config.solver = solver_from_json(c.at("solver"));
      req.out_dir = dir;
      req.name = name;
      return run_exhaust(req);
    }
    if (command == "compare") {
      CompareRequest req;
      const ordered_json& in = m.at("inputs");
      for (const auto& l : in.at("libraries")) req.libraries.push_back(checked_input(l));
      req.exhaustive = checked_input(in.at("exhaustive"));
      if (in.contains("case")) req.case_path = checked_input(in.at("case"));
      req.norms.clear();
      for (const auto& k : c.at("norms")) req.norms.push_back(norm_from_string(k.get<std::string>()));
      req.injections = injection_set_from_string(c.at("injections").get<std::string>());
      req.system = c.at("system").get<std::string>();
      req.out_dir = dir;
      req.name = name;
      return run_compare(req);
    }
    if (command == "score") {
      ScoreRequest req;
      for (const auto& t : m.at("inputs").at("tables")) req.tables.push_back(checked_input(t));
      req.out_dir = dir;
      req.name = name;
      return run_score(req);
    }
    throw FormatError("manifest: unknown command '" + command + "'");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest: " + std::string(e.what()));
  }
}

}  // namespace opfx

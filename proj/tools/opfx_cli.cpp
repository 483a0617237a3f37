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

#include <algorithm>
#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "opfx/opfx.h"

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

int exit_code(opfx_status s) {
  switch (s) {
    case OPFX_OK: return kOk;
    case OPFX_ERR_INFEASIBLE:
    case OPFX_ERR_SOLVER: return kFailed;
    case OPFX_ERR_ARGUMENT:
    case OPFX_ERR_NOT_FOUND:
    case OPFX_ERR_CAP: return kUsage;
    case OPFX_ERR_IO:
    case OPFX_ERR_PARSE:
    case OPFX_ERR_MISMATCH: return kIo;
    case OPFX_ERR_INTERNAL: break;
  }
  return kFailed;
}

int report(opfx_status s) {
  std::fprintf(stderr, "opfx: %s: %s\n", opfx_status_name(s), opfx_last_error());
  return exit_code(s);
}

int finish(opfx_status s, opfx_run** out) {
  if (s != OPFX_OK) return report(s);
  opfx_run* run = *out;
  std::fputs(opfx_run_summary(run), stdout);
  for (size_t i = 0; i < opfx_run_artifact_count(run); ++i) {
    std::printf("wrote %s\n", opfx_run_artifact(run, i));
  }
  std::printf("manifest %s\n", opfx_run_manifest_path(run));
  const int code = opfx_run_failed(run) ? kFailed : kOk;
  opfx_run_free(run);
  return code;
}

void add_solver_flags(CLI::App* app, opfx_solver_options& o) {
  app->add_option("--max-iter", o.max_iter, "Interior-point iteration limit")
      ->capture_default_str();
  app->add_option("--tol", o.tol, "Overall convergence tolerance")->capture_default_str();
  app->add_option("--acceptable-tol", o.acceptable_tol, "Acceptable-level tolerance")
      ->capture_default_str();
  app->add_option("--constr-viol-tol", o.constr_viol_tol, "Constraint violation tolerance")
      ->capture_default_str();
  app->add_option("--stationarity-tol", o.stationarity_tol, "Dual infeasibility tolerance")
      ->capture_default_str();
  app->add_option("--mu-init", o.mu_init, "Initial barrier parameter")->capture_default_str();
  app->add_option("--max-restorations", o.max_restorations,
                  "Restoration phases allowed per solve")
      ->capture_default_str();
  const std::map<std::string, opfx_hessian> hess = {
      {"fd", OPFX_HESSIAN_FINITE_DIFFERENCE}, {"bfgs", OPFX_HESSIAN_DAMPED_BFGS}};
  app->add_option("--hessian", o.hessian, "Hessian approximation: fd or bfgs")
      ->transform(CLI::CheckedTransformer(hess, CLI::ignore_case))
      ->default_str("fd");
}

std::string read_string(opfx_status (*get)(char*, size_t, size_t*)) {
  size_t need = 0;
  get(nullptr, 0, &need);
  std::string s(need + 1, '\0');
  get(s.data(), s.size(), &need);
  s.resize(need);
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feasible-space exploration for AC optimal power flow"};
  app.set_version_flag("--version", std::string(opfx_version()));
  app.require_subcommand(1);

  // collect
  opfx_collect_options co;
  opfx_collect_options_init(&co);
  std::string co_case, co_obj = co.objective_id, co_out = ".", co_name;
  auto* collect = app.add_subcommand("collect", "Sequential max-distance collection");
  collect->add_option("--case", co_case, "MATPOWER case file")->required();
  collect->add_option("--objective", co_obj, "Catalog objective id")->capture_default_str();
  collect->add_option("--n", co.n, "Library size including the seed point")
      ->capture_default_str();
  const std::map<std::string, opfx_dnf_policy> policies = {
      {"skip-and-perturb", OPFX_DNF_SKIP_AND_PERTURB}, {"abort", OPFX_DNF_ABORT}};
  collect->add_option("--dnf-policy", co.dnf_policy, "skip-and-perturb or abort")
      ->transform(CLI::CheckedTransformer(policies))
      ->default_str("skip-and-perturb");
  collect->add_option("--perturbation", co.perturbation, "Warm-start perturbation scale")
      ->capture_default_str();
  collect->add_option("--seed", co.seed, "Perturbation seed")->capture_default_str();
  collect->add_option("--out", co_out, "Output directory")->capture_default_str();
  collect->add_option("--name", co_name, "Artifact prefix (default: objective id)");
  add_solver_flags(collect, co.solver);

  // exhaust
  opfx_exhaust_options eo;
  opfx_exhaust_options_init(&eo);
  eo.threads = std::max(1u, std::thread::hardware_concurrency());
  std::string eo_case, eo_out = ".", eo_name = "exhaustive";
  auto* exhaust = app.add_subcommand("exhaust", "Partitioned exhaustive rejection sampling");
  exhaust->add_option("--case", eo_case, "MATPOWER case file")->required();
  exhaust->add_option("--m", eo.m, "Divisions per generator voltage range")
      ->capture_default_str();
  exhaust->add_option("--t", eo.t, "Solves per feasible partition")->capture_default_str();
  exhaust->add_option("--cap", eo.cap, "Refuse when m^|G| exceeds this")
      ->capture_default_str();
  exhaust->add_option("--threads", eo.threads, "Worker threads")->capture_default_str();
  exhaust->add_option("--duplicate-tol", eo.duplicate_tol, "PQ distance treated as a duplicate")
      ->capture_default_str();
  exhaust->add_option("--perturbation", eo.perturbation, "Warm-start perturbation scale")
      ->capture_default_str();
  exhaust->add_option("--seed", eo.seed, "Perturbation seed")->capture_default_str();
  exhaust->add_option("--out", eo_out, "Output directory")->capture_default_str();
  exhaust->add_option("--name", eo_name, "Artifact prefix")->capture_default_str();
  add_solver_flags(exhaust, eo.solver);

  // compare
  std::vector<std::string> cmp_libs;
  std::string cmp_set, cmp_case, cmp_system, cmp_out = ".", cmp_name = "compare";
  std::vector<std::string> cmp_norms = {"PQ", "PV"};
  std::string cmp_inj = "generators";
  auto* compare = app.add_subcommand(
      "compare", "Hausdorff distances and progression curves (plot data)");
  compare->alias("plot-data");
  compare->add_option("--library", cmp_libs, "Library file (repeatable)")->required();
  compare->add_option("--exhaustive", cmp_set, "Exhaustive set file")->required();
  compare->add_option("--norms", cmp_norms, "Comma-separated norms (P,Q,V,Theta,PQ,PV,VTheta)")
      ->delimiter(',')
      ->capture_default_str();
  compare->add_option("--injections", cmp_inj, "P/Q over generators or all-buses")
      ->check(CLI::IsMember({"generators", "all-buses"}))
      ->capture_default_str();
  compare->add_option("--case", cmp_case, "Case file (needed for all-buses)");
  compare->add_option("--system", cmp_system, "System label (default: network name)");
  compare->add_option("--out", cmp_out, "Output directory")->capture_default_str();
  compare->add_option("--name", cmp_name, "Artifact prefix")->capture_default_str();

  // score
  std::vector<std::string> sc_tables;
  std::string sc_out = ".", sc_name = "score";
  auto* score = app.add_subcommand("score", "Ten-to-one point scoring over distance tables");
  score->add_option("--table", sc_tables, "Distance table CSV (repeatable)")->required();
  score->add_option("--out", sc_out, "Output directory")->capture_default_str();
  score->add_option("--name", sc_name, "Artifact prefix")->capture_default_str();

  // replay
  std::string rp_manifest, rp_out;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("manifest", rp_manifest, "Manifest file")->required();
  replay->add_option("--out", rp_out, "Output directory (default: next to the manifest)");

  // catalog
  bool cat_json = false;
  auto* catalog = app.add_subcommand("catalog", "List the objective catalog");
  catalog->add_flag("--json", cat_json, "Print the catalog manifest");

  // network
  std::string net_case;
  bool net_json = false;
  auto* network = app.add_subcommand("network", "Parse and validate a case file");
  network->add_option("case", net_case, "MATPOWER case file")->required();
  network->add_flag("--json", net_json, "Print the parsed network as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  opfx_run* run = nullptr;

  if (*collect) {
    co.objective_id = co_obj.c_str();
    return finish(opfx_run_collect(co_case.c_str(), &co, co_out.c_str(),
                                   co_name.empty() ? nullptr : co_name.c_str(), &run),
                  &run);
  }

  if (*exhaust) {
    return finish(opfx_run_exhaust(eo_case.c_str(), &eo, eo_out.c_str(),
                                   eo_name.c_str(), &run),
                  &run);
  }

  if (*compare) {
    std::vector<opfx_norm> norms;
    for (const std::string& n : cmp_norms) {
      opfx_norm k;
      const opfx_status s = opfx_norm_parse(n.c_str(), &k);
      if (s != OPFX_OK) return report(s);
      norms.push_back(k);
    }
    std::vector<const char*> libs;
    for (const std::string& l : cmp_libs) libs.push_back(l.c_str());
    const opfx_injections inj = cmp_inj == "all-buses" ? OPFX_INJECTIONS_ALL_BUSES
                                                       : OPFX_INJECTIONS_GENERATORS;
    return finish(
        opfx_run_compare(libs.data(), libs.size(), cmp_set.c_str(), norms.data(),
                         norms.size(), inj, cmp_case.empty() ? nullptr : cmp_case.c_str(),
                         cmp_system.empty() ? nullptr : cmp_system.c_str(),
                         cmp_out.c_str(), cmp_name.c_str(), &run),
        &run);
  }

  if (*score) {
    std::vector<const char*> tables;
    for (const std::string& t : sc_tables) tables.push_back(t.c_str());
    return finish(opfx_run_score(tables.data(), tables.size(), sc_out.c_str(),
                                 sc_name.c_str(), &run),
                  &run);
  }

  if (*replay) {
    return finish(opfx_run_replay(rp_manifest.c_str(),
                                  rp_out.empty() ? nullptr : rp_out.c_str(), &run),
                  &run);
  }

  if (*catalog) {
    if (cat_json) {
      std::printf("%s\n", read_string(opfx_catalog_json).c_str());
      return kOk;
    }
    for (size_t i = 0; i < opfx_catalog_size(); ++i) {
      char id[32];
      opfx_catalog_id(i, id, sizeof id, nullptr);
      std::printf("%s\n", id);
    }
    return kOk;
  }

  if (*network) {
    opfx_network* net = nullptr;
    opfx_status s = opfx_network_load(net_case.c_str(), &net);
    if (s != OPFX_OK) return report(s);
    size_t nb = 0, ng = 0, nl = 0, findings = 0, need = 0;
    opfx_network_counts(net, &nb, &ng, &nl);
    char hash[32];
    opfx_network_hash(net, hash, sizeof hash, nullptr);
    opfx_network_validate(net, &findings, nullptr, 0, &need);
    std::string text(need + 1, '\0');
    opfx_network_validate(net, &findings, text.data(), text.size(), &need);
    text.resize(need);
    if (net_json) {
      opfx_network_json(net, nullptr, 0, &need);
      std::string j(need + 1, '\0');
      opfx_network_json(net, j.data(), j.size(), &need);
      j.resize(need);
      std::printf("%s\n", j.c_str());
    } else {
      std::printf("buses %zu, generators %zu, branches %zu, hash %s\n", nb, ng, nl, hash);
    }
    std::fputs(text.c_str(), stderr);
    opfx_network_free(net);
    return findings == 0 ? kOk : kIo;
  }
  return kUsage;
}

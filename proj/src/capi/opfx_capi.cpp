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

#include "opfx/opfx.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "opfx/io.hpp"
#include "opfx/runs.hpp"

struct opfx_network {
  opfx::Network net;
};

struct opfx_library {
  opfx::SolutionLibrary lib;
};

struct opfx_exhaustive {
  opfx::ExhaustiveSet xe;
};

struct opfx_run {
  opfx::RunResult result;
};

namespace {

thread_local std::string g_last_error;

opfx_status fail(opfx_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs f and maps exceptions onto status codes.
template <typename F>
opfx_status guard(F&& f) {
  try {
    return f();
  } catch (const opfx::CatalogError& e) {
    return fail(OPFX_ERR_NOT_FOUND, e.what());
  } catch (const opfx::PartitionCapError& e) {
    return fail(OPFX_ERR_CAP, e.what());
  } catch (const opfx::MismatchError& e) {
    return fail(OPFX_ERR_MISMATCH, e.what());
  } catch (const opfx::IoError& e) {
    return fail(OPFX_ERR_IO, e.what());
  } catch (const opfx::FormatError& e) {
    return fail(OPFX_ERR_PARSE, e.what());
  } catch (const opfx::CaseFileError& e) {
    return fail(OPFX_ERR_IO, e.what());
  } catch (const opfx::CaseParseError& e) {
    return fail(OPFX_ERR_PARSE, e.what());
  } catch (const opfx::CaseReferenceError& e) {
    return fail(OPFX_ERR_PARSE, e.what());
  } catch (const opfx::SolverFailure& e) {
    return fail(e.status() == opfx::SolveStatus::Infeasible ? OPFX_ERR_INFEASIBLE
                                                            : OPFX_ERR_SOLVER,
                e.what());
  } catch (const std::invalid_argument& e) {
    return fail(OPFX_ERR_ARGUMENT, e.what());
  } catch (const std::out_of_range& e) {
    return fail(OPFX_ERR_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(OPFX_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OPFX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(OPFX_ERR_INTERNAL, "unknown error");
  }
}

opfx_status copy_out(const std::string& s, char* buf, std::size_t cap,
                     std::size_t* needed) {
  if (needed) *needed = s.size();
  if (buf && cap > 0) {
    const std::size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
  return OPFX_OK;
}

opfx_status null_arg(const char* what) {
  return fail(OPFX_ERR_ARGUMENT, std::string(what) + " is NULL");
}

opfx::SolverOptions to_solver(const opfx_solver_options& o) {
  opfx::SolverOptions s;
  s.max_iter = o.max_iter;
  s.tol = o.tol;
  s.acceptable_tol = o.acceptable_tol;
  s.constr_viol_tol = o.constr_viol_tol;
  s.stationarity_tol = o.stationarity_tol;
  s.mu_init = o.mu_init;
  s.max_restorations = o.max_restorations;
  switch (o.hessian) {
    case OPFX_HESSIAN_FINITE_DIFFERENCE:
      s.hessian = opfx::HessianApproximation::FiniteDifference;
      break;
    case OPFX_HESSIAN_DAMPED_BFGS:
      s.hessian = opfx::HessianApproximation::DampedBfgs;
      break;
    default:
      throw std::invalid_argument("unknown Hessian approximation");
  }
  return s;
}

opfx::CollectorConfig to_collector(const opfx_collect_options& o) {
  opfx::CollectorConfig c;
  c.objective_id = o.objective_id ? o.objective_id : "f36";
  c.n = o.n;
  switch (o.dnf_policy) {
    case OPFX_DNF_SKIP_AND_PERTURB: c.dnf_policy = opfx::DnfPolicy::SkipAndPerturb; break;
    case OPFX_DNF_ABORT: c.dnf_policy = opfx::DnfPolicy::Abort; break;
    default: throw std::invalid_argument("unknown DNF policy");
  }
  c.perturbation = o.perturbation;
  c.seed = o.seed;
  c.solver = to_solver(o.solver);
  return c;
}

opfx::SamplerConfig to_sampler(const opfx_exhaust_options& o) {
  opfx::SamplerConfig c;
  c.m = o.m;
  c.t = o.t;
  c.cap = o.cap;
  c.threads = o.threads;
  c.duplicate_tol = o.duplicate_tol;
  c.perturbation = o.perturbation;
  c.seed = o.seed;
  c.solver = to_solver(o.solver);
  return c;
}

opfx::NormKind to_norm(opfx_norm n) {
  switch (n) {
    case OPFX_NORM_P: return opfx::NormKind::P;
    case OPFX_NORM_Q: return opfx::NormKind::Q;
    case OPFX_NORM_V: return opfx::NormKind::V;
    case OPFX_NORM_THETA: return opfx::NormKind::Theta;
    case OPFX_NORM_PQ: return opfx::NormKind::PQ;
    case OPFX_NORM_PV: return opfx::NormKind::PV;
    case OPFX_NORM_VTHETA: return opfx::NormKind::VTheta;
  }
  throw std::invalid_argument("unknown norm");
}

opfx::InjectionSet to_injections(opfx_injections i) {
  switch (i) {
    case OPFX_INJECTIONS_GENERATORS: return opfx::InjectionSet::Generators;
    case OPFX_INJECTIONS_ALL_BUSES: return opfx::InjectionSet::AllBuses;
  }
  throw std::invalid_argument("unknown injection set");
}

std::size_t dimension(const opfx::OperatingPoint& x) {
  return x.v.size() + x.theta.size() + x.p_gen.size() + x.q_gen.size();
}

void pack(const opfx::OperatingPoint& x, double* out) {
  for (const auto* v : {&x.v, &x.theta, &x.p_gen, &x.q_gen}) {
    out = std::copy(v->begin(), v->end(), out);
  }
}

// Shared by the metric entry points.
opfx_status project_pair(const opfx_library* lib, const opfx_exhaustive* xe,
                         const opfx_network* net, opfx_norm norm,
                         opfx_injections injections, opfx::PointSet& s,
                         opfx::PointSet& e) {
  if (!lib) return null_arg("library");
  if (!xe) return null_arg("exhaustive set");
  if (lib->lib.network_hash != xe->xe.network_hash) {
    return fail(OPFX_ERR_MISMATCH,
                "library and exhaustive set describe different networks");
  }
  const opfx::InjectionSet inj = to_injections(injections);
  static const opfx::Network empty;
  if (inj == opfx::InjectionSet::AllBuses && !net) {
    return null_arg("network (needed for all-bus injections)");
  }
  const opfx::Network& n = net ? net->net : empty;
  if (net && opfx::network_hash(n) != xe->xe.network_hash) {
    return fail(OPFX_ERR_MISMATCH, "network does not match the exhaustive set");
  }
  s = opfx::project(lib->lib.points, to_norm(norm), inj, n);
  e = opfx::project(xe->xe.points, to_norm(norm), inj, n);
  return OPFX_OK;
}

opfx::PointSet rows(const double* a, std::size_t n, std::size_t dim) {
  opfx::PointSet s(n);
  for (std::size_t i = 0; i < n; ++i) s[i].assign(a + i * dim, a + (i + 1) * dim);
  return s;
}

opfx_status finish_run(opfx::RunResult r, opfx_run** out) {
  *out = new opfx_run{std::move(r)};
  return OPFX_OK;
}

}  // namespace

extern "C" {

const char* opfx_status_name(opfx_status s) {
  switch (s) {
    case OPFX_OK: return "ok";
    case OPFX_ERR_ARGUMENT: return "invalid argument";
    case OPFX_ERR_NOT_FOUND: return "not found";
    case OPFX_ERR_CAP: return "partition cap exceeded";
    case OPFX_ERR_IO: return "I/O error";
    case OPFX_ERR_PARSE: return "parse error";
    case OPFX_ERR_MISMATCH: return "network mismatch";
    case OPFX_ERR_INFEASIBLE: return "infeasible";
    case OPFX_ERR_SOLVER: return "solver failure";
    case OPFX_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* opfx_last_error(void) { return g_last_error.c_str(); }

const char* opfx_version(void) { return opfx::kToolVersion; }

opfx_status opfx_network_load(const char* path, opfx_network** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = new opfx_network{opfx::load_case_file(path)};
    return OPFX_OK;
  });
}

opfx_status opfx_network_parse(const char* text, opfx_network** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = new opfx_network{opfx::parse_case(text)};
    return OPFX_OK;
  });
}

void opfx_network_free(opfx_network* net) { delete net; }

opfx_status opfx_network_counts(const opfx_network* net, size_t* buses,
                                size_t* generators, size_t* branches) {
  if (!net) return null_arg("network");
  if (buses) *buses = net->net.bus_count();
  if (generators) *generators = net->net.generator_count();
  if (branches) *branches = net->net.branch_count();
  return OPFX_OK;
}

size_t opfx_network_dimension(const opfx_network* net) {
  return net ? opfx::VariableLayout(net->net).size() : 0;
}

opfx_status opfx_network_hash(const opfx_network* net, char* buf, size_t cap,
                              size_t* needed) {
  if (!net) return null_arg("network");
  return guard([&] { return copy_out(opfx::network_hash(net->net), buf, cap, needed); });
}

opfx_status opfx_network_json(const opfx_network* net, char* buf, size_t cap,
                              size_t* needed) {
  if (!net) return null_arg("network");
  return guard([&] { return copy_out(opfx::network_to_json(net->net), buf, cap, needed); });
}

opfx_status opfx_network_validate(const opfx_network* net, size_t* findings,
                                  char* buf, size_t cap, size_t* needed) {
  if (!net) return null_arg("network");
  return guard([&] {
    const auto v = opfx::validate(net->net);
    if (findings) *findings = v.size();
    std::string text;
    for (const auto& f : v) {
      text += f.element + " " + std::to_string(f.index) + " " + f.field + ": " +
              f.message + "\n";
    }
    return copy_out(text, buf, cap, needed);
  });
}

opfx_status opfx_network_max_violation(const opfx_network* net, const double* x,
                                       size_t len, double* out) {
  if (!net) return null_arg("network");
  if (!x) return null_arg("x");
  if (!out) return null_arg("out");
  return guard([&] {
    const opfx::VariableLayout L(net->net);
    if (len != L.size()) return fail(OPFX_ERR_ARGUMENT, "point length does not match the network");
    *out = opfx::residuals(L.unpack({x, len}), net->net).max_violation;
    return OPFX_OK;
  });
}

size_t opfx_catalog_size(void) { return opfx::ObjectiveCatalog::builtin().size(); }

opfx_status opfx_catalog_id(size_t index, char* buf, size_t cap, size_t* needed) {
  const auto& e = opfx::ObjectiveCatalog::builtin().entries();
  if (index >= e.size()) return fail(OPFX_ERR_NOT_FOUND, "catalog index out of range");
  return copy_out(e[index].id, buf, cap, needed);
}

opfx_status opfx_catalog_json(char* buf, size_t cap, size_t* needed) {
  return guard([&] {
    return copy_out(opfx::ObjectiveCatalog::builtin().manifest_json(), buf, cap, needed);
  });
}

opfx_status opfx_objective_evaluate(const char* id, const opfx_library* lib,
                                    const double* x, size_t len, double* value,
                                    double* grad) {
  if (!id) return null_arg("id");
  if (!lib) return null_arg("library");
  if (!x) return null_arg("x");
  if (!value) return null_arg("value");
  return guard([&] {
    if (lib->lib.empty()) return fail(OPFX_ERR_ARGUMENT, "library is empty");
    const opfx::OperatingPoint& p0 = lib->lib.points.front();
    const opfx::VariableLayout L(p0.v.size(), p0.p_gen.size());
    if (len != L.size()) return fail(OPFX_ERR_ARGUMENT, "point length does not match the library");
    const opfx::BoundObjective f(opfx::ObjectiveCatalog::builtin().at(id), L,
                                 lib->lib.points);
    std::vector<double> g(grad ? len : 0);
    *value = f({x, len}, g);
    if (grad) std::copy(g.begin(), g.end(), grad);
    return OPFX_OK;
  });
}

void opfx_solver_options_init(opfx_solver_options* o) {
  if (!o) return;
  const opfx::SolverOptions d;
  o->max_iter = d.max_iter;
  o->tol = d.tol;
  o->acceptable_tol = d.acceptable_tol;
  o->constr_viol_tol = d.constr_viol_tol;
  o->stationarity_tol = d.stationarity_tol;
  o->mu_init = d.mu_init;
  o->max_restorations = d.max_restorations;
  o->hessian = OPFX_HESSIAN_FINITE_DIFFERENCE;
}

void opfx_collect_options_init(opfx_collect_options* o) {
  if (!o) return;
  const opfx::CollectorConfig d;
  o->objective_id = "f36";
  o->n = 10;
  o->dnf_policy = OPFX_DNF_SKIP_AND_PERTURB;
  o->perturbation = d.perturbation;
  o->seed = d.seed;
  opfx_solver_options_init(&o->solver);
}

opfx_status opfx_collect(const opfx_network* net, const opfx_collect_options* o,
                         opfx_library** out) {
  if (!net) return null_arg("network");
  if (!o) return null_arg("options");
  if (!out) return null_arg("out");
  return guard([&] {
    opfx::SequentialCollector col(net->net, to_collector(*o));
    opfx::SolutionLibrary lib = col.collect();
    *out = new opfx_library{std::move(lib)};
    return OPFX_OK;
  });
}

opfx_status opfx_library_load(const char* path, opfx_library** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = new opfx_library{opfx::library_from_jsonl(opfx::read_file(path))};
    return OPFX_OK;
  });
}

opfx_status opfx_library_save(const opfx_library* lib, const char* jsonl_path,
                              const char* csv_path) {
  if (!lib) return null_arg("library");
  return guard([&] {
    if (jsonl_path) opfx::write_file_atomic(jsonl_path, opfx::library_to_jsonl(lib->lib));
    if (csv_path) opfx::write_file_atomic(csv_path, opfx::library_to_csv(lib->lib));
    return OPFX_OK;
  });
}

void opfx_library_free(opfx_library* lib) { delete lib; }

size_t opfx_library_size(const opfx_library* lib) { return lib ? lib->lib.size() : 0; }

size_t opfx_library_dnf_count(const opfx_library* lib) { return lib ? lib->lib.dnf_count : 0; }

size_t opfx_library_dimension(const opfx_library* lib) {
  return lib && !lib->lib.empty() ? dimension(lib->lib.points.front()) : 0;
}

opfx_status opfx_library_point(const opfx_library* lib, size_t index, double* x,
                               size_t len) {
  if (!lib) return null_arg("library");
  if (!x) return null_arg("x");
  if (index >= lib->lib.size()) return fail(OPFX_ERR_NOT_FOUND, "point index out of range");
  const opfx::OperatingPoint& p = lib->lib.points[index];
  if (len != dimension(p)) return fail(OPFX_ERR_ARGUMENT, "buffer length does not match the point");
  pack(p, x);
  return OPFX_OK;
}

opfx_status opfx_library_objective_value(const opfx_library* lib, size_t index,
                                         double* out) {
  if (!lib) return null_arg("library");
  if (!out) return null_arg("out");
  if (index >= lib->lib.size()) return fail(OPFX_ERR_NOT_FOUND, "point index out of range");
  *out = lib->lib.provenance[index].objective_value;
  return OPFX_OK;
}

void opfx_exhaust_options_init(opfx_exhaust_options* o) {
  if (!o) return;
  const opfx::SamplerConfig d;
  o->m = d.m;
  o->t = d.t;
  o->cap = d.cap;
  o->threads = d.threads;
  o->duplicate_tol = d.duplicate_tol;
  o->perturbation = d.perturbation;
  o->seed = d.seed;
  opfx_solver_options_init(&o->solver);
}

opfx_status opfx_partition_count(const opfx_network* net, size_t m, size_t cap,
                                 size_t* out) {
  if (!net) return null_arg("network");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = opfx::partition_count(net->net, m, cap);
    return OPFX_OK;
  });
}

opfx_status opfx_exhaust(const opfx_network* net, const opfx_exhaust_options* o,
                         opfx_exhaustive** out) {
  if (!net) return null_arg("network");
  if (!o) return null_arg("options");
  if (!out) return null_arg("out");
  return guard([&] {
    opfx::ExhaustiveSampler s(net->net, to_sampler(*o));
    *out = new opfx_exhaustive{s.run()};
    return OPFX_OK;
  });
}

opfx_status opfx_exhaustive_load(const char* path, opfx_exhaustive** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = new opfx_exhaustive{opfx::exhaustive_from_jsonl(opfx::read_file(path))};
    return OPFX_OK;
  });
}

opfx_status opfx_exhaustive_save(const opfx_exhaustive* xe, const char* jsonl_path,
                                 const char* report_csv_path) {
  if (!xe) return null_arg("exhaustive set");
  return guard([&] {
    if (jsonl_path) opfx::write_file_atomic(jsonl_path, opfx::exhaustive_to_jsonl(xe->xe));
    if (report_csv_path) {
      opfx::write_file_atomic(report_csv_path, opfx::partition_report_csv(xe->xe));
    }
    return OPFX_OK;
  });
}

void opfx_exhaustive_free(opfx_exhaustive* xe) { delete xe; }

size_t opfx_exhaustive_size(const opfx_exhaustive* xe) { return xe ? xe->xe.points.size() : 0; }

size_t opfx_exhaustive_partitions(const opfx_exhaustive* xe) {
  return xe ? xe->xe.records.size() : 0;
}

double opfx_exhaustive_feasible_fraction(const opfx_exhaustive* xe) {
  return xe ? xe->xe.feasible_fraction() : 0.0;
}

opfx_status opfx_exhaustive_point(const opfx_exhaustive* xe, size_t index,
                                  double* x, size_t len) {
  if (!xe) return null_arg("exhaustive set");
  if (!x) return null_arg("x");
  if (index >= xe->xe.points.size()) return fail(OPFX_ERR_NOT_FOUND, "point index out of range");
  const opfx::OperatingPoint& p = xe->xe.points[index];
  if (len != dimension(p)) return fail(OPFX_ERR_ARGUMENT, "buffer length does not match the point");
  pack(p, x);
  return OPFX_OK;
}

opfx_status opfx_norm_parse(const char* name, opfx_norm* out) {
  if (!name) return null_arg("name");
  if (!out) return null_arg("out");
  return guard([&] {
    static const opfx_norm all[] = {OPFX_NORM_P,  OPFX_NORM_Q,  OPFX_NORM_V,
                                    OPFX_NORM_THETA, OPFX_NORM_PQ, OPFX_NORM_PV,
                                    OPFX_NORM_VTHETA};
    const opfx::NormKind k = opfx::norm_from_string(name);
    for (opfx_norm n : all) {
      if (to_norm(n) == k) {
        *out = n;
        return OPFX_OK;
      }
    }
    return fail(OPFX_ERR_ARGUMENT, "unknown norm");
  });
}

opfx_status opfx_directed_hausdorff(const double* a, size_t na, const double* b,
                                    size_t nb, size_t dim, double* out) {
  if (!a || !b) return null_arg("point set");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = opfx::directed_hausdorff(rows(a, na, dim), rows(b, nb, dim));
    return OPFX_OK;
  });
}

opfx_status opfx_hausdorff(const double* a, size_t na, const double* b, size_t nb,
                           size_t dim, double* out) {
  if (!a || !b) return null_arg("point set");
  if (!out) return null_arg("out");
  return guard([&] {
    *out = opfx::hausdorff(rows(a, na, dim), rows(b, nb, dim));
    return OPFX_OK;
  });
}

opfx_status opfx_library_hausdorff(const opfx_library* lib,
                                   const opfx_exhaustive* xe,
                                   const opfx_network* net, opfx_norm norm,
                                   opfx_injections injections, double* out) {
  if (!out) return null_arg("out");
  return guard([&] {
    opfx::PointSet s, e;
    const opfx_status st = project_pair(lib, xe, net, norm, injections, s, e);
    if (st != OPFX_OK) return st;
    *out = opfx::hausdorff(s, e);
    return OPFX_OK;
  });
}

opfx_status opfx_progression(const opfx_library* lib, const opfx_exhaustive* xe,
                             const opfx_network* net, opfx_norm norm,
                             opfx_injections injections, double* h,
                             double* h_directed, size_t len) {
  return guard([&] {
    opfx::PointSet s, e;
    const opfx_status st = project_pair(lib, xe, net, norm, injections, s, e);
    if (st != OPFX_OK) return st;
    const opfx::Progression p = opfx::progression(s, e);
    const std::size_t n = std::min(len, p.hausdorff.size());
    if (h) std::copy_n(p.hausdorff.begin(), n, h);
    if (h_directed) std::copy_n(p.directed.begin(), n, h_directed);
    return OPFX_OK;
  });
}

opfx_status opfx_run_collect(const char* case_path, const opfx_collect_options* o,
                             const char* out_dir, const char* name, opfx_run** out) {
  if (!case_path) return null_arg("case path");
  if (!o) return null_arg("options");
  if (!out) return null_arg("out");
  return guard([&] {
    opfx::CollectRequest req;
    req.case_path = case_path;
    req.config = to_collector(*o);
    if (out_dir) req.out_dir = out_dir;
    if (name) req.name = name;
    return finish_run(opfx::run_collect(req), out);
  });
}

opfx_status opfx_run_exhaust(const char* case_path, const opfx_exhaust_options* o,
                             const char* out_dir, const char* name, opfx_run** out) {
  if (!case_path) return null_arg("case path");
  if (!o) return null_arg("options");
  if (!out) return null_arg("out");
  return guard([&] {
    opfx::ExhaustRequest req;
    req.case_path = case_path;
    req.config = to_sampler(*o);
    if (out_dir) req.out_dir = out_dir;
    if (name) req.name = name;
    return finish_run(opfx::run_exhaust(req), out);
  });
}

opfx_status opfx_run_compare(const char* const* libraries, size_t n_libraries,
                             const char* exhaustive_path, const opfx_norm* norms,
                             size_t n_norms, opfx_injections injections,
                             const char* case_path, const char* system,
                             const char* out_dir, const char* name, opfx_run** out) {
  if (!libraries && n_libraries > 0) return null_arg("libraries");
  if (!exhaustive_path) return null_arg("exhaustive set path");
  if (!norms && n_norms > 0) return null_arg("norms");
  if (!out) return null_arg("out");
  return guard([&] {
    opfx::CompareRequest req;
    for (std::size_t i = 0; i < n_libraries; ++i) {
      if (!libraries[i]) return null_arg("library path");
      req.libraries.emplace_back(libraries[i]);
    }
    req.exhaustive = exhaustive_path;
    req.norms.clear();
    for (std::size_t i = 0; i < n_norms; ++i) req.norms.push_back(to_norm(norms[i]));
    req.injections = to_injections(injections);
    if (case_path) req.case_path = case_path;
    if (system) req.system = system;
    if (out_dir) req.out_dir = out_dir;
    if (name) req.name = name;
    return finish_run(opfx::run_compare(req), out);
  });
}

opfx_status opfx_run_score(const char* const* tables, size_t n_tables,
                           const char* out_dir, const char* name, opfx_run** out) {
  if (!tables && n_tables > 0) return null_arg("tables");
  if (!out) return null_arg("out");
  return guard([&] {
    opfx::ScoreRequest req;
    for (std::size_t i = 0; i < n_tables; ++i) {
      if (!tables[i]) return null_arg("table path");
      req.tables.emplace_back(tables[i]);
    }
    if (out_dir) req.out_dir = out_dir;
    if (name) req.name = name;
    return finish_run(opfx::run_score(req), out);
  });
}

opfx_status opfx_run_replay(const char* manifest_path, const char* out_dir,
                            opfx_run** out) {
  if (!manifest_path) return null_arg("manifest path");
  if (!out) return null_arg("out");
  return guard([&] {
    return finish_run(opfx::replay(manifest_path, out_dir ? out_dir : ""), out);
  });
}

void opfx_run_free(opfx_run* run) { delete run; }

const char* opfx_run_summary(const opfx_run* run) {
  return run ? run->result.summary.c_str() : "";
}

const char* opfx_run_manifest_path(const opfx_run* run) {
  return run ? run->result.manifest_path.c_str() : "";
}

size_t opfx_run_artifact_count(const opfx_run* run) {
  return run ? run->result.artifacts.size() : 0;
}

const char* opfx_run_artifact(const opfx_run* run, size_t index) {
  if (!run || index >= run->result.artifacts.size()) return nullptr;
  return run->result.artifacts[index].c_str();
}

int opfx_run_failed(const opfx_run* run) { return run && run->result.failed ? 1 : 0; }

}  // extern "C"

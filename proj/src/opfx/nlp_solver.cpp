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

#include "opfx/nlp_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace opfx {

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::IterationLimit: return "IterationLimit";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "NumericalFailure";
}

SolveStatus solve_status_from_string(const std::string& s) {
  if (s == "Optimal") return SolveStatus::Optimal;
  if (s == "Infeasible") return SolveStatus::Infeasible;
  if (s == "IterationLimit") return SolveStatus::IterationLimit;
  if (s == "NumericalFailure") return SolveStatus::NumericalFailure;
  throw std::invalid_argument("unknown solve status '" + s + "'");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kInf = ProblemDef::kInf;
constexpr double kMultiplierSafeguard = 1e10;
constexpr double kArmijo = 1e-4;
constexpr double kAlphaMin = 1e-12;
constexpr double kGammaTheta = 1e-5;
constexpr double kGammaPhi = 1e-8;
constexpr double kGammaAlpha = 0.05;
constexpr double kSTheta = 1.1;
constexpr double kSPhi = 2.3;

void check_problem(const ProblemDef& p, std::size_t start_size) {
  if (!p.objective) throw std::invalid_argument("problem has no objective");
  if (p.n_eq > 0 && !p.equalities) {
    throw std::invalid_argument("problem declares equalities without callback");
  }
  if (p.n_ineq > 0 && !p.inequalities) {
    throw std::invalid_argument(
        "problem declares inequalities without callback");
  }
  if (p.lower.size() != p.dimension || p.upper.size() != p.dimension) {
    throw std::invalid_argument("bound vectors do not match the dimension");
  }
  if (start_size != p.dimension) {
    throw std::invalid_argument("start vector does not match the dimension");
  }
}

bool bounds_consistent(const ProblemDef& p) {
  for (std::size_t i = 0; i < p.dimension; ++i) {
    if (!(p.lower[i] <= p.upper[i])) return false;
  }
  return true;
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double a) { return std::isfinite(a); });
}

// Elastic l1 relaxation used for phase 1 and restoration:
//
//   min  sum(p + n + t) + zeta/2 * ||W (x - ref)||^2
//   s.t. c(x) - p + n = 0,  d(x) + t >= 0,  p, n, t >= 0, original bounds.
struct Elastic {
  ProblemDef problem;
  std::vector<double> start;
};

Elastic make_elastic(const ProblemDef& p, std::span<const double> ref,
                     std::span<const double> warm, double zeta, double push) {
  const std::size_t n = p.dimension, me = p.n_eq, mi = p.n_ineq;
  Elastic e;
  ProblemDef& q = e.problem;
  q.dimension = n + 2 * me + mi;
  q.n_eq = me;
  q.n_ineq = mi;
  q.lower = p.lower;
  q.upper = p.upper;
  q.lower.resize(q.dimension, 0.0);
  q.upper.resize(q.dimension, kInf);

  std::vector<double> r(ref.begin(), ref.end());
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = std::clamp(r[i], p.lower[i], p.upper[i]);
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / std::max(1.0, std::abs(r[i]));

  q.objective = [n, r, w, zeta, dim = q.dimension](std::span<const double> x,
                                                   std::span<double> g) {
    double val = 0.0;
    for (std::size_t i = n; i < dim; ++i) val += x[i];
    double prox = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = w[i] * (x[i] - r[i]);
      prox += d * d;
    }
    val += 0.5 * zeta * prox;
    if (!g.empty()) {
      for (std::size_t i = 0; i < n; ++i) g[i] = -zeta * w[i] * w[i] * (x[i] - r[i]);
      for (std::size_t i = n; i < dim; ++i) g[i] = -1.0;
    }
    return -val;
  };
  const ProblemDef* orig = &p;
  // The original problem outlives every elastic copy built from it.
  q.equalities = [orig, n, me, dim = q.dimension](std::span<const double> x,
                                                  std::span<double> c,
                                                  std::span<double> jac) {
    std::vector<double> jx;
    if (!jac.empty()) jx.assign(me * n, 0.0);
    orig->equalities(x.subspan(0, n), c, jx);
    for (std::size_t k = 0; k < me; ++k) c[k] += -x[n + k] + x[n + me + k];
    if (!jac.empty()) {
      std::fill(jac.begin(), jac.end(), 0.0);
      for (std::size_t k = 0; k < me; ++k) {
        std::copy(jx.begin() + k * n, jx.begin() + (k + 1) * n,
                  jac.begin() + k * dim);
        jac[k * dim + n + k] = -1.0;
        jac[k * dim + n + me + k] = 1.0;
      }
    }
  };
  q.inequalities = [orig, n, me, mi, dim = q.dimension](
                       std::span<const double> x, std::span<double> d,
                       std::span<double> jac) {
    std::vector<double> jx;
    if (!jac.empty()) jx.assign(mi * n, 0.0);
    orig->inequalities(x.subspan(0, n), d, jx);
    for (std::size_t k = 0; k < mi; ++k) d[k] += x[n + 2 * me + k];
    if (!jac.empty()) {
      std::fill(jac.begin(), jac.end(), 0.0);
      for (std::size_t k = 0; k < mi; ++k) {
        std::copy(jx.begin() + k * n, jx.begin() + (k + 1) * n,
                  jac.begin() + k * dim);
        jac[k * dim + n + 2 * me + k] = 1.0;
      }
    }
  };

  std::vector<double> x0(warm.begin(), warm.end());
  for (std::size_t i = 0; i < n; ++i) {
    x0[i] = std::clamp(x0[i], p.lower[i], p.upper[i]);
  }
  e.start.assign(q.dimension, 0.0);
  std::copy(x0.begin(), x0.end(), e.start.begin());
  std::vector<double> c(me), d(mi);
  if (me > 0) p.equalities(x0, c, {});
  if (mi > 0) p.inequalities(x0, d, {});
  for (std::size_t k = 0; k < me; ++k) {
    const double ck = std::isfinite(c[k]) ? c[k] : 0.0;
    e.start[n + k] = std::max(ck, 0.0) + push;
    e.start[n + me + k] = std::max(-ck, 0.0) + push;
  }
  for (std::size_t k = 0; k < mi; ++k) {
    const double dk = std::isfinite(d[k]) ? d[k] : 0.0;
    e.start[n + 2 * me + k] = std::max(-dk, 0.0) + push;
  }
  return e;
}

class InteriorPoint {
 public:
  InteriorPoint(const ProblemDef& p, const SolverOptions& o)
      : p_(p), opt_(o), n_(p.dimension), me_(p.n_eq), mi_(p.n_ineq) {}

  SolveResult run(std::span<const double> start, bool allow_restoration,
                  int iteration_budget);

 private:
  struct Eval {
    double f = 0.0;  // scaled minimisation objective
    VectorXd grad;
    VectorXd c, d;
    RowMat jc, jd;
  };

  struct Step {
    VectorXd dx, ds, dyc, dyd, dzl, dzu, dvs;
  };

  enum class Outcome { Continue, Converged, NeedRestoration, Failed };

  void setup(std::span<const double> start);
  std::vector<double> full(const VectorXd& xf) const;
  bool evaluate(const VectorXd& xf, Eval& e, bool derivs) const;
  void compute_scaling(const VectorXd& x0);

  VectorXd slack_lower(const VectorXd& x) const;
  VectorXd slack_upper(const VectorXd& x) const;
  double barrier_value(const Eval& e, const VectorXd& x,
                       const VectorXd& s) const;
  double infeasibility(const Eval& e, const VectorXd& s) const;
  double kkt_error(double mu) const;
  double unscaled_violation(const Eval& e) const;
  double unscaled_stationarity() const;
  VectorXd lagrangian_gradient(const Eval& e, const VectorXd& yc,
                               const VectorXd& yd) const;

  void hessian_fd();
  void hessian_bfgs_update(const VectorXd& dx, const Eval& old_eval);
  bool factorize(double& dw, double& dc);
  void solve_reduced(const VectorXd& rhs1, const VectorXd& rhs2,
                     VectorXd& dx, VectorXd& dyc) const;
  Step newton_step(const VectorXd& c_rhs, const VectorXd& dres_rhs) const;
  double max_step(const VectorXd& x, const VectorXd& dx, const VectorXd& s,
                  const VectorXd& ds, double tau) const;
  double max_dual_step(const Step& st, double tau) const;
  Outcome iterate();
  void reset_multipliers();
  bool restore(int& budget, SolveResult& out);
  SolveResult finish(SolveStatus st, std::string msg) const;

  const ProblemDef& p_;
  SolverOptions opt_;
  std::size_t n_, me_, mi_;
  std::size_t nf_ = 0;
  std::vector<std::size_t> free_;
  std::vector<double> base_;
  VectorXd lb_, ub_;
  std::vector<char> hl_, hu_;

  double fscale_ = 1.0;
  VectorXd cscale_, dscale_;

  VectorXd x_, s_, yc_, yd_, zl_, zu_, vs_;
  Eval ev_;
  double mu_ = 0.1;
  // Filter entries (infeasibility, barrier objective); reset with mu.
  std::vector<std::pair<double, double>> filter_;
  double theta_max_ = kInf;
  double theta_min_ = 0.0;
  MatrixXd w_;       // Lagrangian Hessian approximation
  MatrixXd bfgs_;    // persistent BFGS matrix
  bool bfgs_init_ = false;
  double dw_last_ = 0.0;

  // Current factorisation of the reduced KKT matrix.
  MatrixXd kkt_vecs_;
  VectorXd kkt_vals_;
  VectorXd kkt_scale_;  // symmetric equilibration, preserves inertia
  VectorXd sigma_x_, dd_;
  double dc_ = 0.0;

  int iter_ = 0;
  int acceptable_count_ = 0;
  int restorations_ = 0;
  std::chrono::steady_clock::time_point t0_;
};

struct ElasticOutcome {
  SolveStatus status = SolveStatus::NumericalFailure;
  std::vector<double> x;  // original variables only
  int iterations = 0;
  std::string message;
};

// Minimises the l1 violation near `ref`. The proximity weight starts large,
// which keeps the Newton steps well scaled on degenerate feasible manifolds,
// and is relaxed until the violation vanishes or the weight is exhausted.
ElasticOutcome elastic_phase(const ProblemDef& p, std::span<const double> ref,
                             const SolverOptions& opt, int budget) {
  ElasticOutcome out;
  out.x.assign(ref.begin(), ref.end());
  std::vector<double> warm = out.x;
  const double zetas[] = {1.0, 1e-2, opt.restoration_proximity};
  for (std::size_t k = 0; k < std::size(zetas); ++k) {
    const bool last = k + 1 == std::size(zetas);
    Elastic el = make_elastic(p, ref, warm, zetas[k], opt.bound_push);
    InteriorPoint ipm(el.problem, opt);
    SolveResult r = ipm.run(el.start, false, budget - out.iterations);
    out.iterations += r.iterations;
    std::vector<double> x(r.x.begin(), r.x.begin() + p.dimension);
    if (all_finite(x)) warm = x;
    if (r.status == SolveStatus::Optimal) {
      out.x = x;
      if (constraint_violation(p, x) <= opt.infeasibility_threshold) {
        out.status = SolveStatus::Optimal;
        return out;
      }
      if (last) {
        out.status = SolveStatus::Infeasible;
        out.message = "converged to a point of local infeasibility";
        return out;
      }
    } else if (last || r.status == SolveStatus::IterationLimit) {
      out.x = warm;
      out.status = r.status;
      out.message = "feasibility phase: " + r.message;
      return out;
    }
  }
  return out;
}

void InteriorPoint::setup(std::span<const double> start) {
  base_.assign(start.begin(), start.end());
  free_.clear();
  for (std::size_t i = 0; i < n_; ++i) {
    const double l = p_.lower[i], u = p_.upper[i];
    if (std::isfinite(l) && std::isfinite(u) &&
        u - l <= 1e-14 * std::max(1.0, std::abs(l))) {
      base_[i] = l;
    } else {
      free_.push_back(i);
    }
  }
  nf_ = free_.size();
  lb_.resize(nf_);
  ub_.resize(nf_);
  hl_.assign(nf_, 0);
  hu_.assign(nf_, 0);
  x_.resize(nf_);
  const double k1 = opt_.bound_push, k2 = opt_.bound_push;
  for (std::size_t k = 0; k < nf_; ++k) {
    const std::size_t i = free_[k];
    const double l = p_.lower[i], u = p_.upper[i];
    lb_[k] = l;
    ub_[k] = u;
    hl_[k] = std::isfinite(l) ? 1 : 0;
    hu_[k] = std::isfinite(u) ? 1 : 0;
    double v = std::isfinite(start[i]) ? start[i] : 0.0;
    if (hl_[k] && hu_[k]) {
      const double pl = std::min(k1 * std::max(1.0, std::abs(l)), k2 * (u - l));
      const double pu = std::min(k1 * std::max(1.0, std::abs(u)), k2 * (u - l));
      v = std::clamp(v, l + pl, u - pu);
    } else if (hl_[k]) {
      v = std::max(v, l + k1 * std::max(1.0, std::abs(l)));
    } else if (hu_[k]) {
      v = std::min(v, u - k1 * std::max(1.0, std::abs(u)));
    }
    x_[k] = v;
  }
}

std::vector<double> InteriorPoint::full(const VectorXd& xf) const {
  std::vector<double> x = base_;
  for (std::size_t k = 0; k < nf_; ++k) x[free_[k]] = xf[k];
  return x;
}

bool InteriorPoint::evaluate(const VectorXd& xf, Eval& e, bool derivs) const {
  const std::vector<double> x = full(xf);
  std::vector<double> g(derivs ? n_ : 0);
  const double f = p_.objective(x, g);
  if (!std::isfinite(f) || !all_finite(g)) return false;
  e.f = -fscale_ * f;
  if (derivs) {
    e.grad.resize(nf_);
    for (std::size_t k = 0; k < nf_; ++k) e.grad[k] = -fscale_ * g[free_[k]];
  }
  auto constraint = [&](const auto& fn, std::size_t m, const VectorXd& scale,
                        VectorXd& val, RowMat& jac) {
    std::vector<double> v(m), j(derivs ? m * n_ : 0);
    if (m > 0) fn(x, v, j);
    if (!all_finite(v) || !all_finite(j)) return false;
    val.resize(static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < m; ++r) val[r] = scale[r] * v[r];
    if (derivs) {
      jac.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(nf_));
      for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t k = 0; k < nf_; ++k) {
          jac(r, k) = scale[r] * j[r * n_ + free_[k]];
        }
      }
    }
    return true;
  };
  if (!constraint(p_.equalities, me_, cscale_, e.c, e.jc)) return false;
  if (!constraint(p_.inequalities, mi_, dscale_, e.d, e.jd)) return false;
  return true;
}

void InteriorPoint::compute_scaling(const VectorXd& x0) {
  // Gradient-based scaling: no row or objective gradient exceeds 100.
  fscale_ = 1.0;
  cscale_ = VectorXd::Ones(me_);
  dscale_ = VectorXd::Ones(mi_);
  Eval e;
  if (!evaluate(x0, e, true)) return;
  const double gmax = e.grad.size() ? e.grad.lpNorm<Eigen::Infinity>() : 0.0;
  if (gmax > 100.0) fscale_ = 100.0 / gmax;
  for (std::size_t r = 0; r < me_; ++r) {
    const double m = e.jc.row(r).lpNorm<Eigen::Infinity>();
    if (m > 100.0) cscale_[r] = 100.0 / m;
  }
  for (std::size_t r = 0; r < mi_; ++r) {
    const double m = e.jd.row(r).lpNorm<Eigen::Infinity>();
    if (m > 100.0) dscale_[r] = 100.0 / m;
  }
}

VectorXd InteriorPoint::slack_lower(const VectorXd& x) const {
  VectorXd sl = VectorXd::Ones(nf_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) sl[k] = x[k] - lb_[k];
  }
  return sl;
}

VectorXd InteriorPoint::slack_upper(const VectorXd& x) const {
  VectorXd su = VectorXd::Ones(nf_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hu_[k]) su[k] = ub_[k] - x[k];
  }
  return su;
}

double InteriorPoint::barrier_value(const Eval& e, const VectorXd& x,
                                    const VectorXd& s) const {
  double b = 0.0;
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) b += std::log(x[k] - lb_[k]);
    if (hu_[k]) b += std::log(ub_[k] - x[k]);
  }
  for (Eigen::Index j = 0; j < s.size(); ++j) b += std::log(s[j]);
  return e.f - mu_ * b;
}

double InteriorPoint::infeasibility(const Eval& e, const VectorXd& s) const {
  double t = e.c.lpNorm<1>();
  if (mi_ > 0) t += (e.d - s).lpNorm<1>();
  return t;
}

VectorXd InteriorPoint::lagrangian_gradient(const Eval& e, const VectorXd& yc,
                                            const VectorXd& yd) const {
  VectorXd g = e.grad;
  if (me_ > 0) g.noalias() += e.jc.transpose() * yc;
  if (mi_ > 0) g.noalias() += e.jd.transpose() * yd;
  return g;
}

double InteriorPoint::kkt_error(double mu) const {
  const VectorXd dual = lagrangian_gradient(ev_, yc_, yd_) - zl_ + zu_;
  double dual_inf = dual.size() ? dual.lpNorm<Eigen::Infinity>() : 0.0;
  if (mi_ > 0) {
    dual_inf = std::max(dual_inf, (-yd_ - vs_).lpNorm<Eigen::Infinity>());
  }
  double primal = me_ > 0 ? ev_.c.lpNorm<Eigen::Infinity>() : 0.0;
  if (mi_ > 0) primal = std::max(primal, (ev_.d - s_).lpNorm<Eigen::Infinity>());

  const VectorXd sl = slack_lower(x_), su = slack_upper(x_);
  double compl_err = 0.0;
  double zsum = 0.0;
  std::size_t zcount = 0;
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) {
      compl_err = std::max(compl_err, std::abs(zl_[k] * sl[k] - mu));
      zsum += std::abs(zl_[k]);
      ++zcount;
    }
    if (hu_[k]) {
      compl_err = std::max(compl_err, std::abs(zu_[k] * su[k] - mu));
      zsum += std::abs(zu_[k]);
      ++zcount;
    }
  }
  for (std::size_t j = 0; j < mi_; ++j) {
    compl_err = std::max(compl_err, std::abs(vs_[j] * s_[j] - mu));
    zsum += std::abs(vs_[j]);
    ++zcount;
  }
  const double ysum = (me_ ? yc_.lpNorm<1>() : 0.0) + (mi_ ? yd_.lpNorm<1>() : 0.0);
  const double smax = 100.0;
  const std::size_t cnt = me_ + mi_ + zcount;
  const double sd =
      cnt ? std::max(smax, (ysum + zsum) / static_cast<double>(cnt)) / smax : 1.0;
  const double sc =
      zcount ? std::max(smax, zsum / static_cast<double>(zcount)) / smax : 1.0;
  return std::max({dual_inf / sd, primal, compl_err / sc});
}

double InteriorPoint::unscaled_violation(const Eval& e) const {
  double v = 0.0;
  for (std::size_t r = 0; r < me_; ++r) {
    v = std::max(v, std::abs(e.c[r] / cscale_[r]));
  }
  for (std::size_t r = 0; r < mi_; ++r) {
    v = std::max(v, -e.d[r] / dscale_[r]);
  }
  return v;
}

double InteriorPoint::unscaled_stationarity() const {
  const VectorXd dual = lagrangian_gradient(ev_, yc_, yd_) - zl_ + zu_;
  const double d = dual.size() ? dual.lpNorm<Eigen::Infinity>() : 0.0;
  const double ysum = (me_ ? yc_.lpNorm<1>() : 0.0) + (mi_ ? yd_.lpNorm<1>() : 0.0) +
                      zl_.lpNorm<1>() + zu_.lpNorm<1>() +
                      (mi_ ? vs_.lpNorm<1>() : 0.0);
  const std::size_t cnt = me_ + 2 * mi_ + 2 * nf_;
  const double sd =
      cnt ? std::max(100.0, ysum / static_cast<double>(cnt)) / 100.0 : 1.0;
  return d / sd / fscale_;
}

void InteriorPoint::hessian_fd() {
  const VectorXd g0 = lagrangian_gradient(ev_, yc_, yd_);
  w_.resize(nf_, nf_);
  Eval e;
  for (std::size_t k = 0; k < nf_; ++k) {
    double h = 1.4901161193847656e-8 * std::max(1.0, std::abs(x_[k]));
    VectorXd xp = x_;
    xp[k] += h;
    if (!evaluate(xp, e, true)) {
      h = -h;
      xp[k] = x_[k] + h;
      if (!evaluate(xp, e, true)) {
        w_.col(k).setZero();
        continue;
      }
    }
    w_.col(k) = (lagrangian_gradient(e, yc_, yd_) - g0) / h;
  }
  const MatrixXd sym = 0.5 * (w_ + w_.transpose());
  w_ = sym;
}

void InteriorPoint::hessian_bfgs_update(const VectorXd& dx,
                                        const Eval& old_eval) {
  const VectorXd y = lagrangian_gradient(ev_, yc_, yd_) -
                     lagrangian_gradient(old_eval, yc_, yd_);
  const VectorXd bs = bfgs_ * dx;
  const double sbs = dx.dot(bs);
  if (!(sbs > 1e-16)) return;
  double sy = dx.dot(y);
  VectorXd r = y;
  if (sy < 0.2 * sbs) {
    const double theta = 0.8 * sbs / (sbs - sy);
    r = theta * y + (1.0 - theta) * bs;
    sy = dx.dot(r);
  }
  if (!(sy > 1e-16)) return;
  bfgs_ += r * r.transpose() / sy - bs * bs.transpose() / sbs;
}

bool InteriorPoint::factorize(double& dw, double& dc) {
  const VectorXd sl = slack_lower(x_), su = slack_upper(x_);
  sigma_x_ = VectorXd::Zero(nf_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) sigma_x_[k] += zl_[k] / sl[k];
    if (hu_[k]) sigma_x_[k] += zu_[k] / su[k];
  }
  const Eigen::Index nt = static_cast<Eigen::Index>(nf_ + me_);
  auto build = [&](double dwt, double dct) {
    dd_.resize(mi_);
    for (std::size_t j = 0; j < mi_; ++j) {
      const double sigma_s = vs_[j] / s_[j];
      dd_[j] = 1.0 / (1.0 / sigma_s + dct);
    }
    MatrixXd k = MatrixXd::Zero(nt, nt);
    MatrixXd h = w_;
    h.diagonal() += sigma_x_;
    h.diagonal().array() += dwt;
    if (mi_ > 0) h.noalias() += ev_.jd.transpose() * dd_.asDiagonal() * ev_.jd;
    k.topLeftCorner(nf_, nf_) = h;
    if (me_ > 0) {
      k.bottomLeftCorner(me_, nf_) = ev_.jc;
      k.topRightCorner(nf_, me_) = ev_.jc.transpose();
      k.bottomRightCorner(me_, me_).diagonal().array() = -dct;
    }
    // Barrier terms can put 1e12 on the diagonal; scaling to unit diagonal
    // keeps the small eigenvalues, and with them the inertia, resolvable.
    kkt_scale_ = VectorXd::Ones(nt);
    for (Eigen::Index i = 0; i < nt; ++i) {
      const double d = std::abs(k(i, i));
      if (d > 1.0) kkt_scale_[i] = 1.0 / std::sqrt(d);
    }
    k = kkt_scale_.asDiagonal() * k * kkt_scale_.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(k);
    if (es.info() != Eigen::Success) return -1;
    kkt_vals_ = es.eigenvalues();
    kkt_vecs_ = es.eigenvectors();
    const double scale = std::max(1.0, kkt_vals_.cwiseAbs().maxCoeff());
    std::size_t pos = 0, neg = 0, zero = 0;
    for (Eigen::Index i = 0; i < kkt_vals_.size(); ++i) {
      const double l = kkt_vals_[i];
      if (!std::isfinite(l)) return -1;
      if (std::abs(l) <= 1e-13 * scale) {
        ++zero;
      } else if (l > 0) {
        ++pos;
      } else {
        ++neg;
      }
    }
    if (zero > 0) return 1;
    return (pos == nf_ && neg == me_) ? 0 : 2;
  };

  dw = 0.0;
  dc = 0.0;
  int r = build(dw, dc);
  if (r < 0) return false;
  if (r == 1 && me_ > 0) {
    dc = 1e-8 * std::pow(mu_, 0.25);
    r = build(dw, dc);
    if (r < 0) return false;
  }
  if (r == 0) {
    dc_ = dc;
    return true;
  }
  dw = dw_last_ == 0.0 ? 1e-4 : std::max(1e-20, dw_last_ / 3.0);
  const bool first = dw_last_ == 0.0;
  while (dw <= 1e40) {
    r = build(dw, dc);
    if (r < 0) return false;
    if (r == 1 && me_ > 0 && dc == 0.0) {
      dc = 1e-8 * std::pow(mu_, 0.25);
      continue;
    }
    if (r == 0) {
      dw_last_ = dw;
      dc_ = dc;
      return true;
    }
    dw *= first ? 100.0 : 8.0;
  }
  return false;
}

void InteriorPoint::solve_reduced(const VectorXd& rhs1, const VectorXd& rhs2,
                                  VectorXd& dx, VectorXd& dyc) const {
  VectorXd rhs(nf_ + me_);
  rhs << rhs1, rhs2;
  VectorXd t = kkt_vecs_.transpose() * kkt_scale_.cwiseProduct(rhs);
  t.array() /= kkt_vals_.array();
  const VectorXd sol = kkt_scale_.cwiseProduct(kkt_vecs_ * t);
  dx = sol.head(nf_);
  dyc = sol.tail(me_);
}

// Newton direction for the barrier subproblem. `c_rhs` and `dres_rhs` are the
// equality and inequality residuals being driven to zero (the current ones
// for a normal step, corrected ones for a second-order correction).
InteriorPoint::Step InteriorPoint::newton_step(const VectorXd& c_rhs,
                                               const VectorXd& dres_rhs) const {
  const VectorXd sl = slack_lower(x_), su = slack_upper(x_);
  VectorXd rx = -lagrangian_gradient(ev_, yc_, yd_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) rx[k] += mu_ / sl[k];
    if (hu_[k]) rx[k] -= mu_ / su[k];
  }
  Step st;
  VectorXd rs(mi_), r3(mi_);
  for (std::size_t j = 0; j < mi_; ++j) {
    rs[j] = mu_ / s_[j] + yd_[j];
    const double sigma_s = vs_[j] / s_[j];
    r3[j] = -dres_rhs[j] + rs[j] / sigma_s;
  }
  VectorXd rhs1 = rx;
  if (mi_ > 0) rhs1.noalias() += ev_.jd.transpose() * (dd_.cwiseProduct(r3));
  solve_reduced(rhs1, -c_rhs, st.dx, st.dyc);
  st.dyd.resize(mi_);
  st.ds.resize(mi_);
  st.dvs.resize(mi_);
  if (mi_ > 0) {
    const VectorXd jdx = ev_.jd * st.dx;
    for (std::size_t j = 0; j < mi_; ++j) {
      st.dyd[j] = dd_[j] * (jdx[j] - r3[j]);
      const double sigma_s = vs_[j] / s_[j];
      st.ds[j] = (st.dyd[j] + rs[j]) / sigma_s;
      st.dvs[j] = (mu_ - vs_[j] * s_[j]) / s_[j] - sigma_s * st.ds[j];
    }
  }
  st.dzl = VectorXd::Zero(nf_);
  st.dzu = VectorXd::Zero(nf_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) {
      st.dzl[k] = (mu_ - zl_[k] * sl[k]) / sl[k] - zl_[k] / sl[k] * st.dx[k];
    }
    if (hu_[k]) {
      st.dzu[k] = (mu_ - zu_[k] * su[k]) / su[k] + zu_[k] / su[k] * st.dx[k];
    }
  }
  return st;
}

double InteriorPoint::max_step(const VectorXd& x, const VectorXd& dx,
                               const VectorXd& s, const VectorXd& ds,
                               double tau) const {
  double a = 1.0;
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k] && dx[k] < 0) a = std::min(a, -tau * (x[k] - lb_[k]) / dx[k]);
    if (hu_[k] && dx[k] > 0) a = std::min(a, tau * (ub_[k] - x[k]) / dx[k]);
  }
  for (std::size_t j = 0; j < mi_; ++j) {
    if (ds[j] < 0) a = std::min(a, -tau * s[j] / ds[j]);
  }
  return a;
}

double InteriorPoint::max_dual_step(const Step& st, double tau) const {
  double a = 1.0;
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k] && st.dzl[k] < 0) a = std::min(a, -tau * zl_[k] / st.dzl[k]);
    if (hu_[k] && st.dzu[k] < 0) a = std::min(a, -tau * zu_[k] / st.dzu[k]);
  }
  for (std::size_t j = 0; j < mi_; ++j) {
    if (st.dvs[j] < 0) a = std::min(a, -tau * vs_[j] / st.dvs[j]);
  }
  return a;
}

void InteriorPoint::reset_multipliers() {
  yc_ = VectorXd::Zero(me_);
  yd_ = VectorXd::Zero(mi_);
  zl_ = VectorXd::Zero(nf_);
  zu_ = VectorXd::Zero(nf_);
  vs_ = VectorXd::Ones(mi_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) zl_[k] = 1.0;
    if (hu_[k]) zu_[k] = 1.0;
  }
  filter_.clear();
  acceptable_count_ = 0;
  bfgs_init_ = false;
}

InteriorPoint::Outcome InteriorPoint::iterate() {
  // Convergence checks on the current iterate.
  const double err0 = kkt_error(0.0);
  const double viol = unscaled_violation(ev_);
  const double stat = unscaled_stationarity();
  if (err0 <= opt_.tol && viol <= opt_.constr_viol_tol &&
      stat <= opt_.stationarity_tol) {
    return Outcome::Converged;
  }
  if (err0 <= opt_.acceptable_tol && viol <= opt_.acceptable_constr_viol_tol &&
      stat <= opt_.stationarity_tol) {
    if (++acceptable_count_ >= opt_.acceptable_iter) return Outcome::Converged;
  } else {
    acceptable_count_ = 0;
  }

  // Monotone barrier update.
  const double mu_min = opt_.tol / 10.0;
  while (mu_ > mu_min && kkt_error(mu_) <= 10.0 * mu_) {
    mu_ = std::max(mu_min, std::min(0.2 * mu_, std::pow(mu_, 1.5)));
    filter_.clear();
  }

  if (opt_.hessian == HessianApproximation::FiniteDifference) {
    hessian_fd();
  } else {
    if (!bfgs_init_) {
      bfgs_ = MatrixXd::Identity(nf_, nf_);
      bfgs_init_ = true;
    }
    w_ = bfgs_;
  }

  double dw = 0.0, dc = 0.0;
  if (!factorize(dw, dc)) {
    return Outcome::NeedRestoration;
  }

  const VectorXd dres = mi_ > 0 ? VectorXd(ev_.d - s_) : VectorXd(0);
  Step st = newton_step(ev_.c, dres);
  if (!st.dx.allFinite() || !st.ds.allFinite()) return Outcome::NeedRestoration;

  const double tau = std::max(0.99, 1.0 - mu_);
  const double alpha_max = max_step(x_, st.dx, s_, st.ds, tau);

  // Filter line search on (infeasibility, barrier objective).
  const VectorXd sl = slack_lower(x_), su = slack_upper(x_);
  double dphi = st.dx.dot(ev_.grad);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) dphi -= mu_ / sl[k] * st.dx[k];
    if (hu_[k]) dphi += mu_ / su[k] * st.dx[k];
  }
  for (std::size_t j = 0; j < mi_; ++j) dphi -= mu_ / s_[j] * st.ds[j];
  const double theta0 = infeasibility(ev_, s_);
  const double phi0 = barrier_value(ev_, x_, s_);
  const double slop = 10.0 * std::numeric_limits<double>::epsilon() *
                      std::max(1.0, std::abs(phi0));

  double alpha_min = kGammaTheta;
  if (dphi < 0.0) {
    alpha_min = std::min(alpha_min, kGammaPhi * theta0 / -dphi);
    if (theta0 <= theta_min_) {
      alpha_min = std::min(alpha_min, std::pow(theta0, kSTheta) /
                                          std::pow(-dphi, kSPhi));
    }
  }
  alpha_min = std::max(kAlphaMin, kGammaAlpha * alpha_min);

  auto switching = [&](double alpha) {
    return dphi < 0.0 &&
           alpha * std::pow(-dphi, kSPhi) > std::pow(theta0, kSTheta);
  };
  // Returns 0 for rejection, 1 for an objective-type step and 2 for a step
  // that extends the filter.
  auto acceptable = [&](double alpha, double theta, double phi) -> int {
    if (!std::isfinite(theta) || !std::isfinite(phi)) return 0;
    if (theta > theta_max_) return 0;
    for (const auto& [ft, fp] : filter_) {
      if (theta >= ft && phi >= fp) return 0;
    }
    if (switching(alpha) && theta0 <= theta_min_) {
      return phi <= phi0 + kArmijo * alpha * dphi + slop ? 1 : 0;
    }
    if (theta <= (1.0 - kGammaTheta) * theta0 ||
        phi <= phi0 - kGammaPhi * theta0 + slop) {
      return 2;
    }
    return 0;
  };

  Eval trial;
  VectorXd xt, stt;
  double alpha = alpha_max;
  int kind = 0;
  Step used = st;
  double alpha_used = alpha;
  for (int tries = 0; alpha >= alpha_min; ++tries) {
    xt = x_ + alpha * st.dx;
    stt = s_ + alpha * st.ds;
    if (evaluate(xt, trial, false)) {
      const double theta_t = infeasibility(trial, stt);
      kind = acceptable(alpha, theta_t, barrier_value(trial, xt, stt));
      if (kind) {
        alpha_used = alpha;
        break;
      }
      // Second-order correction on the first trial point.
      if (tries == 0 && theta_t >= theta0 && theta0 > 0.0) {
        VectorXd c_soc = alpha * ev_.c + trial.c;
        VectorXd d_soc = mi_ > 0 ? VectorXd(alpha * (ev_.d - s_) + (trial.d - stt))
                                 : VectorXd(0);
        Step soc = newton_step(c_soc, d_soc);
        if (soc.dx.allFinite() && soc.ds.allFinite()) {
          const double a_soc = max_step(x_, soc.dx, s_, soc.ds, tau);
          VectorXd xs = x_ + a_soc * soc.dx;
          VectorXd ss = s_ + a_soc * soc.ds;
          Eval es;
          if (evaluate(xs, es, false)) {
            kind = acceptable(alpha, infeasibility(es, ss),
                              barrier_value(es, xs, ss));
            if (kind) {
              used = soc;
              alpha_used = a_soc;
              xt = xs;
              stt = ss;
              break;
            }
          }
        }
      }
    }
    alpha *= 0.5;
  }
  const bool accepted = kind != 0;
  if (kind == 2) {
    filter_.emplace_back((1.0 - kGammaTheta) * theta0,
                         phi0 - kGammaPhi * theta0);
  }
  if (!accepted) return Outcome::NeedRestoration;

  const Eval old = ev_;
  const VectorXd step_x = xt - x_;
  const double alpha_z = max_dual_step(used, tau);
  x_ = xt;
  s_ = stt;
  yc_ += alpha_used * used.dyc;
  yd_ += alpha_used * used.dyd;
  zl_ += alpha_z * used.dzl;
  zu_ += alpha_z * used.dzu;
  vs_ += alpha_z * used.dvs;
  if (!evaluate(x_, ev_, true)) return Outcome::Failed;

  // Keep bound multipliers within a factor of the central path.
  const VectorXd sl2 = slack_lower(x_), su2 = slack_upper(x_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) {
      zl_[k] = std::clamp(zl_[k], mu_ / (kMultiplierSafeguard * sl2[k]),
                          kMultiplierSafeguard * mu_ / sl2[k]);
    }
    if (hu_[k]) {
      zu_[k] = std::clamp(zu_[k], mu_ / (kMultiplierSafeguard * su2[k]),
                          kMultiplierSafeguard * mu_ / su2[k]);
    }
  }
  for (std::size_t j = 0; j < mi_; ++j) {
    vs_[j] = std::clamp(vs_[j], mu_ / (kMultiplierSafeguard * s_[j]),
                        kMultiplierSafeguard * mu_ / s_[j]);
  }
  if (opt_.hessian == HessianApproximation::DampedBfgs) {
    hessian_bfgs_update(step_x, old);
  }
  return Outcome::Continue;
}

SolveResult InteriorPoint::finish(SolveStatus st, std::string msg) const {
  SolveResult r;
  r.status = st;
  r.x = full(x_);
  std::vector<double> g;
  r.objective = p_.objective(r.x, g);
  r.constraint_violation = constraint_violation(p_, r.x);
  r.stationarity = unscaled_stationarity();
  r.iterations = iter_;
  r.message = std::move(msg);
  r.wall_seconds = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - t0_)
                       .count();
  return r;
}

bool InteriorPoint::restore(int& budget, SolveResult& out) {
  if (restorations_ >= opt_.max_restorations) {
    out = finish(SolveStatus::NumericalFailure, "restoration limit reached");
    return false;
  }
  ++restorations_;
  const std::vector<double> cur = full(x_);
  ElasticOutcome el = elastic_phase(p_, cur, opt_, budget);
  iter_ += el.iterations;
  budget -= el.iterations;
  if (el.status != SolveStatus::Optimal) {
    if (el.status == SolveStatus::Infeasible) {
      for (std::size_t k = 0; k < nf_; ++k) x_[k] = el.x[free_[k]];
      evaluate(x_, ev_, true);
    }
    out = finish(el.status, el.message);
    return false;
  }
  const std::vector<double>& xr = el.x;
  for (std::size_t k = 0; k < nf_; ++k) {
    double v = xr[free_[k]];
    const double eps = 1e-10 * std::max(1.0, std::abs(v));
    if (hl_[k]) v = std::max(v, lb_[k] + eps);
    if (hu_[k]) v = std::min(v, ub_[k] - eps);
    x_[k] = v;
  }
  if (!evaluate(x_, ev_, true)) {
    out = finish(SolveStatus::NumericalFailure, "non-finite after restoration");
    return false;
  }
  for (std::size_t j = 0; j < mi_; ++j) s_[j] = std::max(ev_.d[j], mu_);
  reset_multipliers();
  const VectorXd sl = slack_lower(x_), su = slack_upper(x_);
  for (std::size_t k = 0; k < nf_; ++k) {
    if (hl_[k]) zl_[k] = mu_ / sl[k];
    if (hu_[k]) zu_[k] = mu_ / su[k];
  }
  for (std::size_t j = 0; j < mi_; ++j) vs_[j] = mu_ / s_[j];
  return true;
}

SolveResult InteriorPoint::run(std::span<const double> start,
                               bool allow_restoration, int budget) {
  t0_ = std::chrono::steady_clock::now();
  setup(start);
  compute_scaling(x_);
  if (!evaluate(x_, ev_, true)) {
    return finish(SolveStatus::NumericalFailure,
                  "non-finite values at the starting point");
  }
  s_.resize(mi_);
  for (std::size_t j = 0; j < mi_; ++j) {
    s_[j] = std::max(ev_.d[j], opt_.bound_push);
  }
  mu_ = opt_.mu_init;
  reset_multipliers();
  const double theta_start = std::max(1.0, infeasibility(ev_, s_));
  theta_max_ = 1e4 * theta_start;
  theta_min_ = 1e-4 * theta_start;

  std::vector<double> theta_hist;
  while (true) {
    if (iter_ >= budget) {
      return finish(SolveStatus::IterationLimit, "iteration limit reached");
    }
    Outcome o = iterate();
    // Infeasibility that stops shrinking is handed to the elastic phase,
    // which decides between a feasible restart and local infeasibility.
    if (o == Outcome::Continue && allow_restoration) {
      theta_hist.push_back(infeasibility(ev_, s_));
      const std::size_t h = theta_hist.size();
      constexpr std::size_t kWindow = 20;
      if (h > kWindow && theta_hist.back() > theta_min_ &&
          theta_hist.back() > 0.9 * theta_hist[h - 1 - kWindow]) {
        o = Outcome::NeedRestoration;
      }
    }
    if (o == Outcome::Converged) return finish(SolveStatus::Optimal, "");
    if (o == Outcome::Failed) {
      return finish(SolveStatus::NumericalFailure, "non-finite evaluation");
    }
    if (o == Outcome::NeedRestoration) {
      if (!allow_restoration) {
        return finish(SolveStatus::NumericalFailure, "line search failed");
      }
      // A stalled line search at a nearly optimal point is accepted.
      if (kkt_error(0.0) <= opt_.acceptable_tol &&
          unscaled_violation(ev_) <= opt_.acceptable_constr_viol_tol &&
          unscaled_stationarity() <= opt_.stationarity_tol) {
        return finish(SolveStatus::Optimal, "accepted at stalled line search");
      }
      int remaining = budget - iter_;
      SolveResult out;
      if (!restore(remaining, out)) return out;
      theta_hist.clear();
      continue;
    }
    ++iter_;
  }
}

}  // namespace

double constraint_violation(const ProblemDef& p, std::span<const double> x) {
  double v = 0.0;
  std::vector<double> c(p.n_eq), d(p.n_ineq);
  if (p.n_eq > 0) p.equalities(x, c, {});
  if (p.n_ineq > 0) p.inequalities(x, d, {});
  for (double a : c) v = std::max(v, std::isfinite(a) ? std::abs(a) : kInf);
  for (double a : d) v = std::max(v, std::isfinite(a) ? -a : kInf);
  for (std::size_t i = 0; i < p.dimension; ++i) {
    v = std::max(v, p.lower[i] - x[i]);
    v = std::max(v, x[i] - p.upper[i]);
  }
  return v;
}

SolveResult solve(const ProblemDef& problem, std::span<const double> start,
                  const SolverOptions& options) {
  check_problem(problem, start.size());
  if (!bounds_consistent(problem)) {
    SolveResult r;
    r.status = SolveStatus::Infeasible;
    r.x.assign(start.begin(), start.end());
    r.constraint_violation = constraint_violation(problem, r.x);
    r.message = "empty variable bounds";
    return r;
  }
  InteriorPoint ipm(problem, options);
  return ipm.run(start, true, options.max_iter);
}

SolveResult find_feasible(const ProblemDef& problem,
                          std::span<const double> start,
                          const SolverOptions& options) {
  check_problem(problem, start.size());
  ProblemDef zero = problem;
  zero.objective = [](std::span<const double>, std::span<double> g) {
    std::fill(g.begin(), g.end(), 0.0);
    return 0.0;
  };
  if (!bounds_consistent(problem)) return solve(zero, start, options);

  const auto t0 = std::chrono::steady_clock::now();
  ElasticOutcome el = elastic_phase(zero, start, options, options.max_iter);
  if (el.status != SolveStatus::Optimal) {
    SolveResult r;
    r.status = el.status;
    r.x = el.x;
    r.constraint_violation = constraint_violation(zero, el.x);
    r.iterations = el.iterations;
    r.message = el.message;
    r.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    return r;
  }

  // A constant objective leaves the solution set degenerate, so the polish
  // projects the elastic point onto the feasible set instead. Any feasible
  // point is optimal for the zero objective.
  ProblemDef proj = zero;
  const std::vector<double> anchor = el.x;
  proj.objective = [anchor](std::span<const double> x, std::span<double> g) {
    double f = 0.0;
    for (std::size_t i = 0; i < anchor.size(); ++i) {
      const double w = 1.0 / std::max(1.0, std::abs(anchor[i]));
      const double d = w * (x[i] - anchor[i]);
      f -= 0.5 * d * d;
      if (!g.empty()) g[i] = -w * d;
    }
    return f;
  };
  SolverOptions polish = options;
  polish.max_iter = std::max(1, options.max_iter - el.iterations);
  SolveResult r = solve(proj, el.x, polish);
  r.iterations += el.iterations;
  r.objective = 0.0;
  r.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return r;
}

}  // namespace opfx

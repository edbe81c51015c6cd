#include "conic_alm/alm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "conic_alm/auglag.hpp"
#include "conic_alm/symcone.hpp"

namespace conic_alm {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void require_finite(const Eigen::VectorXd& v, const char* what) {
  if (!v.allFinite()) throw std::runtime_error(std::string("alm: non-finite ") + what);
}

std::string uncertified_warning(int k, const InnerResult& inner, bool a, bool b) {
  std::ostringstream os;
  os << "k=" << k << ": inner solve not certified (" << inner.status
     << ", gap=" << inner.gap_upper_bound << ", A'=" << (a ? "pass" : "fail")
     << ", B'=" << (b ? "pass" : "fail") << "); continuing with best iterate";
  return os.str();
}

InnerOptions make_inner_options(const AlmConfig& cfg, double tol) {
  InnerOptions o;
  o.tol = tol;
  o.max_iter = cfg.inner_max_iter;
  return o;
}

}  // namespace

void AlmConfig::validate() const {
  auto fail = [](const char* what) { throw std::invalid_argument(std::string("AlmConfig: ") + what); };
  if (!(r0 > 0.0)) fail("r0 must be positive");
  if (!(r_growth >= 1.0)) fail("r_growth must be >= 1");
  if (!(r_max >= r0)) fail("r_max must be >= r0");
  if (!(eps0 >= 0.0) || !(delta0 >= 0.0)) fail("eps0 and delta0 must be nonnegative");
  if (!(decay > 0.0 && decay < 1.0)) fail("decay must lie in (0, 1)");
  if (max_outer < 1) fail("max_outer must be positive");
  if (!(stop_eps3 > 0.0)) fail("stop_eps3 must be positive");
  if (inner_max_iter < 1) fail("inner_max_iter must be positive");
}

double AlmConfig::r_at(int k) const { return std::min(r0 * std::pow(r_growth, k), r_max); }
double AlmConfig::eps_at(int k) const { return eps0 * std::pow(decay, k); }
double AlmConfig::delta_at(int k) const { return delta0 * std::pow(decay, k); }

const char* to_string(AlmForm form) {
  switch (form) {
    case AlmForm::primal: return "primal";
    case AlmForm::dual: return "dual";
    case AlmForm::ineq: return "ineq";
  }
  return "unknown";
}

SdpOracle oracle_of(const KnownSolutionInstance& inst) {
  return {inst.x_star, inst.w_star(), inst.p_star};
}

void AlmTrace::append(IterationRecord rec) {
  if (!records.empty() && rec.k <= records.back().k) {
    throw std::logic_error("AlmTrace: iteration index must increase");
  }
  records.push_back(std::move(rec));
}

AlmTrace solve_primal_alm(const SdpProblem& p, const DualPoint& w0, const AlmConfig& cfg,
                          const std::optional<SdpOracle>& oracle,
                          const std::optional<SymMatrix>& x0) {
  cfg.validate();
  if (w0.y.size() != p.m() || w0.Z.dim() != p.n()) {
    throw std::invalid_argument("solve_primal_alm: starting multiplier has wrong dimensions");
  }
  if (!is_psd(w0.Z)) throw std::invalid_argument("solve_primal_alm: Z0 must be PSD");
  const auto t0 = Clock::now();

  AlmTrace trace;
  trace.form = AlmForm::primal;
  trace.problem_name = p.name();
  trace.y0 = w0.y;
  trace.Z0 = w0.Z;
  trace.X0 = x0 ? *x0 : SymMatrix(p.n());

  const double data_norm = p.b().norm() + p.C().norm();
  DualPoint w = w0;
  Eigen::VectorXd x = trace.X0->svec();
  std::optional<double> p_star, d_star;
  if (oracle) p_star = d_star = oracle->p_star;

  for (int k = 0; k < cfg.max_outer; ++k) {
    const double r = cfg.r_at(k), eps = cfg.eps_at(k), delta = cfg.delta_at(k);
    const PrimalSubproblem sub(p, w, r);
    InnerOptions opts = make_inner_options(cfg, eps * eps / (2.0 * r));
    opts.diameter = [&](const Eigen::VectorXd& v) {
      return cfg.diameter > 0.0 ? cfg.diameter : 2.0 * (1.0 + v.norm() + data_norm);
    };
    opts.accept = [&](const Eigen::VectorXd& v, double gap) {
      const DualPoint next = primal_multiplier_update(p, SymMatrix::from_svec(v, p.n()), w, r);
      const double step = distance(next, w);
      return gap <= delta * delta * step * step / (2.0 * r);
    };
    const InnerResult inner =
        minimize_auglag([&sub](const Eigen::VectorXd& v, Eigen::VectorXd* g) { return sub(v, g); },
                        x, opts);
    require_finite(inner.x, "primal iterate");
    x = inner.x;

    IterationRecord rec;
    rec.k = k + 1;
    rec.X = SymMatrix::from_svec(x, p.n());
    const DualPoint next = primal_multiplier_update(p, *rec.X, w, r);
    require_finite(next.y, "multiplier");
    rec.step_norm = distance(next, w);
    rec.r = r;
    rec.eps = eps;
    rec.delta = delta;
    rec.inner_iterations = inner.iterations;
    rec.inner_status = inner.status;
    rec.gap_certificate = inner.gap_upper_bound;
    rec.criterion_a = check_criterion_A(inner, eps, r);
    rec.criterion_b = check_criterion_B(inner, delta, r, rec.step_norm);
    if (!(rec.criterion_a && rec.criterion_b)) {
      trace.warnings.push_back(uncertified_warning(rec.k, inner, rec.criterion_a, rec.criterion_b));
    }
    if (oracle) {
      rec.dist_primal = (*rec.X - oracle->x_star).norm();
      rec.dist_dual_prev = distance(w, oracle->w_star);
      rec.dist_dual = distance(next, oracle->w_star);
    }
    rec.residuals = kkt_residuals(p, *rec.X, next, p_star, d_star);
    rec.y = next.y;
    rec.Z = next.Z;
    w = next;
    const bool done = rec.residuals.eps3 <= cfg.stop_eps3;
    trace.append(std::move(rec));
    if (done) {
      trace.converged = true;
      break;
    }
  }
  trace.wall_seconds = seconds_since(t0);
  return trace;
}

AlmTrace solve_dual_alm(const SdpProblem& p, const SymMatrix& x0, const AlmConfig& cfg,
                        const std::optional<SdpOracle>& oracle,
                        const std::optional<Eigen::VectorXd>& y0) {
  cfg.validate();
  if (x0.dim() != p.n()) throw std::invalid_argument("solve_dual_alm: X0 has wrong dimension");
  if (!is_psd(x0)) throw std::invalid_argument("solve_dual_alm: X0 must be PSD");
  if (y0 && y0->size() != p.m()) throw std::invalid_argument("solve_dual_alm: y0 has wrong size");
  const auto t0 = Clock::now();

  AlmTrace trace;
  trace.form = AlmForm::dual;
  trace.problem_name = p.name();
  trace.X0 = x0;
  trace.y0 = y0 ? *y0 : Eigen::VectorXd::Zero(p.m());
  trace.Z0 = p.C() - apply_Astar(p, trace.y0);

  const double data_norm = p.b().norm() + p.C().norm();
  SymMatrix xmul = x0;
  Eigen::VectorXd y = trace.y0;
  std::optional<double> p_star, d_star;
  if (oracle) p_star = d_star = oracle->p_star;

  for (int k = 0; k < cfg.max_outer; ++k) {
    const double r = cfg.r_at(k), eps = cfg.eps_at(k), delta = cfg.delta_at(k);
    const DualSubproblem sub(p, xmul, r);
    InnerOptions opts = make_inner_options(cfg, eps * eps / (2.0 * r));
    opts.diameter = [&](const Eigen::VectorXd& v) {
      return cfg.diameter > 0.0 ? cfg.diameter : 2.0 * (1.0 + v.norm() + data_norm);
    };
    opts.accept = [&](const Eigen::VectorXd& v, double gap) {
      const double step = (dual_multiplier_update(p, v, xmul, r) - xmul).norm();
      return gap <= delta * delta * step * step / (2.0 * r);
    };
    const InnerResult inner =
        minimize_auglag([&sub](const Eigen::VectorXd& v, Eigen::VectorXd* g) { return sub(v, g); },
                        y, opts);
    require_finite(inner.x, "dual iterate");
    const Eigen::VectorXd y_prev = y;
    const SymMatrix z_prev = p.C() - apply_Astar(p, y_prev);
    y = inner.x;

    IterationRecord rec;
    rec.k = k + 1;
    const SymMatrix next = dual_multiplier_update(p, y, xmul, r);
    rec.step_norm = (next - xmul).norm();
    rec.X = next;
    rec.y = y;
    rec.Z = p.C() - apply_Astar(p, y);
    rec.r = r;
    rec.eps = eps;
    rec.delta = delta;
    rec.inner_iterations = inner.iterations;
    rec.inner_status = inner.status;
    rec.gap_certificate = inner.gap_upper_bound;
    rec.criterion_a = check_criterion_A(inner, eps, r);
    rec.criterion_b = check_criterion_B(inner, delta, r, rec.step_norm);
    if (!(rec.criterion_a && rec.criterion_b)) {
      trace.warnings.push_back(uncertified_warning(rec.k, inner, rec.criterion_a, rec.criterion_b));
    }
    if (oracle) {
      rec.dist_primal = (next - oracle->x_star).norm();
      rec.dist_dual_prev = pair_distance(y_prev, z_prev, oracle->w_star.y, oracle->w_star.Z);
      rec.dist_dual = pair_distance(y, *rec.Z, oracle->w_star.y, oracle->w_star.Z);
    }
    rec.residuals = kkt_residuals(p, next, DualPoint{y, *rec.Z}, p_star, d_star);
    xmul = next;
    const bool done = rec.residuals.eps3 <= cfg.stop_eps3;
    trace.append(std::move(rec));
    if (done) {
      trace.converged = true;
      break;
    }
  }
  trace.wall_seconds = seconds_since(t0);
  return trace;
}

ResidualSet ineq_residuals(const IneqProblem& q, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& z, std::optional<double> f_star) {
  ResidualSet r;
  const double fx = q.objective(x);
  if (f_star) r.eps1 = std::abs(fx - *f_star) / (1.0 + std::abs(*f_star));
  Eigen::VectorXd grad = q.objective_gradient(x);
  if (q.num_constraints() > 0) {
    const Eigen::VectorXd g = q.constraint_values(x);
    r.eta[0] = g.cwiseMax(0.0).norm() / (1.0 + q.h.norm());
    grad += q.G.transpose() * z;
    r.eta[3] = z.cwiseMin(0.0).norm() / (1.0 + z.norm());
    r.eta[4] = std::abs(z.dot(g)) / (1.0 + std::abs(fx));
  }
  r.eta[2] = grad.norm() / (1.0 + q.c.norm());
  r.eps3 = *std::max_element(r.eta.begin(), r.eta.end());
  return r;
}

AlmTrace solve_ineq_alm(const IneqProblem& q, const Eigen::VectorXd& z0, const AlmConfig& cfg,
                        const std::optional<IneqOracle>& oracle,
                        const std::optional<Eigen::VectorXd>& x0) {
  cfg.validate();
  q.validate();
  if (z0.size() != q.num_constraints()) {
    throw std::invalid_argument("solve_ineq_alm: z0 has wrong size");
  }
  if ((z0.array() < 0.0).any()) throw std::invalid_argument("solve_ineq_alm: z0 must be >= 0");
  if (x0 && x0->size() != q.num_vars()) {
    throw std::invalid_argument("solve_ineq_alm: x0 has wrong size");
  }
  const auto t0 = Clock::now();

  AlmTrace trace;
  trace.form = AlmForm::ineq;
  trace.problem_name = q.name;
  trace.z0 = z0;
  trace.x0 = x0 ? *x0 : Eigen::VectorXd::Zero(q.num_vars());

  const bool unconstrained = q.num_constraints() == 0;
  const double data_norm = q.h.norm() + q.c.norm();
  const double c_scale = 1.0 + q.c.norm();
  Eigen::VectorXd z = z0;
  Eigen::VectorXd x = trace.x0;
  std::optional<double> f_star;
  if (oracle) f_star = oracle->f_star;

  const int outer = unconstrained ? 1 : cfg.max_outer;
  for (int k = 0; k < outer; ++k) {
    const double r = cfg.r_at(k), eps = cfg.eps_at(k), delta = cfg.delta_at(k);
    const IneqSubproblem sub(q, z, r);
    InnerOptions opts = make_inner_options(cfg, eps * eps / (2.0 * r));
    opts.diameter = [&](const Eigen::VectorXd& v) {
      return cfg.diameter > 0.0 ? cfg.diameter : 2.0 * (1.0 + v.norm() + data_norm);
    };
    if (unconstrained) {
      // No multiplier step: stop on the stationarity residual alone.
      opts.accept = [&](const Eigen::VectorXd& v, double) {
        return q.objective_gradient(v).norm() / c_scale <= cfg.stop_eps3;
      };
    } else {
      opts.accept = [&](const Eigen::VectorXd& v, double gap) {
        const double step = (ineq_multiplier_update(q, v, z, r) - z).norm();
        return gap <= delta * delta * step * step / (2.0 * r);
      };
    }
    const InnerResult inner =
        minimize_auglag([&sub](const Eigen::VectorXd& v, Eigen::VectorXd* g) { return sub(v, g); },
                        x, opts);
    require_finite(inner.x, "iterate");
    x = inner.x;

    IterationRecord rec;
    rec.k = k + 1;
    const Eigen::VectorXd next = unconstrained ? z : ineq_multiplier_update(q, x, z, r);
    rec.step_norm = (next - z).norm();
    rec.x = x;
    rec.z = next;
    rec.r = r;
    rec.eps = eps;
    rec.delta = delta;
    rec.inner_iterations = inner.iterations;
    rec.inner_status = inner.status;
    rec.gap_certificate = inner.gap_upper_bound;
    rec.criterion_a = check_criterion_A(inner, eps, r);
    rec.criterion_b = unconstrained || check_criterion_B(inner, delta, r, rec.step_norm);
    if (!(rec.criterion_a && rec.criterion_b)) {
      trace.warnings.push_back(uncertified_warning(rec.k, inner, rec.criterion_a, rec.criterion_b));
    }
    if (oracle) {
      rec.dist_primal = (x - oracle->x_star).norm();
      if (!unconstrained) {
        rec.dist_dual_prev = (z - oracle->z_star).norm();
        rec.dist_dual = (next - oracle->z_star).norm();
      }
    }
    rec.residuals = ineq_residuals(q, x, next, f_star);
    z = next;
    const bool done = rec.residuals.eps3 <= cfg.stop_eps3;
    trace.append(std::move(rec));
    if (done) {
      trace.converged = true;
      break;
    }
  }
  trace.wall_seconds = seconds_since(t0);
  return trace;
}

AlmStructureReport check_alm_structure(const SdpProblem& p, const AlmTrace& trace,
                                       const std::optional<SdpOracle>& oracle) {
  if (trace.form != AlmForm::primal) {
    throw std::invalid_argument("check_alm_structure: primal-form trace required");
  }
  AlmStructureReport rep;
  rep.min_dual_eigenvalue = lambda_min(*trace.Z0);
  Eigen::VectorXd y_prev = trace.y0;
  SymMatrix z_prev = *trace.Z0;
  for (const IterationRecord& rec : trace.records) {
    const double infeas = (apply_A(p, *rec.X) - p.b()).norm();
    const double identity = (y_prev - rec.y).norm() / rec.r;
    rep.max_identity_error = std::max(rep.max_identity_error, std::abs(infeas - identity));
    const double cone = dist_psd(*rec.X) - (z_prev - *rec.Z).norm() / rec.r;
    rep.max_cone_excess = std::max(rep.max_cone_excess, cone);
    rep.min_dual_eigenvalue = std::min(rep.min_dual_eigenvalue, lambda_min(*rec.Z));
    if (oracle && rec.criterion_b && rec.delta < 1.0) {
      const double dist_prev = pair_distance(y_prev, z_prev, oracle->w_star.y, oracle->w_star.Z);
      ++rep.step_bound_checked;
      // Relative slack for roundoff in the two distances.
      if (rec.step_norm > dist_prev / (1.0 - rec.delta) + 1e-12 * (1.0 + dist_prev)) {
        ++rep.step_bound_violations;
      }
    }
    y_prev = rec.y;
    z_prev = *rec.Z;
  }
  return rep;
}

PpmTrace ppm(const ProxOracle& prox, const Eigen::VectorXd& x0, const PpmSchedule& schedule,
             int iterations) {
  if (!schedule.c) throw std::invalid_argument("ppm: schedule needs c_k");
  PpmTrace t;
  t.iterates.push_back(x0);
  for (int k = 0; k < iterations; ++k) {
    const double c = schedule.c(k);
    if (!(c > 0.0)) throw std::invalid_argument("ppm: c_k must be positive");
    Eigen::VectorXd next = prox(t.iterates.back(), c);
    if (!next.allFinite() || next.size() != x0.size()) {
      throw std::runtime_error("ppm: prox oracle failed at k=" + std::to_string(k));
    }
    t.iterates.push_back(std::move(next));
    t.c.push_back(c);
    t.eps.push_back(schedule.eps ? schedule.eps(k) : 0.0);
    t.delta.push_back(schedule.delta ? schedule.delta(k) : 0.0);
  }
  return t;
}

double ppm_rate_bound(double theta, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("ppm_rate_bound: need 0 <= delta < 1");
  return (theta + 2.0 * delta) / (1.0 - delta);
}

Eigen::VectorXd flatten(const DualPoint& w) {
  const Eigen::VectorXd zs = w.Z.svec();
  Eigen::VectorXd v(w.y.size() + zs.size());
  v << w.y, zs;
  return v;
}

DualPoint unflatten(const SdpProblem& p, const Eigen::VectorXd& v) {
  if (v.size() != p.m() + svec_dim(p.n())) throw std::invalid_argument("unflatten: size mismatch");
  return {v.head(p.m()), SymMatrix::from_svec(v.tail(svec_dim(p.n())), p.n())};
}

namespace {

struct ReferenceProx {
  DualPoint point;
  double gap = 0.0;
};

ReferenceProx reference_prox(const SdpProblem& p, const DualPoint& w, double r, double tol,
                             const Eigen::VectorXd& start) {
  const PrimalSubproblem sub(p, w, r);
  const double data_norm = p.b().norm() + p.C().norm();
  InnerOptions opts;
  opts.tol = tol;
  opts.max_iter = 50000;
  opts.stagnation_window = 500;
  opts.diameter = [&](const Eigen::VectorXd& v) { return 2.0 * (1.0 + v.norm() + data_norm); };
  const InnerResult inner = minimize_auglag(
      [&sub](const Eigen::VectorXd& v, Eigen::VectorXd* g) { return sub(v, g); }, start, opts);
  return {primal_multiplier_update(p, SymMatrix::from_svec(inner.x, p.n()), w, r),
          inner.gap_upper_bound};
}

}  // namespace

ProxOracle sdp_dual_prox(const SdpProblem& p, double accuracy) {
  return [&p, accuracy](const Eigen::VectorXd& v, double c) {
    const DualPoint w = unflatten(p, v);
    return flatten(reference_prox(p, w, c, accuracy, Eigen::VectorXd::Zero(svec_dim(p.n()))).point);
  };
}

PpmLinkReport verify_ppm_alm_link(const SdpProblem& p, const AlmTrace& trace,
                                  double prox_accuracy) {
  if (trace.form != AlmForm::primal) {
    throw std::invalid_argument("verify_ppm_alm_link: primal-form trace required");
  }
  PpmLinkReport rep;
  DualPoint w{trace.y0, *trace.Z0};
  for (const IterationRecord& rec : trace.records) {
    const double tol = std::max(rec.gap_certificate / 10.0, 1e-300);
    const ReferenceProx ref = reference_prox(p, w, rec.r, tol, rec.X->svec());
    const DualPoint next{rec.y, *rec.Z};
    const double d = distance(next, ref.point);
    PpmLinkEntry e;
    e.k = rec.k;
    e.lhs = d * d / (2.0 * rec.r);
    e.gap_bound = rec.gap_certificate;
    e.reference_gap = ref.gap;
    const double root = std::sqrt(rec.gap_certificate) + std::sqrt(ref.gap);
    e.holds = e.lhs <= root * root + prox_accuracy;
    if (!e.holds) rep.violations.push_back(rec.k);
    rep.entries.push_back(e);
    w = next;
  }
  return rep;
}

RateFit fit_linear_rate(const std::vector<double>& series, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("fit_linear_rate: tail_fraction must lie in (0, 1]");
  }
  const auto total = static_cast<long>(series.size());
  const long count = std::min<long>(total, static_cast<long>(std::ceil(tail_fraction * total)));
  if (count < 3) throw std::invalid_argument("fit_linear_rate: need at least 3 points");
  const long first = total - count;
  double sx = 0, sy = 0;
  for (long i = first; i < total; ++i) {
    if (!(series[i] > 0.0) || !std::isfinite(series[i])) {
      throw std::invalid_argument("fit_linear_rate: series must be positive and finite");
    }
    sx += static_cast<double>(i);
    sy += std::log(series[i]);
  }
  const double mx = sx / count, my = sy / count;
  double sxx = 0, sxy = 0, syy = 0;
  for (long i = first; i < total; ++i) {
    const double dx = static_cast<double>(i) - mx;
    const double dy = std::log(series[i]) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  const double slope = sxy / sxx;
  RateFit fit;
  fit.rate_q = std::exp(slope);
  fit.points = static_cast<int>(count);
  // A constant series is fitted exactly.
  fit.r_squared = syy <= 1e-300 ? 1.0 : (slope * sxy) / syy;
  return fit;
}

}  // namespace conic_alm

#include "conic_alm/inner_solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace conic_alm {

namespace {

constexpr double kMaxLipschitz = 1e30;
constexpr int kMaxBacktracks = 80;

double checked(double v, const char* where) {
  if (!std::isfinite(v)) {
    throw std::runtime_error(std::string("inner solver: non-finite objective value at ") + where);
  }
  return v;
}

// Roundoff allowance for comparing objective values of magnitude |f|. The
// augmented Lagrangians are differences of large squared norms, so their
// evaluation noise sits well above a few ulps of |f|; 1024 ulps stays far
// below the 1e-12 per-step descent tolerance.
double roundoff(double f) { return 1024.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(f)); }

// <g(xn) - g(y), d> <= L ||d||^2, allowing for the rounding error of the
// gradient difference; without the allowance L blows up once ||d|| reaches
// the noise level of the gradients.
bool curvature_ok(const Eigen::VectorXd& gn, const Eigen::VectorXd& gy, const Eigen::VectorXd& d,
                  double lip) {
  const double noise = 16.0 * std::numeric_limits<double>::epsilon() * (gn.norm() + gy.norm());
  return (gn - gy).dot(d) <= lip * d.squaredNorm() + noise * d.norm();
}

// Curvature along a short gradient step; used as the initial Lipschitz guess.
double initial_lipschitz(const SmoothObjective& f, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& g) {
  const double gn = g.norm();
  if (gn == 0.0) return 1.0;
  const Eigen::VectorXd s = -(1e-6 * (1.0 + x.norm()) / gn) * g;
  Eigen::VectorXd g2;
  checked(f(x + s, &g2), "initial probe");
  const double est = (g2 - g).norm() / s.norm();
  return (std::isfinite(est) && est > 1e-12) ? est : 1.0;
}

}  // namespace

InnerResult minimize_auglag(const SmoothObjective& f, const Eigen::VectorXd& start,
                            const InnerOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("minimize_auglag: tol must be positive");
  auto diameter = [&](const Eigen::VectorXd& x) {
    const double d = opts.diameter ? opts.diameter(x) : 2.0 * (1.0 + x.norm());
    if (!(d > 0.0)) throw std::invalid_argument("minimize_auglag: diameter must be positive");
    return d;
  };

  InnerResult res;
  Eigen::VectorXd x = start, gx;
  double fx = checked(f(x, &gx), "start");
  double lip = initial_lipschitz(f, x, gx);

  Eigen::VectorXd best_x = x;
  double best_f = fx, best_gn = gx.norm(), best_gap = best_gn * diameter(x);
  double stagnation_ref = best_gn;
  int stagnation_since = 0;

  Eigen::VectorXd y = x, gy = gx;
  double fy = fx;
  double t = 1.0;
  bool momentum = false;
  int it = 0;

  for (;; ++it) {
    const double gn = gx.norm();
    const double gap = gn * diameter(x);
    if (gap < best_gap) {
      best_gap = gap;
      best_gn = gn;
      best_x = x;
      best_f = fx;
    }
    if (gap <= opts.tol && (!opts.accept || opts.accept(x, gap))) {
      res.x = x;
      res.value = fx;
      res.grad_norm = gn;
      res.gap_upper_bound = gap;
      res.iterations = it;
      res.converged = true;
      res.status = "converged";
      return res;
    }
    if (it >= opts.max_iter) {
      res.status = "max-iter";
      break;
    }
    if (opts.stagnation_window > 0) {
      if (gn < (1.0 - 1e-3) * stagnation_ref) {
        stagnation_ref = gn;
        stagnation_since = it;
      } else if (it - stagnation_since >= opts.stagnation_window) {
        res.status = "stagnated";
        break;
      }
    }

    // Gradient step from the extrapolated point with backtracking.
    Eigen::VectorXd xn, gn_vec;
    double fn = 0.0;
    bool ok = false;
    const double gy2 = gy.squaredNorm();
    for (int bt = 0; bt < kMaxBacktracks && lip < kMaxLipschitz; ++bt) {
      xn = y - gy / lip;
      fn = checked(f(xn, &gn_vec), "trial point");
      if (fn <= fy - 0.5 * gy2 / lip) {
        ok = true;
        break;
      }
      // Below roundoff the value test is meaningless; fall back to the
      // curvature test <g(xn) - g(y), d> <= L ||d||^2, which implies the
      // same quadratic upper bound for convex f up to the trapezoid error.
      if (std::abs(fn - fy) <= roundoff(fy) && curvature_ok(gn_vec, gy, xn - y, lip)) {
        ok = true;
        break;
      }
      lip *= 2.0;
    }
    if (!ok || fn > fx + roundoff(fx)) {
      if (momentum) {
        // Extrapolation overshot: restart from the last accepted point.
        y = x;
        gy = gx;
        fy = fx;
        t = 1.0;
        momentum = false;
        continue;
      }
      res.status = "line-search-failed";
      break;
    }

    // Gradient-based adaptive restart.
    const bool restart = gy.dot(xn - x) > 0.0;
    const double t_next = restart ? 1.0 : 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double beta = restart ? 0.0 : (t - 1.0) / t_next;
    t = t_next;

    const Eigen::VectorXd x_prev = x;
    x = std::move(xn);
    gx = std::move(gn_vec);
    fx = fn;
    if (beta > 0.0) {
      y = x + beta * (x - x_prev);
      fy = checked(f(y, &gy), "extrapolated point");
      momentum = true;
    } else {
      y = x;
      gy = gx;
      fy = fx;
      momentum = false;
    }
    lip *= 0.8;
  }

  res.x = best_x;
  res.value = best_f;
  res.grad_norm = best_gn;
  res.gap_upper_bound = best_gap;
  res.iterations = it;
  res.converged = false;
  return res;
}

InnerResult minimize_auglag(const SmoothObjective& f, const Eigen::VectorXd& start, double tol,
                            int max_iter, double diameter_bound) {
  if (!(diameter_bound > 0.0)) {
    throw std::invalid_argument("minimize_auglag: diameter_bound must be positive");
  }
  InnerOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.diameter = [diameter_bound](const Eigen::VectorXd&) { return diameter_bound; };
  return minimize_auglag(f, start, opts);
}

bool check_criterion_A(const InnerResult& result, double eps_k, double r_k) {
  return result.gap_upper_bound <= eps_k * eps_k / (2.0 * r_k);
}

bool check_criterion_B(const InnerResult& result, double delta_k, double r_k,
                       double w_step_norm) {
  return result.gap_upper_bound <= delta_k * delta_k * w_step_norm * w_step_norm / (2.0 * r_k);
}

CompositeResult minimize_composite(const SmoothObjective& f,
                                   const std::function<double(const Eigen::VectorXd&)>& h_value,
                                   const ProxOperator& prox_h, const Eigen::VectorXd& start,
                                   double tol, int max_iter) {
  CompositeResult res;
  Eigen::VectorXd x = start, gx;
  double fx = checked(f(x, &gx), "start");
  double big_f = fx + h_value(x);
  double lip = initial_lipschitz(f, x, gx);

  Eigen::VectorXd y = x;
  double t = 1.0;
  int it = 0;
  double stall_ref = big_f;
  int stall_since = 0;
  for (; it < max_iter; ++it) {
    if (big_f < stall_ref - roundoff(stall_ref)) {
      stall_ref = big_f;
      stall_since = it;
    } else if (it - stall_since >= 200) {
      res.stalled = true;
      break;
    }
    Eigen::VectorXd gy;
    const double fy = checked(f(y, &gy), "extrapolated point");
    Eigen::VectorXd xn;
    double fn = 0.0;
    for (int bt = 0; bt < kMaxBacktracks; ++bt) {
      xn = prox_h(y - gy / lip, 1.0 / lip);
      Eigen::VectorXd gn;
      fn = checked(f(xn, &gn), "trial point");
      const Eigen::VectorXd d = xn - y;
      // Below roundoff the value test cannot reject a too-small L, so only the
      // curvature test counts there (as in minimize_auglag).
      if (std::abs(fn - fy) <= roundoff(fy)) {
        if (curvature_ok(gn, gy, d, lip)) break;
      } else if (fn <= fy + gy.dot(d) + 0.5 * lip * d.squaredNorm()) {
        break;
      }
      lip *= 2.0;
    }
    res.gradient_mapping_norm = lip * (xn - y).norm();
    const double big_fn = fn + h_value(xn);
    if (big_fn > big_f + roundoff(big_f) && t > 1.0) {
      // Function-value restart: drop momentum and retry from x.
      y = x;
      t = 1.0;
      continue;
    }
    if (big_fn > big_f + roundoff(big_f)) break;  // no descent without momentum: roundoff floor
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const Eigen::VectorXd x_prev = x;
    // Ties within roundoff are accepted: near the minimizer the objective is
    // flat to machine precision while the gradient mapping still improves.
    if (big_fn <= big_f + roundoff(big_f)) {
      x = xn;
      big_f = std::min(big_f, big_fn);
    }
    y = x + ((t - 1.0) / t_next) * (x - x_prev);
    t = t_next;
    lip *= 0.9;
    if (res.gradient_mapping_norm <= tol) {
      res.converged = true;
      ++it;
      break;
    }
  }
  if (!res.converged) {
    // On the roundoff floor the value test cannot rank nearby points, so the
    // accelerated loop stalls about sqrt(eps) short. Plain proximal gradient
    // steps still shrink the mapping there; take them while it decreases.
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd gx_end;
    checked(f(x, &gx_end), "final point");
    double l_end = initial_lipschitz(f, x, gx_end);
    for (int polish = 0; polish < 50; ++polish) {
      Eigen::VectorXd xn, gn;
      double fn = 0.0;
      for (int bt = 0; bt < kMaxBacktracks; ++bt) {
        xn = prox_h(x - gx_end / l_end, 1.0 / l_end);
        fn = checked(f(xn, &gn), "polish point");
        const Eigen::VectorXd d = xn - x;
        if (curvature_ok(gn, gx_end, d, l_end)) break;
        l_end *= 2.0;
      }
      const double gm = l_end * (xn - x).norm();
      if (!(gm < best)) break;
      best = gm;
      const double big_fn = fn + h_value(xn);
      if (big_fn > big_f + roundoff(big_f)) break;
      x = xn;
      gx_end = gn;
      big_f = big_fn;
      if (gm <= tol) break;
    }
    res.gradient_mapping_norm = std::min(res.gradient_mapping_norm, best);
    res.converged = res.gradient_mapping_norm <= tol;
  }
  res.x = x;
  res.value = big_f;
  res.iterations = it;
  return res;
}

}  // namespace conic_alm

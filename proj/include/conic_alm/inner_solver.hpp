#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

// Certified minimization of smooth convex objectives.
//
// The solver is an accelerated gradient method with adaptive restart, a
// Barzilai-Borwein initial step and backtracking on the local Lipschitz
// estimate. Accepted iterates are monotone in the objective. The optimality
// certificate at an accepted point x is
//   f(x) - min f <= ||grad f(x)|| * D,
// which holds by convexity whenever a minimizer lies within D of x.

namespace conic_alm {

/// Value-and-gradient oracle; `grad` may be null when only the value is needed.
using SmoothObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct InnerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  double gap_upper_bound = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// "converged", "max-iter", "stagnated" or "line-search-failed".
  std::string status;
};

struct InnerOptions {
  double tol = 1e-8;
  int max_iter = 10000;
  /// D as a function of the current point; must return a positive value.
  std::function<double(const Eigen::VectorXd&)> diameter;
  /// Extra acceptance test evaluated only at points whose certified gap is
  /// already <= tol. Receives the point and its gap bound.
  std::function<bool(const Eigen::VectorXd&, double)> accept;
  /// Stop without convergence when the best gradient norm has not dropped by
  /// the factor (1 - 1e-3) during this many iterations (0 disables).
  int stagnation_window = 100;
};

InnerResult minimize_auglag(const SmoothObjective& f, const Eigen::VectorXd& start,
                            const InnerOptions& opts);

/// Fixed-diameter convenience overload.
InnerResult minimize_auglag(const SmoothObjective& f, const Eigen::VectorXd& start, double tol,
                            int max_iter, double diameter_bound);

/// gap <= eps_k^2 / (2 r_k).
bool check_criterion_A(const InnerResult& result, double eps_k, double r_k);
/// gap <= delta_k^2 ||w_{k+1} - w_k||^2 / (2 r_k).
bool check_criterion_B(const InnerResult& result, double delta_k, double r_k,
                       double w_step_norm);

/// prox_{t h}(v) for the nonsmooth part of a composite objective.
using ProxOperator = std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)>;

struct CompositeResult {
  Eigen::VectorXd x;
  double value = 0.0;
  /// L * ||y - prox(y - grad f(y) / L)|| at the last extrapolated point y:
  /// the gradient mapping norm, zero exactly at minimizers.
  double gradient_mapping_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  /// The objective stopped decreasing beyond roundoff for 200 iterations.
  bool stalled = false;
};

/// FISTA with backtracking and function-value restart for f + h, f smooth
/// convex, h convex with the given prox. `h_value` evaluates h.
CompositeResult minimize_composite(const SmoothObjective& f,
                                   const std::function<double(const Eigen::VectorXd&)>& h_value,
                                   const ProxOperator& prox_h, const Eigen::VectorXd& start,
                                   double tol, int max_iter);

}  // namespace conic_alm

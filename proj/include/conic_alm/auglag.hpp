#pragma once

#include <Eigen/Dense>

#include "conic_alm/sdp_model.hpp"
#include "conic_alm/sym_matrix.hpp"

// Augmented Lagrangians of the three problem forms.
//
// Primal form (multipliers w = (y, Z) for A(X) = b and X PSD):
//   L_r(X, w) = <C,X> + (||y + r(b - A X)||^2 + ||P(Z - rX)||^2 - ||y||^2 - ||Z||^2) / (2r)
// Dual form (multiplier X for the constraint C - A^*(y) PSD):
//   L_r(y, X) = -<b,y> + (||P(X - r(C - A^*(y)))||^2 - ||X||^2) / (2r)
// Inequality form (multiplier z >= 0 for g(x) = Gx + h <= 0):
//   L_r(x, z) = f(x) + (||max(z + r g(x), 0)||^2 - ||z||^2) / (2r)
// P is the projection onto the PSD cone. Every function throws
// std::invalid_argument when r <= 0.

namespace conic_alm {

double eval_L_primal(const SdpProblem& p, const SymMatrix& x, const DualPoint& w, double r);
/// C - A^*(y + r(b - A X)) - P(Z - rX).
SymMatrix grad_L_primal_X(const SdpProblem& p, const SymMatrix& x, const DualPoint& w, double r);
/// (b - A X, (P(Z - rX) - Z) / r).
DualPoint grad_L_primal_w(const SdpProblem& p, const SymMatrix& x, const DualPoint& w, double r);

/// The multiplier step (y + r(b - A X), P(Z - rX)).
DualPoint primal_multiplier_update(const SdpProblem& p, const SymMatrix& x, const DualPoint& w,
                                   double r);

double eval_L_dual(const SdpProblem& p, const Eigen::VectorXd& y, const SymMatrix& x, double r);
/// -b + A(P(X - r(C - A^*(y)))).
Eigen::VectorXd grad_L_dual_y(const SdpProblem& p, const Eigen::VectorXd& y, const SymMatrix& x,
                              double r);
/// P(X - r(C - A^*(y))).
SymMatrix dual_multiplier_update(const SdpProblem& p, const Eigen::VectorXd& y,
                                 const SymMatrix& x, double r);

double eval_L_ineq(const IneqProblem& q, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                   double r);
/// grad f(x) + G^T max(z + r g(x), 0).
Eigen::VectorXd grad_L_ineq_x(const IneqProblem& q, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z, double r);
/// max(z + r g(x), 0).
Eigen::VectorXd ineq_multiplier_update(const IneqProblem& q, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& z, double r);

/// Lower bound on min_X L_r(X, w) built from a trial point X.
///
/// The candidate u = (y + r(b - A X), P(Z - rX)) satisfies
/// C - A^*(u_y) - u_Z = grad_X L_r(X, w). When that residual is zero, u is
/// dual feasible and g0(u) - ||u - w||^2 / (2r) = <b, u_y> - ||u - w||^2 / (2r)
/// is an exact lower bound (`from_dual_candidate`). Otherwise the bound is
/// L_r(X, w) - ||grad_X L|| * diameter, valid whenever a minimizer lies within
/// `diameter` of X; `slack` reports the subtracted amount.
struct GapLowerBound {
  double value = 0.0;
  double slack = 0.0;
  bool from_dual_candidate = false;
};

/// Default certificate radius 2 (1 + ||X|| + ||b|| + ||C||).
double default_diameter(const SdpProblem& p, const SymMatrix& x);

GapLowerBound dual_gap_lower_bound(const SdpProblem& p, const DualPoint& w,
                                   const SymMatrix& x_trial, double r, double diameter = -1.0);

// Subproblem objectives in flattened coordinates (svec for matrices) for the
// inner solver. Each call returns the value and, when `grad` is non-null,
// writes the gradient with respect to the flattened variable.

class PrimalSubproblem {
 public:
  PrimalSubproblem(const SdpProblem& p, DualPoint w, double r);
  double operator()(const Eigen::VectorXd& x_svec, Eigen::VectorXd* grad) const;
  const DualPoint& multiplier() const { return w_; }
  double r() const { return r_; }

 private:
  const SdpProblem* p_;
  DualPoint w_;
  double r_;
  Eigen::VectorXd c_svec_;
  Eigen::VectorXd z_svec_;
};

class DualSubproblem {
 public:
  DualSubproblem(const SdpProblem& p, SymMatrix x, double r);
  double operator()(const Eigen::VectorXd& y, Eigen::VectorXd* grad) const;
  double r() const { return r_; }

 private:
  const SdpProblem* p_;
  SymMatrix x_;
  double r_;
  Eigen::VectorXd base_svec_;  // svec(X - rC)
};

class IneqSubproblem {
 public:
  IneqSubproblem(const IneqProblem& q, Eigen::VectorXd z, double r);
  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const;
  double r() const { return r_; }

 private:
  const IneqProblem* q_;
  Eigen::VectorXd z_;
  double r_;
};

}  // namespace conic_alm

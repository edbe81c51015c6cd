#include "conic_alm/auglag.hpp"

#include <cmath>
#include <stdexcept>

#include "conic_alm/symcone.hpp"

namespace conic_alm {

namespace {

void require_positive(double r, const char* who) {
  if (!(r > 0.0)) throw std::invalid_argument(std::string(who) + ": r must be positive");
}

// y'(b - AX) + r/2 ||b - AX||^2 equals (||y + r(b - AX)||^2 - ||y||^2) / (2r)
// without the cancellation of the expanded form.
double affine_term(const Eigen::VectorXd& y, const Eigen::VectorXd& res, double r) {
  return y.dot(res) + 0.5 * r * res.squaredNorm();
}

}  // namespace

double eval_L_primal(const SdpProblem& p, const SymMatrix& x, const DualPoint& w, double r) {
  require_positive(r, "eval_L_primal");
  const Eigen::VectorXd res = p.b() - apply_A(p, x);
  const SymMatrix proj = project_psd(w.Z - r * x);
  return p.C().inner(x) + affine_term(w.y, res, r) +
         (proj.norm() * proj.norm() - w.Z.norm() * w.Z.norm()) / (2.0 * r);
}

SymMatrix grad_L_primal_X(const SdpProblem& p, const SymMatrix& x, const DualPoint& w, double r) {
  require_positive(r, "grad_L_primal_X");
  const Eigen::VectorXd ytil = w.y + r * (p.b() - apply_A(p, x));
  return p.C() - apply_Astar(p, ytil) - project_psd(w.Z - r * x);
}

DualPoint grad_L_primal_w(const SdpProblem& p, const SymMatrix& x, const DualPoint& w, double r) {
  require_positive(r, "grad_L_primal_w");
  return {p.b() - apply_A(p, x), (project_psd(w.Z - r * x) - w.Z) * (1.0 / r)};
}

DualPoint primal_multiplier_update(const SdpProblem& p, const SymMatrix& x, const DualPoint& w,
                                   double r) {
  require_positive(r, "primal_multiplier_update");
  return {w.y + r * (p.b() - apply_A(p, x)), project_psd(w.Z - r * x)};
}

double eval_L_dual(const SdpProblem& p, const Eigen::VectorXd& y, const SymMatrix& x, double r) {
  require_positive(r, "eval_L_dual");
  const SymMatrix proj = project_psd(x - r * (p.C() - apply_Astar(p, y)));
  return -p.b().dot(y) + (proj.norm() * proj.norm() - x.norm() * x.norm()) / (2.0 * r);
}

Eigen::VectorXd grad_L_dual_y(const SdpProblem& p, const Eigen::VectorXd& y, const SymMatrix& x,
                              double r) {
  require_positive(r, "grad_L_dual_y");
  return -p.b() + apply_A(p, dual_multiplier_update(p, y, x, r));
}

SymMatrix dual_multiplier_update(const SdpProblem& p, const Eigen::VectorXd& y,
                                 const SymMatrix& x, double r) {
  require_positive(r, "dual_multiplier_update");
  return project_psd(x - r * (p.C() - apply_Astar(p, y)));
}

double eval_L_ineq(const IneqProblem& q, const Eigen::VectorXd& x, const Eigen::VectorXd& z,
                   double r) {
  require_positive(r, "eval_L_ineq");
  const Eigen::VectorXd shifted = (z + r * q.constraint_values(x)).cwiseMax(0.0);
  return q.objective(x) + (shifted.squaredNorm() - z.squaredNorm()) / (2.0 * r);
}

Eigen::VectorXd grad_L_ineq_x(const IneqProblem& q, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& z, double r) {
  require_positive(r, "grad_L_ineq_x");
  Eigen::VectorXd g = q.objective_gradient(x);
  if (q.num_constraints() > 0) g += q.G.transpose() * ineq_multiplier_update(q, x, z, r);
  return g;
}

Eigen::VectorXd ineq_multiplier_update(const IneqProblem& q, const Eigen::VectorXd& x,
                                       const Eigen::VectorXd& z, double r) {
  require_positive(r, "ineq_multiplier_update");
  return (z + r * q.constraint_values(x)).cwiseMax(0.0);
}

double default_diameter(const SdpProblem& p, const SymMatrix& x) {
  return 2.0 * (1.0 + x.norm() + p.b().norm() + p.C().norm());
}

GapLowerBound dual_gap_lower_bound(const SdpProblem& p, const DualPoint& w,
                                   const SymMatrix& x_trial, double r, double diameter) {
  require_positive(r, "dual_gap_lower_bound");
  if (diameter <= 0.0) diameter = default_diameter(p, x_trial);
  const DualPoint u = primal_multiplier_update(p, x_trial, w, r);
  const SymMatrix residual = p.C() - apply_Astar(p, u.y) - u.Z;
  GapLowerBound out;
  if (residual.norm() == 0.0) {
    const double d = distance(u, w);
    out.value = p.b().dot(u.y) - d * d / (2.0 * r);
    out.from_dual_candidate = true;
    return out;
  }
  out.slack = residual.norm() * diameter;
  out.value = eval_L_primal(p, x_trial, w, r) - out.slack;
  return out;
}

PrimalSubproblem::PrimalSubproblem(const SdpProblem& p, DualPoint w, double r)
    : p_(&p), w_(std::move(w)), r_(r), c_svec_(p.C().svec()), z_svec_(w_.Z.svec()) {
  require_positive(r, "PrimalSubproblem");
}

double PrimalSubproblem::operator()(const Eigen::VectorXd& x_svec, Eigen::VectorXd* grad) const {
  const Eigen::MatrixXd& a = p_->svec_operator();
  const Eigen::VectorXd res = p_->b() - a * x_svec;
  const SymMatrix proj = project_psd(SymMatrix::from_svec(z_svec_ - r_ * x_svec, p_->n()));
  const Eigen::VectorXd proj_svec = proj.svec();
  if (grad) *grad = c_svec_ - a.transpose() * (w_.y + r_ * res) - proj_svec;
  return c_svec_.dot(x_svec) + affine_term(w_.y, res, r_) +
         (proj_svec.squaredNorm() - z_svec_.squaredNorm()) / (2.0 * r_);
}

DualSubproblem::DualSubproblem(const SdpProblem& p, SymMatrix x, double r)
    : p_(&p), x_(std::move(x)), r_(r), base_svec_() {
  require_positive(r, "DualSubproblem");
  base_svec_ = (x_ - r_ * p.C()).svec();
}

double DualSubproblem::operator()(const Eigen::VectorXd& y, Eigen::VectorXd* grad) const {
  const Eigen::MatrixXd& a = p_->svec_operator();
  const Eigen::VectorXd arg = base_svec_ + r_ * (a.transpose() * y);
  const Eigen::VectorXd proj = project_psd(SymMatrix::from_svec(arg, p_->n())).svec();
  if (grad) *grad = -p_->b() + a * proj;
  const double xn = x_.norm();
  return -p_->b().dot(y) + (proj.squaredNorm() - xn * xn) / (2.0 * r_);
}

IneqSubproblem::IneqSubproblem(const IneqProblem& q, Eigen::VectorXd z, double r)
    : q_(&q), z_(std::move(z)), r_(r) {
  require_positive(r, "IneqSubproblem");
  if (z_.size() != q.num_constraints()) {
    throw std::invalid_argument("IneqSubproblem: multiplier size mismatch");
  }
}

double IneqSubproblem::operator()(const Eigen::VectorXd& x, Eigen::VectorXd* grad) const {
  const Eigen::VectorXd qx = q_->Q * x;
  double value = 0.5 * x.dot(qx) + q_->c.dot(x) + q_->offset;
  if (grad) *grad = qx + q_->c;
  if (q_->num_constraints() > 0) {
    const Eigen::VectorXd shifted = (z_ + r_ * (q_->G * x + q_->h)).cwiseMax(0.0);
    value += (shifted.squaredNorm() - z_.squaredNorm()) / (2.0 * r_);
    if (grad) *grad += q_->G.transpose() * shifted;
  }
  return value;
}

}  // namespace conic_alm

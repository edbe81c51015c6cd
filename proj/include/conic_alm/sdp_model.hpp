#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conic_alm/sym_matrix.hpp"

namespace conic_alm {

/// Standard-form SDP data
///   min <C, X>  s.t.  <A_i, X> = b_i (i = 1..m),  X PSD
/// and its dual  max <b, y>  s.t.  sum_i y_i A_i + Z = C,  Z PSD.
///
/// The constraint matrices must be linearly independent: the smallest
/// eigenvalue of their Gram matrix must exceed 1e-10 times the largest.
class SdpProblem {
 public:
  SdpProblem(SymMatrix c, std::vector<SymMatrix> constraints, Eigen::VectorXd b,
             std::string name = {});

  Eigen::Index n() const { return c_.dim(); }
  Eigen::Index m() const { return b_.size(); }
  const SymMatrix& C() const { return c_; }
  const std::vector<SymMatrix>& constraints() const { return a_; }
  const Eigen::VectorXd& b() const { return b_; }
  const std::string& name() const { return name_; }

  /// m x svec_dim(n) matrix whose rows are svec(A_i).
  const Eigen::MatrixXd& svec_operator() const { return a_svec_; }
  /// Solves (A A^*) u = v using the cached Gram factorization.
  Eigen::VectorXd solve_gram(const Eigen::VectorXd& v) const;

 private:
  SymMatrix c_;
  std::vector<SymMatrix> a_;
  Eigen::VectorXd b_;
  std::string name_;
  Eigen::MatrixXd a_svec_;
  Eigen::LLT<Eigen::MatrixXd> gram_;
};

/// A(X) = [<A_1, X>, ..., <A_m, X>].
Eigen::VectorXd apply_A(const SdpProblem& p, const SymMatrix& x);
/// A^*(y) = sum_i y_i A_i.
SymMatrix apply_Astar(const SdpProblem& p, const Eigen::VectorXd& y);

/// Dual pair w = (y, Z).
struct DualPoint {
  Eigen::VectorXd y;
  SymMatrix Z;
};

double distance(const DualPoint& a, const DualPoint& b);

/// Relative optimality and feasibility measures of an iterate. eps1/eps2 are
/// present only when optimal values are known. eta holds eta_1..eta_5 and
/// eps3 = max(eta).
struct ResidualSet {
  std::optional<double> eps1;
  std::optional<double> eps2;
  std::array<double, 5> eta{};
  double eps3 = 0.0;
};

/// Without d_star the eta_5 denominator uses 1 + |<b, y>|.
ResidualSet kkt_residuals(const SdpProblem& p, const SymMatrix& x, const DualPoint& w,
                          std::optional<double> p_star = std::nullopt,
                          std::optional<double> d_star = std::nullopt);

/// Problem bundled with a KKT-certified optimal triple.
struct KnownSolutionInstance {
  SdpProblem problem;
  SymMatrix x_star;
  Eigen::VectorXd y_star;
  SymMatrix z_star;
  double p_star = 0.0;
  /// A is injective on the face spanned by range(X*): X* is the only primal solution.
  bool unique_primal = false;
  /// (y, W) -> A^*(y) + Q2 W Q2^T is injective: (y*, Z*) is the only dual solution.
  bool unique_dual = false;

  DualPoint w_star() const { return {y_star, z_star}; }
};

/// Checks A(X*) = b, Z* = C - A^*(y*), X*, Z* PSD, <X*, Z*> = 0 and
/// <C, X*> = <b, y*>, each within `tol` absolute, and evaluates the
/// uniqueness flags. Throws std::runtime_error naming the failed condition.
KnownSolutionInstance certify_instance(SdpProblem problem, SymMatrix x_star,
                                       Eigen::VectorXd y_star, SymMatrix z_star,
                                       double tol = 1e-10);

/// Random instance with X* of rank `rank_x` and Z* of rank n - rank_x on the
/// orthogonal complement (strictly complementary by construction). Retries
/// degenerate draws up to 20 times, then throws.
KnownSolutionInstance synth_known_solution(int n, int m, int rank_x, std::uint64_t seed);

/// The 2x2 instance C = [[1,-1],[-1,1]], A_1 = diag(1,0), A_2 = diag(0,1),
/// b = (1,1) with X* = [[1,1],[1,1]], y* = 0, Z* = C.
KnownSolutionInstance example_d1();

/// min <W, X> s.t. diag(X) = 1, X PSD; C is the weight matrix itself.
/// Throws std::invalid_argument for asymmetric or non-zero-diagonal input.
SdpProblem maxcut_instance(const Eigen::MatrixXd& weights, std::string name = "maxcut");

/// Convex quadratic program
///   min 1/2 x'Qx + c'x + offset  s.t.  G x + h <= 0.
struct IneqProblem {
  Eigen::MatrixXd Q;
  Eigen::VectorXd c;
  double offset = 0.0;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  std::string name;

  Eigen::Index num_vars() const { return c.size(); }
  Eigen::Index num_constraints() const { return h.size(); }
  double objective(const Eigen::VectorXd& x) const;
  Eigen::VectorXd objective_gradient(const Eigen::VectorXd& x) const;
  Eigen::VectorXd constraint_values(const Eigen::VectorXd& x) const;
  /// Throws std::invalid_argument on inconsistent sizes or non-PSD Q.
  void validate() const;
};

/// Linear SVM: variables (x, t) in R^{d+m},
///   min lambda 1't + 1/2 ||x||^2  s.t.  diag(labels) A x + 1 <= t,  0 <= t.
/// Rows 0..m-1 are the margin constraints, rows m..2m-1 are -t <= 0.
IneqProblem svm_instance(const Eigen::MatrixXd& a, const Eigen::VectorXd& labels,
                         double lambda);

/// Lasso: variables (x, t) in R^{2n},
///   min 1/2 ||A x - b||^2 + lambda 1't  s.t.  x - t <= 0,  -x - t <= 0.
IneqProblem lasso_instance(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double lambda);

/// Seeded Gaussian data (labels uniform in {-1, +1}).
IneqProblem svm_random(int m, int d, double lambda, std::uint64_t seed);
IneqProblem lasso_random(int m, int n, double lambda, std::uint64_t seed);

}  // namespace conic_alm

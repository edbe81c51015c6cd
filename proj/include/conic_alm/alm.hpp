#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conic_alm/inner_solver.hpp"
#include "conic_alm/sdp_model.hpp"

// Inexact augmented Lagrangian drivers for the primal SDP form, the dual SDP
// form and convex programs with affine inequality constraints, plus a generic
// inexact proximal point loop and the checks that tie the two together.

namespace conic_alm {

struct AlmConfig {
  double r0 = 1.0;
  double r_growth = 1.25;
  double r_max = 100.0;
  double eps0 = 1.0;
  double delta0 = 0.5;
  double decay = 0.7;
  int max_outer = 500;
  double stop_eps3 = 1e-8;
  int inner_max_iter = 10000;
  /// Fixed radius for the gap certificate; <= 0 selects the per-form default.
  double diameter = 0.0;

  /// Throws std::invalid_argument if an invariant is violated.
  void validate() const;
  double r_at(int k) const;
  double eps_at(int k) const;
  double delta_at(int k) const;
};

enum class AlmForm { primal, dual, ineq };
const char* to_string(AlmForm form);

/// Known solution used to report distances and eps1/eps2.
struct SdpOracle {
  SymMatrix x_star;
  DualPoint w_star;
  double p_star = 0.0;
};
SdpOracle oracle_of(const KnownSolutionInstance& inst);

struct IneqOracle {
  Eigen::VectorXd x_star;
  Eigen::VectorXd z_star;
  double f_star = 0.0;
};

/// One outer iteration. For the SDP forms X, y, Z hold the new iterate
/// (X_{k+1}, y_{k+1}, Z_{k+1}); in the dual form Z = C - A^*(y). For the
/// inequality form x and z are set instead.
struct IterationRecord {
  int k = 0;
  std::optional<SymMatrix> X;
  Eigen::VectorXd y;
  std::optional<SymMatrix> Z;
  Eigen::VectorXd x;
  Eigen::VectorXd z;

  ResidualSet residuals;
  std::optional<double> dist_primal;     ///< to the primal solution
  std::optional<double> dist_dual;       ///< new dual iterate to the dual solution
  std::optional<double> dist_dual_prev;  ///< previous dual iterate to the dual solution

  double r = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  int inner_iterations = 0;
  std::string inner_status;
  double gap_certificate = 0.0;
  bool criterion_a = false;
  bool criterion_b = false;
  /// Norm of the multiplier step (w_{k+1} - w_k, or X_{k+1} - X_k in the dual form).
  double step_norm = 0.0;
};

struct AlmTrace {
  AlmForm form = AlmForm::primal;
  std::string problem_name;
  /// Starting multipliers / iterate.
  std::optional<SymMatrix> X0;
  Eigen::VectorXd y0;
  std::optional<SymMatrix> Z0;
  Eigen::VectorXd x0;
  Eigen::VectorXd z0;

  std::vector<IterationRecord> records;
  std::vector<std::string> warnings;
  bool converged = false;
  double wall_seconds = 0.0;

  /// Appends a record; throws std::logic_error unless k increases strictly.
  void append(IterationRecord rec);
  const IterationRecord& last() const { return records.back(); }
};

/// Primal-form ALM from multipliers w0 (Z0 must be PSD). The inner loop starts
/// from x0 (zero by default) and is warm-started afterwards.
AlmTrace solve_primal_alm(const SdpProblem& p, const DualPoint& w0, const AlmConfig& cfg,
                          const std::optional<SdpOracle>& oracle = std::nullopt,
                          const std::optional<SymMatrix>& x0 = std::nullopt);

/// Dual-form ALM from the multiplier X0 (must be PSD); the y-subproblem starts
/// at y0 (zero by default).
AlmTrace solve_dual_alm(const SdpProblem& p, const SymMatrix& x0, const AlmConfig& cfg,
                        const std::optional<SdpOracle>& oracle = std::nullopt,
                        const std::optional<Eigen::VectorXd>& y0 = std::nullopt);

/// Inequality-form ALM from z0 >= 0. With no constraints a single inner
/// solve of f is performed.
AlmTrace solve_ineq_alm(const IneqProblem& q, const Eigen::VectorXd& z0, const AlmConfig& cfg,
                        const std::optional<IneqOracle>& oracle = std::nullopt,
                        const std::optional<Eigen::VectorXd>& x0 = std::nullopt);

/// Residuals of (x, z) for min f s.t. g(x) <= 0:
///   eta1 = ||max(g,0)|| / (1 + ||h||), eta2 = 0,
///   eta3 = ||grad f + G^T z|| / (1 + ||c||), eta4 = ||min(z,0)|| / (1 + ||z||),
///   eta5 = |z' g(x)| / (1 + |f(x)|); eps1 uses f_star when given.
ResidualSet ineq_residuals(const IneqProblem& q, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& z, std::optional<double> f_star = std::nullopt);

/// Checks along a primal-form trace:
///   | ||A X_{k+1} - b|| - ||y_k - y_{k+1}|| / r_k |           (identity)
///   dist_psd(X_{k+1}) - ||Z_k - Z_{k+1}|| / r_k <= 0          (inequality)
///   lambda_min(Z_k) (cone membership)
/// and, with an oracle, the step bound ||w_{k+1} - w_k|| <= dist(w_k)/(1 - delta_k)
/// on iterations whose criterion (B') held.
struct AlmStructureReport {
  double max_identity_error = 0.0;
  double max_cone_excess = 0.0;
  double min_dual_eigenvalue = 0.0;
  int step_bound_checked = 0;
  int step_bound_violations = 0;
};
AlmStructureReport check_alm_structure(const SdpProblem& p, const AlmTrace& trace,
                                       const std::optional<SdpOracle>& oracle = std::nullopt);

// ---------------------------------------------------------------------------
// Proximal point method.

/// prox_{c f}(x) = argmin_u f(u) + ||u - x||^2 / (2c).
using ProxOracle = std::function<Eigen::VectorXd(const Eigen::VectorXd& x, double c)>;

struct PpmSchedule {
  std::function<double(int)> c;
  std::function<double(int)> eps;
  std::function<double(int)> delta;
};

struct PpmTrace {
  std::vector<Eigen::VectorXd> iterates;  ///< x_0, x_1, ...
  std::vector<double> c;
  std::vector<double> eps;
  std::vector<double> delta;
};

PpmTrace ppm(const ProxOracle& prox, const Eigen::VectorXd& x0, const PpmSchedule& schedule,
             int iterations);

/// Lemma-style rate bound (theta + 2 delta) / (1 - delta); requires 0 <= delta < 1.
double ppm_rate_bound(double theta, double delta);

/// prox of -g0 for an SDP: the exact multiplier update after minimizing
/// L_r(., w) to certified gap `accuracy`. Points are flattened as [y; svec(Z)].
ProxOracle sdp_dual_prox(const SdpProblem& p, double accuracy);

Eigen::VectorXd flatten(const DualPoint& w);
DualPoint unflatten(const SdpProblem& p, const Eigen::VectorXd& v);

/// Per-iteration check of
///   ||w_{k+1} - prox_{r_k,-g0}(w_k)||^2 / (2 r_k) <= L_{r_k}(X_{k+1}, w_k) - min L_{r_k}(., w_k).
/// The prox is replaced by a reference point p~ from a solve 10x tighter than the
/// recorded certificate G_k (with its own certificate G_ref), so the tested form is
///   ||w_{k+1} - p~||^2 / (2 r_k) <= (sqrt(G_k) + sqrt(G_ref))^2 + prox_accuracy.
struct PpmLinkEntry {
  int k = 0;
  double lhs = 0.0;
  double gap_bound = 0.0;
  double reference_gap = 0.0;
  bool holds = true;
};
struct PpmLinkReport {
  std::vector<PpmLinkEntry> entries;
  std::vector<int> violations;
};
PpmLinkReport verify_ppm_alm_link(const SdpProblem& p, const AlmTrace& trace,
                                  double prox_accuracy);

struct RateFit {
  double rate_q = 1.0;
  double r_squared = 1.0;
  int points = 0;
};

/// Least squares of log(series) against the index over the trailing
/// ceil(tail_fraction * size) entries. Throws std::invalid_argument if the
/// window has fewer than 3 points, an entry is not positive, or
/// tail_fraction is outside (0, 1].
RateFit fit_linear_rate(const std::vector<double>& series, double tail_fraction);

}  // namespace conic_alm

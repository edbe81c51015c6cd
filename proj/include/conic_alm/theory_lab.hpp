#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "conic_alm/sdp_model.hpp"
#include "conic_alm/symcone.hpp"

// Sampling verifiers for growth conditions, error bounds, exact penalties and
// related structural facts about SDPs with known solutions. All verifiers are
// deterministic given the seed.

namespace conic_alm {

struct GrowthSample {
  Eigen::VectorXd point;  ///< flattened sample (svec(X), y, or [y; svec(Z)])
  double lhs = 0.0;
  double dist_sq = 0.0;
};

struct GrowthReport {
  int sampled_points = 0;
  /// Samples with dist^2 > 1e-12; the ratio is taken over these only.
  int counted_points = 0;
  double min_ratio = 0.0;
  /// Violations: lhs < kappa * dist^2 - tol when a kappa is asserted, and
  /// lhs <= 0 with dist^2 > 1e-12 otherwise. At most 20 are stored.
  std::vector<GrowthSample> violated;
  int violation_count = 0;
  double gamma = 0.0;
  double alpha = 0.0;
  double rho = 0.0;
  double ball_radius = 0.0;
  std::optional<double> kappa;
};

struct GrowthOptions {
  int samples = 10000;
  double ball_radius = 1.0;
  std::uint64_t seed = 1;
  /// Asserted constant; when unset only positivity is checked.
  std::optional<double> kappa;
};

/// 2 (1 + ||y*|| + ||X*||).
double default_gamma(const KnownSolutionInstance& inst);
/// 2 (1 + ||y*|| + ||X*|| + ||Z*||); the cone term needs alpha >= ||Z*||.
double default_alpha(const KnownSolutionInstance& inst);

/// <C,X> - p* + gamma ||A(X) - b|| >= kappa ||X - X*||^2.
/// Indicator variant: PSD samples. Penalty variant (rho > tr Z* required):
/// affine-feasible samples, objective <C,X> + rho max{0, lambda_max(-X)}.
/// Requires a unique primal solution.
GrowthReport verify_qg_primal(const KnownSolutionInstance& inst, double gamma,
                              const GrowthOptions& opts, bool use_penalty = false,
                              double rho = 0.0);

/// <C,X> - p* + gamma ||A(X) - b|| + alpha dist(X, PSD) >= kappa ||X - X*||^2
/// over unconstrained samples.
GrowthReport verify_eb_primal(const KnownSolutionInstance& inst, double gamma, double alpha,
                              const GrowthOptions& opts);

/// Regular grid over a box in R^2 (used for two-constraint dual checks).
struct Grid2 {
  double lo = -1.0;
  double hi = 1.0;
  int points = 201;
};
/// [-1, 1]^2 with 201 x 201 points.
Grid2 fig_d1_grid();

/// Penalty form of the dual: f(y) = -<b,y> + rho max{0, lambda_max(A^*(y) - C)}.
double dual_penalty_value(const SdpProblem& p, const Eigen::VectorXd& y, double rho);

/// Dual growth.
/// Indicator variant: samples (y, Z) with Z PSD and
///   d* - <b,y> + gamma ||C - A^*(y) - Z|| >= kappa (||y - y*||^2 + ||Z - Z*||^2).
/// Penalty variant (rho > tr X* required): samples y and
///   f(y) - f* >= kappa ||y - y*||^2, f* = -d*.
/// With a grid (penalty variant, m = 2) the grid replaces random sampling.
/// Requires a unique dual solution.
GrowthReport verify_qg_dual(const KnownSolutionInstance& inst, double gamma,
                            const GrowthOptions& opts, bool use_penalty = false,
                            double rho = 0.0, const std::optional<Grid2>& grid = std::nullopt);

/// d* - <b,y> + gamma ||C - A^*(y) - Z|| + alpha dist(Z, PSD) >= kappa dist^2
/// over unconstrained (y, Z) samples.
GrowthReport verify_eb_dual(const KnownSolutionInstance& inst, double gamma, double alpha,
                            const GrowthOptions& opts);

/// One row per y1 of the curve y2 = y1 / (y1 - 1) for the 2x2 example with
/// rho = 4: f - f* evaluated through the penalty, the closed form
/// -y1^2 / (y1 - 1), the lower bound |y1 / (y1 - 1)| on dist(y, S) and the
/// ratio (f - f*) / ||y||.
struct CurveRow {
  double y1 = 0.0;
  double y2 = 0.0;
  double value_gap = 0.0;
  double closed_form = 0.0;
  double dist_lower = 0.0;
  double dist = 0.0;
  double ratio = 0.0;
};
struct CurveTable {
  std::vector<CurveRow> rows;
  double max_closed_form_error = 0.0;
  /// Ratio strictly decreases as y1 decreases toward 0.
  bool ratio_monotone = true;
};
/// Throws std::invalid_argument unless every grid value lies in [0, 1).
CurveTable no_sharp_growth_curve(const std::vector<double>& t_grid);

/// Subgradient test of -Zbar in the subdifferential of l = rho max{0, lambda_max(-.)}.
struct PreimageReport {
  int face_samples = 0;
  int face_passed = 0;     ///< face points where every probe satisfied the inequality
  int off_face_samples = 0;
  int off_face_detected = 0;  ///< off-face points where some probe failed
  int probes_per_point = 0;
  int face_dimension = 0;  ///< n - rank(Zbar)
};
/// Requires Zbar PSD and tr(Zbar) < rho.
PreimageReport verify_penalty_preimage(const SymMatrix& zbar, double rho, int samples,
                                       std::uint64_t seed = 1);

struct GrowthLemmaReport {
  double kappa = 0.0;
  double lambda1_min = 0.0;
  int samples = 0;
  int violations = 0;
  double min_ratio = 0.0;  ///< over samples with positive distance
  /// Penalty-case check (when requested).
  std::optional<double> penalty_kappa;
  int penalty_violations = 0;
};
/// <Zbar, X> >= kappa dist^2(X, face(Zbar)) for PSD X in the ball B(Xbar, mu),
/// kappa = lambda_min(Lambda_1) / (3 mu + 2 ||Xbar||). With `penalty_rho` the
/// non-PSD version l(X) + <Zbar, X> >= kappa_p dist^2 is also tested with
/// kappa_p = min{(rho - tr Zbar) / (2 n mu), kappa / 2}.
GrowthLemmaReport verify_growth_lemma(const SymMatrix& xbar, const SymMatrix& zbar, double mu,
                                      int samples, std::uint64_t seed = 1,
                                      std::optional<double> penalty_rho = std::nullopt);

/// Random complementary PSD pair (Xbar, Zbar) with complementary ranges.
std::pair<SymMatrix, SymMatrix> random_complementary_pair(int n, int rank_x, std::uint64_t seed);

struct TraceBoundReport {
  int samples = 0;
  int violations = 0;
  /// max of ||B||^2 - ||D||_op tr(A) (nonpositive when the bound holds).
  double max_excess = 0.0;
};
/// Random PSD block splits [[A, B], [B^T, D]] with n in [n_min, n_max].
TraceBoundReport check_trace_bound(int samples, int n_min = 2, int n_max = 8,
                                   std::uint64_t seed = 1);
/// The single-matrix check: ||B||^2 - ||D||_op tr(A) for a split after `split` rows.
double trace_bound_excess(const SymMatrix& m, Eigen::Index split);

struct ComplementarityReport {
  Eigen::Index rank_x = 0;
  Eigen::Index rank_z = 0;
  bool holds = false;
};
/// Throws std::invalid_argument when x or z is not PSD within tol or <x,z> > tol.
ComplementarityReport check_strict_complementarity(const SymMatrix& x, const SymMatrix& z,
                                                   double tol = 1e-8);

struct PenaltySolve {
  SymMatrix x;
  double value = 0.0;
  double infeasibility = 0.0;
  int iterations = 0;
  bool diverged = false;
};
/// min <C,X> + rho max{0, lambda_max(-X)} s.t. A(X) = b by an augmented
/// Lagrangian on the affine constraint with proximal-gradient inner solves.
PenaltySolve solve_penalized(const SdpProblem& p, double rho, int max_outer = 200,
                             int inner_max_iter = 20000);

struct PenaltyEquivalenceReport {
  double rho = 0.0;
  double distance = 0.0;    ///< ||X_rho - X*||
  double value_gap = 0.0;   ///< |value - p*|
  bool matches = false;     ///< distance <= 1e-5 and value_gap <= 1e-7
  double control_rho = 0.0; ///< tr(Z*) / 2
  double control_value = 0.0;
  double control_distance = 0.0;
  bool control_detected = false;  ///< value below p* or minimizer away from X*
};
/// Requires rho > tr(Z*).
PenaltyEquivalenceReport exact_penalty_equivalence(const KnownSolutionInstance& inst,
                                                   double rho);

}  // namespace conic_alm

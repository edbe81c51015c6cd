#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "conic_alm/symcone.hpp"
#include "conic_alm/theory_lab.hpp"
#include "test_util.hpp"

using namespace conic_alm;

namespace {

SymMatrix mat2(double a, double b, double c) { return SymMatrix(Eigen::Matrix2d{{a, b}, {b, c}}); }

// Largest eigenvalue of [[a, b], [b, c]] in closed form.
double lmax2(double a, double b, double c) {
  return 0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

KnownSolutionInstance unique4(std::uint64_t seed) {
  KnownSolutionInstance k = synth_known_solution(4, 5, 2, seed);
  EXPECT_TRUE(k.unique_primal && k.unique_dual);
  return k;
}

GrowthOptions opts_with(int samples, double radius = 1.0, std::optional<double> kappa = std::nullopt) {
  GrowthOptions o;
  o.samples = samples;
  o.ball_radius = radius;
  o.kappa = kappa;
  return o;
}

}  // namespace

// --- trace bound ---------------------------------------------------------------------------

TEST(TraceBound, Examples) {
  // Rank one: ||D||_op tr(A) = 1 = ||B||^2.
  EXPECT_NEAR(trace_bound_excess(mat2(1, 1, 1), 1), 0.0, 1e-15);
  EXPECT_EQ(trace_bound_excess(SymMatrix(3), 1), 0.0);
  EXPECT_NEAR(trace_bound_excess(mat2(2, 1, 1), 1), 1.0 - 2.0, 1e-15);
  EXPECT_THROW(trace_bound_excess(mat2(1, 0, 1), 0), std::invalid_argument);
  EXPECT_THROW(trace_bound_excess(mat2(1, 0, 1), 2), std::invalid_argument);
}

TEST(TraceBound, RandomSplitsHold) {
  const TraceBoundReport rep = check_trace_bound(10000, 2, 8, 5);
  EXPECT_EQ(rep.samples, 10000);
  EXPECT_EQ(rep.violations, 0);
  EXPECT_LE(rep.max_excess, 0.0 + 1e-10);
}

TEST(TraceBound, IndefiniteMatrixBreaksIt) {
  // Without PSD the bound fails: A = D = 0, B = 1.
  EXPECT_NEAR(trace_bound_excess(mat2(0, 1, 0), 1), 1.0, 1e-15);
}

// --- strict complementarity ---------------------------------------------------------------

TEST(StrictComplementarity, Examples) {
  const KnownSolutionInstance d1 = example_d1();
  const ComplementarityReport r = check_strict_complementarity(d1.x_star, d1.z_star);
  EXPECT_EQ(r.rank_x, 1);
  EXPECT_EQ(r.rank_z, 1);
  EXPECT_TRUE(r.holds);

  EXPECT_TRUE(check_strict_complementarity(SymMatrix::identity(3), SymMatrix(3)).holds);

  const ComplementarityReport d = check_strict_complementarity(
      SymMatrix::diagonal(Eigen::Vector3d(1, 0, 0)), SymMatrix::diagonal(Eigen::Vector3d(0, 1, 0)));
  EXPECT_EQ(d.rank_x + d.rank_z, 2);
  EXPECT_FALSE(d.holds);
}

TEST(StrictComplementarity, Preconditions) {
  EXPECT_THROW(check_strict_complementarity(-1.0 * SymMatrix::identity(2), SymMatrix(2)), std::invalid_argument);
  EXPECT_THROW(check_strict_complementarity(SymMatrix::identity(2), SymMatrix::identity(2)), std::invalid_argument);
  EXPECT_THROW(check_strict_complementarity(SymMatrix::identity(2), SymMatrix(3)), std::invalid_argument);
}

TEST(StrictComplementarity, CertifiedInstancesByConstruction) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const KnownSolutionInstance k = synth_known_solution(5, 6, 1 + static_cast<int>(s % 4), s);
    EXPECT_TRUE(check_strict_complementarity(k.x_star, k.z_star).holds);
  }
}

// --- 2x2 example curve ---------------------------------------------------------------------

TEST(DualPenalty, ExampleD1ClosedForm) {
  const KnownSolutionInstance d1 = example_d1();
  EXPECT_EQ(dual_penalty_value(d1.problem, Eigen::Vector2d(0, 0), 4.0), 0.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double a = u(rng), b = u(rng);
    // A^*(y) - C = [[a - 1, 1], [1, b - 1]].
    const double expect = -(a + b) + 4.0 * std::max(0.0, lmax2(a - 1, 1, b - 1));
    ASSERT_NEAR(dual_penalty_value(d1.problem, Eigen::Vector2d(a, b), 4.0), expect, 1e-12);
  }
}

TEST(NoSharpGrowth, Examples) {
  const CurveTable t = no_sharp_growth_curve({0.0, 0.5});
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0].value_gap, 0.0);
  EXPECT_EQ(t.rows[0].closed_form, 0.0);
  EXPECT_NEAR(t.rows[1].y2, -1.0, 1e-15);
  EXPECT_NEAR(t.rows[1].value_gap, 0.5, 1e-12);
  EXPECT_NEAR(t.rows[1].closed_form, 0.5, 1e-15);
  EXPECT_NEAR(t.rows[1].dist_lower, 1.0, 1e-15);
  EXPECT_LE(t.rows[1].ratio, 0.5 + 1e-12);
}

TEST(NoSharpGrowth, FullGrid) {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(0.1 * i);
  const CurveTable t = no_sharp_growth_curve(grid);
  EXPECT_LE(t.max_closed_form_error, 1e-10);
  EXPECT_TRUE(t.ratio_monotone);
  const KnownSolutionInstance d1 = example_d1();
  for (const CurveRow& r : t.rows) {
    const double closed = -r.y1 * r.y1 / (r.y1 - 1);
    ASSERT_NEAR(r.closed_form, closed, 1e-15);
    ASSERT_NEAR(dual_penalty_value(d1.problem, Eigen::Vector2d(r.y1, r.y1 / (r.y1 - 1)), 4.0), closed, 1e-10);
    ASSERT_GE(r.dist, r.dist_lower - 1e-15);
  }
  EXPECT_LT(t.rows.front().ratio, t.rows.back().ratio);
  EXPECT_THROW(no_sharp_growth_curve({0.5, 1.0}), std::invalid_argument);
  EXPECT_THROW(no_sharp_growth_curve({-0.1}), std::invalid_argument);
}

// --- quadratic growth and error bounds ------------------------------------------------------

TEST(QgDual, FigD1Grid) {
  const KnownSolutionInstance d1 = example_d1();
  const GrowthReport rep =
      verify_qg_dual(d1, default_gamma(d1), opts_with(1, 1.0, 0.3), true, 4.0, fig_d1_grid());
  EXPECT_EQ(rep.sampled_points, 201 * 201);
  EXPECT_EQ(rep.counted_points, 201 * 201 - 1);  // the origin is excluded
  EXPECT_GE(rep.min_ratio, 0.3);
  EXPECT_EQ(rep.violation_count, 0);
}

TEST(QgDual, FigD1GridDetectsTooLargeKappa) {
  const KnownSolutionInstance d1 = example_d1();
  const GrowthReport probe = verify_qg_dual(d1, default_gamma(d1), opts_with(1), true, 4.0, fig_d1_grid());
  const GrowthReport rep = verify_qg_dual(d1, default_gamma(d1), opts_with(1, 1.0, 1.5 * probe.min_ratio),
                                          true, 4.0, fig_d1_grid());
  EXPECT_GT(rep.violation_count, 0);
  EXPECT_FALSE(rep.violated.empty());
  EXPECT_LE(rep.violated.size(), 20u);
}

TEST(QgDual, CertifiedInstance) {
  const KnownSolutionInstance k = unique4(31);
  const GrowthReport ind = verify_qg_dual(k, default_gamma(k), opts_with(10000));
  EXPECT_GT(ind.min_ratio, 0.0);
  EXPECT_EQ(ind.violation_count, 0);
  const GrowthReport pen = verify_qg_dual(k, default_gamma(k), opts_with(10000), true, k.x_star.trace() + 1);
  EXPECT_GT(pen.min_ratio, 0.0);
  EXPECT_EQ(pen.violation_count, 0);
  EXPECT_THROW(verify_qg_dual(k, 1.0, opts_with(10), true, k.x_star.trace()), std::invalid_argument);
}

TEST(QgPrimal, CertifiedInstance) {
  const KnownSolutionInstance k = unique4(32);
  const GrowthReport rep = verify_qg_primal(k, default_gamma(k), opts_with(10000));
  EXPECT_EQ(rep.sampled_points, 10000);
  EXPECT_GT(rep.min_ratio, 0.0);
  EXPECT_EQ(rep.violation_count, 0);
  EXPECT_LE(rep.counted_points, rep.sampled_points);

  const double rho = k.z_star.trace() + 1;
  const GrowthReport pen = verify_qg_primal(k, default_gamma(k), opts_with(10000), true, rho);
  EXPECT_GT(pen.min_ratio, 0.0);
  EXPECT_EQ(pen.violation_count, 0);
  EXPECT_EQ(pen.rho, rho);
}

TEST(QgPrimal, NegativeControls) {
  const KnownSolutionInstance k = unique4(33);
  const GrowthReport probe = verify_qg_primal(k, default_gamma(k), opts_with(2000));
  const GrowthReport over = verify_qg_primal(k, default_gamma(k), opts_with(2000, 1.0, 2.0 * probe.min_ratio));
  EXPECT_GT(over.violation_count, 0);
  EXPECT_THROW(verify_qg_primal(k, 1.0, opts_with(10), true, k.z_star.trace()), std::invalid_argument);
  EXPECT_THROW(verify_qg_primal(k, 1.0, opts_with(10, 0.0)), std::invalid_argument);
  // No unique primal solution: the verifier refuses rather than approximating.
  const KnownSolutionInstance loose = synth_known_solution(5, 2, 3, 1);
  ASSERT_FALSE(loose.unique_primal);
  EXPECT_THROW(verify_qg_primal(loose, 1.0, opts_with(10)), std::invalid_argument);
}

TEST(EbPrimal, ExampleD1Region) {
  const KnownSolutionInstance d1 = example_d1();
  const double g = default_gamma(d1), a = default_alpha(d1);
  EXPECT_NEAR(g, 2.0 * (1 + 0 + 2), 1e-15);
  const GrowthReport rep = verify_eb_primal(d1, g, a, opts_with(10000));
  EXPECT_GT(rep.min_ratio, 0.0);
  EXPECT_EQ(rep.violation_count, 0);

  // X* - eps I by hand: <C,X> - p* = -2 eps, ||A X - b|| = sqrt(2) eps,
  // dist(X, PSD) = eps (eigenvalues 2 - eps, -eps), dist^2 = 2 eps^2.
  for (double eps : {1e-3, 0.1, 0.5}) {
    const double lhs = -2 * eps + g * std::sqrt(2.0) * eps + a * eps;
    EXPECT_GE(lhs / (2 * eps * eps), rep.min_ratio);
  }
}

TEST(EbPrimal, PsdFeasibleSamplesReduceToQg) {
  const KnownSolutionInstance k = unique4(34);
  const GrowthReport eb = verify_eb_primal(k, default_gamma(k), default_alpha(k), opts_with(5000));
  EXPECT_GT(eb.min_ratio, 0.0);
  EXPECT_EQ(eb.violation_count, 0);
  const GrowthReport over =
      verify_eb_primal(k, default_gamma(k), default_alpha(k), opts_with(5000, 1.0, 10.0 * eb.min_ratio));
  EXPECT_GT(over.violation_count, 0);
}

TEST(EbDual, CertifiedInstance) {
  const KnownSolutionInstance k = unique4(35);
  const GrowthReport rep = verify_eb_dual(k, default_gamma(k), default_alpha(k), opts_with(5000));
  EXPECT_GT(rep.min_ratio, 0.0);
  EXPECT_EQ(rep.violation_count, 0);
  const GrowthReport over =
      verify_eb_dual(k, default_gamma(k), default_alpha(k), opts_with(5000, 1.0, 10.0 * rep.min_ratio));
  EXPECT_GT(over.violation_count, 0);
}

// --- penalty preimage ------------------------------------------------------------------------

TEST(PenaltyPreimage, ZeroZbar) {
  const PreimageReport r = verify_penalty_preimage(SymMatrix(3), 1.0, 200);
  EXPECT_EQ(r.face_dimension, 3);
  EXPECT_EQ(r.face_passed, r.face_samples);
  EXPECT_EQ(r.off_face_detected, r.off_face_samples);
}

TEST(PenaltyPreimage, ScalarCase) {
  // l(x) = 2 max{0, -x} has subdifferential [-2, 0] at 0 and {0} for x > 0,
  // so -1 is a subgradient only at x = 0.
  const PreimageReport r = verify_penalty_preimage(SymMatrix::identity(1), 2.0, 200);
  EXPECT_EQ(r.face_dimension, 0);
  EXPECT_GT(r.face_samples, 0);
  EXPECT_EQ(r.face_passed, r.face_samples);
  EXPECT_GT(r.off_face_samples, 0);
  EXPECT_EQ(r.off_face_detected, r.off_face_samples);
  EXPECT_THROW(verify_penalty_preimage(SymMatrix::identity(1), 1.0, 10), std::invalid_argument);
}

TEST(PenaltyPreimage, ExampleD1) {
  const KnownSolutionInstance d1 = example_d1();
  const PreimageReport r = verify_penalty_preimage(d1.z_star, 4.0, 500);
  EXPECT_EQ(r.face_dimension, 1);
  EXPECT_EQ(r.face_passed, r.face_samples);
  EXPECT_EQ(r.off_face_detected, r.off_face_samples);
  EXPECT_GE(r.probes_per_point, 100);
  EXPECT_THROW(verify_penalty_preimage(d1.z_star, 2.0, 10), std::invalid_argument);
  EXPECT_THROW(verify_penalty_preimage(-1.0 * d1.z_star, 4.0, 10), std::invalid_argument);
}

// --- growth lemma -----------------------------------------------------------------------------

TEST(GrowthLemma, ExampleD1Constant) {
  const KnownSolutionInstance d1 = example_d1();
  const GrowthLemmaReport r = verify_growth_lemma(d1.x_star, d1.z_star, 1.0, 10000);
  EXPECT_NEAR(r.lambda1_min, 2.0, 1e-12);
  EXPECT_NEAR(r.kappa, 2.0 / 7.0, 1e-12);
  EXPECT_EQ(r.samples, 10000);
  EXPECT_EQ(r.violations, 0);
  EXPECT_GE(r.min_ratio, r.kappa);
}

TEST(GrowthLemma, ZeroZbar) {
  const GrowthLemmaReport r = verify_growth_lemma(SymMatrix::identity(2), SymMatrix(2), 1.0, 500);
  EXPECT_EQ(r.violations, 0);
}

TEST(GrowthLemma, RandomComplementaryPairs) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto [x, z] = random_complementary_pair(4, 1 + static_cast<int>(s % 3), s);
    ASSERT_NEAR(x.inner(z), 0.0, 1e-10);
    ASSERT_TRUE(is_psd(x) && is_psd(z));
    const GrowthLemmaReport r = verify_growth_lemma(x, z, 1.0, 10000, s, z.trace() + 1);
    EXPECT_EQ(r.violations, 0) << "seed " << s;
    EXPECT_EQ(r.penalty_violations, 0) << "seed " << s;
    ASSERT_TRUE(r.penalty_kappa.has_value());
  }
}

TEST(GrowthLemma, Preconditions) {
  const KnownSolutionInstance d1 = example_d1();
  EXPECT_THROW(verify_growth_lemma(d1.x_star, SymMatrix::identity(2), 1.0, 10), std::invalid_argument);
  EXPECT_THROW(verify_growth_lemma(d1.x_star, d1.z_star, 0.0, 10), std::invalid_argument);
  EXPECT_THROW(verify_growth_lemma(d1.x_star, d1.z_star, 1.0, 10, 1, 1.0), std::invalid_argument);
}

// --- exact penalty ----------------------------------------------------------------------------

TEST(ExactPenalty, ExampleD1) {
  const KnownSolutionInstance d1 = example_d1();
  const PenaltyEquivalenceReport r = exact_penalty_equivalence(d1, 4.0);
  EXPECT_TRUE(r.matches);
  EXPECT_LE(r.distance, 1e-5);
  EXPECT_LE(r.value_gap, 1e-7);
  EXPECT_EQ(r.control_rho, 1.0);
  EXPECT_TRUE(r.control_detected);
  EXPECT_THROW(exact_penalty_equivalence(d1, 2.0), std::invalid_argument);
}

TEST(ExactPenalty, LargerRhoSameMinimizer) {
  const KnownSolutionInstance d1 = example_d1();
  const PenaltySolve a = solve_penalized(d1.problem, 4.0);
  const PenaltySolve b = solve_penalized(d1.problem, 40.0);
  EXPECT_LE((a.x - b.x).norm(), 1e-5);
  EXPECT_LE((a.x - d1.x_star).norm(), 1e-5);
}

TEST(ExactPenalty, CertifiedInstances) {
  for (std::uint64_t s = 1; s <= 3; ++s) {
    const KnownSolutionInstance k = unique4(50 + s);
    const PenaltyEquivalenceReport r = exact_penalty_equivalence(k, 1.1 * k.z_star.trace());
    EXPECT_TRUE(r.matches) << "seed " << s << " distance " << r.distance;
    EXPECT_TRUE(r.control_detected) << "seed " << s;
  }
}

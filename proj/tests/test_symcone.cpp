#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "conic_alm/symcone.hpp"
#include "test_util.hpp"

using namespace conic_alm;
using conic_alm::testing::random_dim;
using conic_alm::testing::random_psd;
using conic_alm::testing::random_sym;

namespace {

SymMatrix mat2(double a, double b, double c) {
  Eigen::Matrix2d m;
  m << a, b, b, c;
  return SymMatrix(Eigen::MatrixXd(m));
}

// Closed-form eigenvalues of [[a, b], [b, c]] in nonincreasing order.
Eigen::Vector2d eig2(double a, double b, double c) {
  const double mid = 0.5 * (a + c);
  const double rad = std::hypot(0.5 * (a - c), b);
  return {mid + rad, mid - rad};
}

}  // namespace

// --- SymMatrix ---------------------------------------------------------------

TEST(SymMatrix, ConstructorSymmetrizes) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 4, 3;
  const SymMatrix s(m);
  EXPECT_EQ(s(0, 1), 3.0);
  EXPECT_EQ(s(1, 0), 3.0);
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd(2, 3)), std::invalid_argument);
  EXPECT_THROW(SymMatrix(Eigen::MatrixXd(0, 0)), std::invalid_argument);
}

TEST(SymMatrix, SvecIsIsometric) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = random_dim(rng, 1, 7);
    const SymMatrix a = random_sym(rng, n), b = random_sym(rng, n);
    EXPECT_NEAR(a.svec().dot(b.svec()), a.inner(b), 1e-12 * (1 + a.norm() * b.norm()));
    EXPECT_EQ(SymMatrix::from_svec(a.svec(), n).svec(), a.svec());
    EXPECT_EQ(a.svec().size(), svec_dim(n));
  }
}

// --- eig_sym -----------------------------------------------------------------

TEST(EigSym, DiagonalInput) {
  const EigDecomp e = eig_sym(SymMatrix::diagonal(Eigen::Vector2d(3, 1)));
  EXPECT_EQ(e.eigenvalues, Eigen::Vector2d(3, 1));
  EXPECT_TRUE(e.eigenvectors.isApprox(Eigen::Matrix2d::Identity(), 1e-14));
}

TEST(EigSym, OffDiagonalTwoByTwo) {
  const EigDecomp e = eig_sym(mat2(0, 1, 0));
  const Eigen::Vector2d oracle = eig2(0, 1, 0);
  EXPECT_NEAR(e.eigenvalues(0), oracle(0), 1e-15);
  EXPECT_NEAR(e.eigenvalues(1), oracle(1), 1e-15);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(e.eigenvectors.col(0).dot(Eigen::Vector2d(s, s))), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(e.eigenvectors.col(1).dot(Eigen::Vector2d(s, -s))), 1.0, 1e-14);
}

TEST(EigSym, IdentityAnySize) {
  for (int n = 1; n <= 6; ++n) {
    const EigDecomp e = eig_sym(SymMatrix::identity(n));
    EXPECT_TRUE(e.eigenvalues.isApprox(Eigen::VectorXd::Ones(n)));
    // Canonical basis inside the single cluster.
    EXPECT_TRUE(e.eigenvectors.isApprox(Eigen::MatrixXd::Identity(n, n), 1e-12));
  }
}

TEST(EigSym, RejectsNonFinite) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  m(0, 0) = std::nan("");
  EXPECT_THROW(eig_sym(SymMatrix(m)), std::invalid_argument);
}

TEST(EigSym, RandomAgainstClosedForm) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int t = 0; t < 200; ++t) {
    const double a = g(rng), b = g(rng), c = g(rng);
    const Eigen::Vector2d oracle = eig2(a, b, c);
    const EigDecomp e = eig_sym(mat2(a, b, c));
    EXPECT_NEAR(e.eigenvalues(0), oracle(0), 1e-13);
    EXPECT_NEAR(e.eigenvalues(1), oracle(1), 1e-13);
  }
}

TEST(EigSym, InvariantsOnRandomMatrices) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 300; ++t) {
    const Eigen::Index n = random_dim(rng, 1, 10);
    const SymMatrix x = random_sym(rng, n, 3.0);
    const EigDecomp e = eig_sym(x);
    const Eigen::MatrixXd& q = e.eigenvectors;
    const Eigen::MatrixXd rec = q * e.eigenvalues.asDiagonal() * q.transpose();
    EXPECT_LE((rec - x.dense()).norm(), 1e-10 * (1 + x.norm()));
    EXPECT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
    for (Eigen::Index i = 1; i < n; ++i) EXPECT_GE(e.eigenvalues(i - 1), e.eigenvalues(i));
  }
}

TEST(EigSym, DeterministicUnderRepeatedClusters) {
  // Repeated eigenvalue: the returned basis depends only on the input.
  std::mt19937_64 rng(8);
  const Eigen::MatrixXd q = random_orthonormal(rng, 5);
  const Eigen::VectorXd d = (Eigen::VectorXd(5) << 2, 2, 2, -1, -1).finished();
  const SymMatrix x(Eigen::MatrixXd(q * d.asDiagonal() * q.transpose()));
  const EigDecomp a = eig_sym(x), b = eig_sym(x);
  EXPECT_EQ(a.eigenvectors, b.eigenvectors);
  EXPECT_EQ(a.eigenvalues, b.eigenvalues);
}

// --- projection, distance, Moreau ---------------------------------------------

TEST(ProjectPsd, Examples) {
  EXPECT_TRUE(project_psd(SymMatrix::diagonal(Eigen::Vector2d(2, -3)))
                  .dense()
                  .isApprox(Eigen::Vector2d(2, 0).asDiagonal().toDenseMatrix()));
  EXPECT_LE((project_psd(mat2(0, 1, 0)) - mat2(0.5, 0.5, 0.5)).norm(), 1e-15);
  EXPECT_LE((project_psd(mat2(1, 1, 1)) - mat2(1, 1, 1)).norm(), 1e-14);
}

TEST(DistPsd, Examples) {
  EXPECT_NEAR(dist_psd(SymMatrix::diagonal(Eigen::Vector2d(1, -2))), 2.0, 1e-15);
  EXPECT_EQ(dist_psd(SymMatrix::identity(3)), 0.0);
  EXPECT_NEAR(dist_psd(mat2(0, 1, 0)), 1.0, 1e-15);
}

TEST(MoreauSplit, Examples) {
  const MoreauSplit s = moreau_split(SymMatrix::diagonal(Eigen::Vector2d(1, -2)));
  EXPECT_LE((s.positive - SymMatrix::diagonal(Eigen::Vector2d(1, 0))).norm(), 1e-15);
  EXPECT_LE((s.negative - SymMatrix::diagonal(Eigen::Vector2d(0, 2))).norm(), 1e-15);

  const SymMatrix psd = mat2(2, 1, 1);
  const MoreauSplit p = moreau_split(psd);
  EXPECT_LE((p.positive - psd).norm(), 1e-14);
  EXPECT_LE(p.negative.norm(), 1e-14);

  const SymMatrix x = mat2(0, 1, 0);
  const MoreauSplit h = moreau_split(x);
  EXPECT_LE((h.positive - h.negative - x).norm(), 1e-15);
  EXPECT_NEAR(h.positive.inner(h.negative), 0.0, 1e-15);
  // Eigenvalues +-1 with eigenvectors (1, +-1)/sqrt(2): each part is a unit rank-one matrix.
  EXPECT_NEAR(h.positive.norm(), 1.0, 1e-15);
  EXPECT_NEAR(h.negative.norm(), 1.0, 1e-15);
  EXPECT_EQ(numerical_rank(h.positive), 1);
  EXPECT_EQ(numerical_rank(h.negative), 1);
}

TEST(ConeProperties, IdempotenceAndMoreauIdentity) {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const Eigen::Index n = random_dim(rng, 2, 10);
    const SymMatrix x = random_sym(rng, n, 2.0);
    const SymMatrix p = project_psd(x);
    EXPECT_LE((project_psd(p) - p).norm(), 1e-10);
    EXPECT_GE(lambda_min(p), -1e-10 * (1 + x.norm()));
    const SymMatrix nneg = project_psd(-x);
    EXPECT_LE((p - nneg - x).norm(), 1e-10 * (1 + x.norm()));
    EXPECT_LE(std::abs(p.inner(nneg)), 1e-8 * (1 + x.norm() * x.norm()));
    // Penalty / distance domination.
    EXPECT_LE(std::max(0.0, -lambda_min(x)), dist_psd(x) + 1e-12);
  }
}

TEST(ConeProperties, DistPsdFromEigenvalues) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix x = random_sym(rng, random_dim(rng, 1, 8));
    const Eigen::VectorXd ev = eig_sym(x).eigenvalues;
    EXPECT_NEAR(dist_psd(x), ev.cwiseMin(0.0).norm(), 1e-12 * (1 + x.norm()));
  }
}

// --- exact penalty and subgradient ---------------------------------------------

TEST(ExactPenalty, Examples) {
  EXPECT_EQ(exact_penalty(SymMatrix::identity(2), 4.0), 0.0);
  EXPECT_NEAR(exact_penalty(-SymMatrix::identity(2), 4.0), 4.0, 1e-15);
  // 2x2 instance with C = [[1,-1],[-1,1]], y = 0: lambda_max(-C) = 0.
  EXPECT_NEAR(exact_penalty(mat2(1, -1, 1), 4.0), 0.0, 1e-15);
  EXPECT_THROW(exact_penalty(SymMatrix::identity(2), 0.0), std::invalid_argument);
  EXPECT_THROW(exact_penalty(SymMatrix::identity(2), -1.0), std::invalid_argument);
}

TEST(PenaltySubgrad, Examples) {
  EXPECT_EQ(penalty_subgrad(SymMatrix::identity(2), 1.0).norm(), 0.0);
  EXPECT_EQ(penalty_subgrad(SymMatrix::diagonal(Eigen::Vector2d(0, 1)), 3.0).norm(), 0.0);
  EXPECT_THROW(penalty_subgrad(SymMatrix::identity(2), 0.0), std::invalid_argument);

  const SymMatrix x = -SymMatrix::identity(2);
  const SymMatrix g = penalty_subgrad(x, 2.0);
  EXPECT_NEAR(g.trace(), -2.0, 1e-14);
  EXPECT_EQ(numerical_rank(-g), 1);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const SymMatrix y = random_sym(rng, 2, 2.0);
    EXPECT_GE(exact_penalty(y, 2.0), exact_penalty(x, 2.0) + g.inner(y - x) - 1e-8);
  }
}

TEST(PenaltySubgrad, SubgradientInequalityProperty) {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = random_dim(rng, 2, 6);
    const double rho = 0.5 + 3.0 * std::uniform_real_distribution<double>()(rng);
    const SymMatrix x = random_sym(rng, n);
    const SymMatrix g = penalty_subgrad(x, rho);
    const double lx = exact_penalty(x, rho);
    for (int s = 0; s < 200; ++s) {
      const SymMatrix y = random_sym(rng, n, 1.5);
      ASSERT_GE(exact_penalty(y, rho), lx + g.inner(y - x) - 1e-8);
    }
  }
}

// --- faces ---------------------------------------------------------------------

TEST(FaceBasis, Examples) {
  const FaceBasis a = face_basis(SymMatrix::diagonal(Eigen::Vector2d(1, 0)));
  EXPECT_EQ(a.rank(), 1);
  EXPECT_NEAR(std::abs(a.p1(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(a.p2(1, 0)), 1.0, 1e-15);
  EXPECT_NEAR(a.lambda1_min, 1.0, 1e-15);

  const FaceBasis d1 = face_basis(mat2(1, -1, 1));
  EXPECT_EQ(d1.rank(), 1);
  const double s = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(d1.p1.col(0).dot(Eigen::Vector2d(s, -s))), 1.0, 1e-14);
  EXPECT_NEAR(d1.lambda1_min, 2.0, 1e-14);

  const FaceBasis z = face_basis(SymMatrix(3));
  EXPECT_EQ(z.rank(), 0);
  EXPECT_TRUE(z.p2.isApprox(Eigen::MatrixXd::Identity(3, 3)));

  EXPECT_THROW(face_basis(SymMatrix::diagonal(Eigen::Vector2d(1, -1))), std::invalid_argument);
}

TEST(FaceBasis, InvariantsOnRandomPsd) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = random_dim(rng, 2, 8);
    const Eigen::Index r = random_dim(rng, 0, static_cast<int>(n));
    const SymMatrix z = r ? random_psd(rng, n, r) : SymMatrix(n);
    const FaceBasis f = face_basis(z);
    EXPECT_EQ(f.rank(), r);
    Eigen::MatrixXd q(n, n);
    q << f.p1, f.p2;
    EXPECT_LE((q.transpose() * q - Eigen::MatrixXd::Identity(n, n)).norm(), 1e-10);
    EXPECT_LE((z.dense() * f.p2).norm(), 1e-8 * (1 + z.norm()));
  }
}

TEST(DistToFace, Examples) {
  const FaceBasis f = face_basis(SymMatrix::diagonal(Eigen::Vector2d(1, 0)));
  EXPECT_NEAR(dist_to_face(SymMatrix::identity(2), f), 1.0, 1e-15);
  EXPECT_EQ(dist_to_face(SymMatrix(2), f), 0.0);
  const FaceBasis d1 = face_basis(mat2(1, -1, 1));
  EXPECT_NEAR(dist_to_face(mat2(1, 1, 1), d1), 0.0, 1e-14);
  // Zero Zbar: the face is the whole cone.
  const SymMatrix x = mat2(1, 2, -3);
  EXPECT_NEAR(dist_to_face(x, face_basis(SymMatrix(2))), dist_psd(x), 1e-14);
}

TEST(DistToFace, MatchesBruteForceN2) {
  // Face of diag(1, 0) is {diag(0, b) : b >= 0}.
  const FaceBasis f = face_basis(SymMatrix::diagonal(Eigen::Vector2d(1, 0)));
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const SymMatrix x = random_sym(rng, 2);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 4000; ++i) {
      const double b = i * 1e-3;
      best = std::min(best, (x - SymMatrix::diagonal(Eigen::Vector2d(0, b))).norm());
    }
    EXPECT_NEAR(dist_to_face(x, f), best, 1e-6);
  }
}

TEST(DistToFace, MatchesBruteForceN3) {
  // Face of e1 e1^T in S^3: P2 B P2^T with B a PSD 2x2 block, parameterized
  // as B = L L^T with lower-triangular L on a grid.
  const FaceBasis f = face_basis(SymMatrix::diagonal(Eigen::Vector3d(1, 0, 0)));
  std::mt19937_64 rng(7);
  const double h = 0.04;
  for (int t = 0; t < 5; ++t) {
    const SymMatrix x = random_sym(rng, 3, 0.7);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i) {
      for (int j = -40; j <= 40; ++j) {
        for (int k = 0; k <= 40; ++k) {
          Eigen::Matrix2d l;
          l << i * h, 0, j * h, k * h;
          const Eigen::MatrixXd b = l * l.transpose();
          best = std::min(best, (x - embed_in_face(f, b)).norm());
        }
      }
    }
    const double d = dist_to_face(x, f);
    EXPECT_LE(d, best + 1e-12);
    EXPECT_NEAR(d, best, 0.05);
  }
}

TEST(DistToFace, PsdFormulaAgainstDirectProjection) {
  // For PSD X: ||P1'XP1||^2 + 2||P1'XP2||^2 is the squared distance to the
  // face, and the closest face point is P2 (P2'XP2) P2^T.
  std::mt19937_64 rng(31);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index n = random_dim(rng, 2, 7);
    const Eigen::Index r = random_dim(rng, 1, static_cast<int>(n) - 1);
    const FaceBasis f = face_basis(random_psd(rng, n, r));
    const SymMatrix x = random_psd(rng, n, random_dim(rng, 1, static_cast<int>(n)));
    const SymMatrix closest = embed_in_face(f, x.congruence(f.p2));
    EXPECT_NEAR(dist_to_face(x, f), (x - closest).norm(), 1e-10 * (1 + x.norm()));
  }
}

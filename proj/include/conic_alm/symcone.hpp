#pragma once

#include <Eigen/Dense>

#include "conic_alm/sym_matrix.hpp"

// Geometry of the positive semidefinite cone: spectral kernels, projection,
// distances, the exact penalty rho * max{0, lambda_max(-X)} and the face
// {P2 B P2^T : B PSD} attached to a PSD matrix.

namespace conic_alm {

/// Eigenvalues in nonincreasing order; column i of `eigenvectors` pairs with
/// eigenvalue i. Eigenvectors are canonical: inside a cluster of (numerically)
/// equal eigenvalues the basis is re-orthonormalized against e_1, e_2, ...;
/// each isolated eigenvector has its first largest-magnitude entry positive.
struct EigDecomp {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

/// Throws std::invalid_argument on non-finite input.
EigDecomp eig_sym(const SymMatrix& x);

double lambda_min(const SymMatrix& x);
double lambda_max(const SymMatrix& x);

/// PSD membership: lambda_min >= -tol * (1 + ||X||).
bool is_psd(const SymMatrix& x, double tol = 1e-9);

/// Frobenius projection onto the PSD cone.
SymMatrix project_psd(const SymMatrix& x);

/// ||X - project_psd(X)||.
double dist_psd(const SymMatrix& x);

/// rho * max{0, lambda_max(-X)}. Throws std::invalid_argument if rho <= 0.
double exact_penalty(const SymMatrix& x, double rho);

/// One element of the subdifferential of exact_penalty(., rho) at X: zero when
/// lambda_min(X) >= 0, otherwise -rho * p p^T with p the unit eigenvector of
/// lambda_min(X) chosen by eig_sym.
SymMatrix penalty_subgrad(const SymMatrix& x, double rho);

/// Range/kernel split of a PSD matrix Zbar.
struct FaceBasis {
  Eigen::MatrixXd p1;  ///< n x r, eigenvectors of the positive eigenvalues
  Eigen::MatrixXd p2;  ///< n x (n - r), kernel
  double lambda1_min = 0.0;  ///< smallest eigenvalue kept in p1 (0 when r = 0)

  Eigen::Index rank() const { return p1.cols(); }
  Eigen::Index dim() const { return p1.rows(); }
};

/// Eigenvalues > rank_tol * lambda_max go to p1. Zbar = 0 yields r = 0.
/// Throws std::invalid_argument if Zbar is not PSD (is_psd default tolerance).
FaceBasis face_basis(const SymMatrix& zbar, double rank_tol = 1e-8);

/// Frobenius distance from X to the face {P2 B P2^T : B PSD}:
///   sqrt(||P1'XP1||^2 + 2||P1'XP2||^2 + dist_psd(P2'XP2)^2).
/// For PSD X the last term vanishes.
double dist_to_face(const SymMatrix& x, const FaceBasis& face);

/// P2 B P2^T for a symmetric B of size n - r.
SymMatrix embed_in_face(const FaceBasis& face, const Eigen::MatrixXd& b);

struct MoreauSplit {
  SymMatrix positive;  ///< project_psd(X)
  SymMatrix negative;  ///< project_psd(-X), so X = positive - negative
};

MoreauSplit moreau_split(const SymMatrix& x);

/// Number of eigenvalues > tol * max(lambda_max, 0). Zero matrix has rank 0.
Eigen::Index numerical_rank(const SymMatrix& x, double tol = 1e-8);

}  // namespace conic_alm

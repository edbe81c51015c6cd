#include "conic_alm/symcone.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace conic_alm {

namespace {

// Eigen returns ascending order; flip to nonincreasing.
void raw_eig(const SymMatrix& x, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  if (!x.all_finite()) throw std::invalid_argument("eig_sym: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_sym: solver failed");
  values = solver.eigenvalues().reverse();
  vectors = solver.eigenvectors().rowwise().reverse();
}

// Replace the columns [begin, end) by the Gram-Schmidt orthonormalization of
// the projections of e_1, e_2, ... onto their span.
void canonicalize_cluster(Eigen::MatrixXd& q, Eigen::Index begin, Eigen::Index end) {
  const Eigen::Index n = q.rows();
  const Eigen::Index k = end - begin;
  const Eigen::MatrixXd basis = q.middleCols(begin, k);
  Eigen::MatrixXd out(n, k);
  Eigen::Index found = 0;
  for (Eigen::Index i = 0; i < n && found < k; ++i) {
    // projection of e_i onto span(basis)
    Eigen::VectorXd v = basis * basis.row(i).transpose();
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < found; ++j) v -= out.col(j).dot(v) * out.col(j);
    }
    const double len = v.norm();
    if (len > 1e-6) out.col(found++) = v / len;
  }
  if (found == k) q.middleCols(begin, k) = out;
}

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-8)) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

}  // namespace

EigDecomp eig_sym(const SymMatrix& x) {
  EigDecomp d;
  raw_eig(x, d.eigenvalues, d.eigenvectors);
  const Eigen::Index n = x.dim();
  const double cluster_tol = 1e-12 * (1.0 + x.norm());
  Eigen::Index begin = 0;
  while (begin < n) {
    Eigen::Index end = begin + 1;
    while (end < n && d.eigenvalues(end - 1) - d.eigenvalues(end) <= cluster_tol) ++end;
    if (end - begin == 1) {
      fix_sign(d.eigenvectors.col(begin));
    } else {
      canonicalize_cluster(d.eigenvectors, begin, end);
    }
    begin = end;
  }
  return d;
}

double lambda_min(const SymMatrix& x) {
  if (!x.all_finite()) throw std::invalid_argument("lambda_min: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double lambda_max(const SymMatrix& x) {
  if (!x.all_finite()) throw std::invalid_argument("lambda_max: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(x.dim() - 1);
}

bool is_psd(const SymMatrix& x, double tol) {
  return lambda_min(x) >= -tol * (1.0 + x.norm());
}

SymMatrix project_psd(const SymMatrix& x) {
  Eigen::VectorXd values;
  Eigen::MatrixXd q;
  raw_eig(x, values, q);
  Eigen::Index pos = 0;
  while (pos < values.size() && values(pos) > 0.0) ++pos;
  if (pos == 0) return SymMatrix(x.dim());
  const Eigen::MatrixXd qp = q.leftCols(pos);
  return SymMatrix(Eigen::MatrixXd(qp * values.head(pos).asDiagonal() * qp.transpose()));
}

double dist_psd(const SymMatrix& x) {
  if (!x.all_finite()) throw std::invalid_argument("dist_psd: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseMin(0.0).norm();
}

double exact_penalty(const SymMatrix& x, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("exact_penalty: rho must be positive");
  return rho * std::max(0.0, -lambda_min(x));
}

SymMatrix penalty_subgrad(const SymMatrix& x, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("penalty_subgrad: rho must be positive");
  const EigDecomp d = eig_sym(x);
  const Eigen::Index last = x.dim() - 1;
  if (d.eigenvalues(last) >= 0.0) return SymMatrix(x.dim());
  return -rho * SymMatrix::outer(d.eigenvectors.col(last));
}

FaceBasis face_basis(const SymMatrix& zbar, double rank_tol) {
  if (!is_psd(zbar)) throw std::invalid_argument("face_basis: matrix is not PSD");
  const EigDecomp d = eig_sym(zbar);
  const Eigen::Index n = zbar.dim();
  const double top = d.eigenvalues(0);
  Eigen::Index r = 0;
  if (top > 0.0) {
    while (r < n && d.eigenvalues(r) > rank_tol * top) ++r;
  }
  FaceBasis f;
  f.p1 = d.eigenvectors.leftCols(r);
  f.p2 = d.eigenvectors.rightCols(n - r);
  f.lambda1_min = r > 0 ? d.eigenvalues(r - 1) : 0.0;
  return f;
}

double dist_to_face(const SymMatrix& x, const FaceBasis& face) {
  if (x.dim() != face.dim()) throw std::invalid_argument("dist_to_face: dimension mismatch");
  const Eigen::Index r = face.rank();
  const Eigen::Index k = face.p2.cols();
  double sq = 0.0;
  if (r > 0) {
    sq += (face.p1.transpose() * x.dense() * face.p1).squaredNorm();
    if (k > 0) sq += 2.0 * (face.p1.transpose() * x.dense() * face.p2).squaredNorm();
  }
  if (k > 0) {
    const double tail = dist_psd(SymMatrix(x.congruence(face.p2)));
    sq += tail * tail;
  }
  return std::sqrt(sq);
}

SymMatrix embed_in_face(const FaceBasis& face, const Eigen::MatrixXd& b) {
  const Eigen::Index k = face.p2.cols();
  if (b.rows() != k || b.cols() != k) {
    throw std::invalid_argument("embed_in_face: block size must equal kernel dimension");
  }
  if (k == 0) return SymMatrix(face.dim());
  return SymMatrix(Eigen::MatrixXd(face.p2 * b * face.p2.transpose()));
}

MoreauSplit moreau_split(const SymMatrix& x) {
  Eigen::VectorXd values;
  Eigen::MatrixXd q;
  raw_eig(x, values, q);
  const Eigen::VectorXd plus = values.cwiseMax(0.0);
  const Eigen::VectorXd minus = (-values).cwiseMax(0.0);
  return {SymMatrix(Eigen::MatrixXd(q * plus.asDiagonal() * q.transpose())),
          SymMatrix(Eigen::MatrixXd(q * minus.asDiagonal() * q.transpose()))};
}

Eigen::Index numerical_rank(const SymMatrix& x, double tol) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(x.dense(), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& v = solver.eigenvalues();
  const double top = std::max(v(v.size() - 1), 0.0);
  if (top == 0.0) return 0;
  return (v.array() > tol * top).count();
}

}  // namespace conic_alm

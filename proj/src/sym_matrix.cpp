#include "conic_alm/sym_matrix.hpp"

#include <cmath>
#include <stdexcept>

namespace conic_alm {

namespace {
constexpr double kSqrt2 = 1.4142135623730950488;
}

SymMatrix::SymMatrix(Eigen::Index n) {
  if (n < 1) throw std::invalid_argument("SymMatrix: dimension must be >= 1");
  m_ = Eigen::MatrixXd::Zero(n, n);
}

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw std::invalid_argument("SymMatrix: input must be a non-empty square matrix");
  }
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(Eigen::Index n) {
  SymMatrix s(n);
  s.m_.setIdentity();
  return s;
}

SymMatrix SymMatrix::diagonal(const Eigen::VectorXd& d) {
  SymMatrix s(d.size());
  s.m_.diagonal() = d;
  return s;
}

SymMatrix SymMatrix::outer(const Eigen::VectorXd& v) {
  return SymMatrix(Eigen::MatrixXd(v * v.transpose()));
}

SymMatrix SymMatrix::from_svec(const Eigen::VectorXd& v, Eigen::Index n) {
  if (v.size() != svec_dim(n)) {
    throw std::invalid_argument("SymMatrix::from_svec: length does not match dimension");
  }
  SymMatrix s(n);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      const double value = (i == j) ? v(k) : v(k) / kSqrt2;
      s.m_(i, j) = value;
      s.m_(j, i) = value;
      ++k;
    }
  }
  return s;
}

double SymMatrix::inner(const SymMatrix& other) const {
  if (other.dim() != dim()) throw std::invalid_argument("SymMatrix::inner: dimension mismatch");
  return m_.cwiseProduct(other.m_).sum();
}

Eigen::VectorXd SymMatrix::svec() const {
  const Eigen::Index n = dim();
  Eigen::VectorXd v(svec_dim(n));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      v(k++) = (i == j) ? m_(i, j) : kSqrt2 * m_(i, j);
    }
  }
  return v;
}

Eigen::MatrixXd SymMatrix::congruence(const Eigen::MatrixXd& q) const {
  if (q.rows() != dim()) throw std::invalid_argument("SymMatrix::congruence: dimension mismatch");
  Eigen::MatrixXd c = q.transpose() * m_ * q;
  return 0.5 * (c + c.transpose());
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
  if (o.dim() != dim()) throw std::invalid_argument("SymMatrix: dimension mismatch");
  m_ += o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
  if (o.dim() != dim()) throw std::invalid_argument("SymMatrix: dimension mismatch");
  m_ -= o.m_;
  return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

double pair_distance(const Eigen::VectorXd& y1, const SymMatrix& z1,
                     const Eigen::VectorXd& y2, const SymMatrix& z2) {
  const double dy = (y1 - y2).squaredNorm();
  const double dz = (z1 - z2).dense().squaredNorm();
  return std::sqrt(dy + dz);
}

}  // namespace conic_alm

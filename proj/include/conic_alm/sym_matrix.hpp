#pragma once

#include <Eigen/Dense>

namespace conic_alm {

/// Dense real symmetric n-by-n matrix.
///
/// Storage is a full Eigen matrix. Every constructor that accepts arbitrary
/// data symmetrizes it as (M + M^T) / 2, so entries (i, j) and (j, i) are
/// always bitwise equal. Arithmetic between symmetric matrices preserves this
/// exactly in IEEE arithmetic, so those paths skip the symmetrization.
class SymMatrix {
 public:
  /// Zero matrix of dimension n (n >= 1).
  explicit SymMatrix(Eigen::Index n);
  /// Symmetrizes `m`; throws std::invalid_argument if `m` is empty or not square.
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix zero(Eigen::Index n) { return SymMatrix(n); }
  static SymMatrix identity(Eigen::Index n);
  static SymMatrix diagonal(const Eigen::VectorXd& d);
  /// Outer product v v^T.
  static SymMatrix outer(const Eigen::VectorXd& v);
  /// Inverse of svec(); `n` is the matrix dimension.
  static SymMatrix from_svec(const Eigen::VectorXd& v, Eigen::Index n);

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& dense() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  /// Frobenius inner product.
  double inner(const SymMatrix& other) const;
  /// Frobenius norm.
  double norm() const { return m_.norm(); }
  double trace() const { return m_.trace(); }
  bool all_finite() const { return m_.allFinite(); }

  /// Isometric vectorization of the upper triangle (off-diagonal entries
  /// scaled by sqrt(2)), so that svec(A).dot(svec(B)) == <A, B>.
  Eigen::VectorXd svec() const;

  /// Congruence Q^T * this * Q for a (possibly rectangular) Q.
  Eigen::MatrixXd congruence(const Eigen::MatrixXd& q) const;

  SymMatrix& operator+=(const SymMatrix& o);
  SymMatrix& operator-=(const SymMatrix& o);
  SymMatrix& operator*=(double s);

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

  bool operator==(const SymMatrix& o) const {
    return dim() == o.dim() && m_ == o.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

inline double inner(const SymMatrix& a, const SymMatrix& b) { return a.inner(b); }

/// Length of svec() for an n-by-n matrix.
inline Eigen::Index svec_dim(Eigen::Index n) { return n * (n + 1) / 2; }

/// Euclidean distance between (y1, Z1) and (y2, Z2) in R^m x S^n.
double pair_distance(const Eigen::VectorXd& y1, const SymMatrix& z1,
                     const Eigen::VectorXd& y2, const SymMatrix& z2);

}  // namespace conic_alm

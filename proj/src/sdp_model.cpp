#include "conic_alm/sdp_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "conic_alm/random_matrix.hpp"
#include "conic_alm/symcone.hpp"

namespace conic_alm {

namespace {

// Smallest / largest singular value ratio; 0 for an empty column set.
double column_conditioning(const Eigen::MatrixXd& m) {
  if (m.cols() == 0) return 1.0;
  if (m.rows() < m.cols()) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

// Columns svec(B E_kl B^T) for a basis E_kl of symmetric k x k matrices.
Eigen::MatrixXd face_directions(const Eigen::MatrixXd& basis) {
  const Eigen::Index n = basis.rows();
  const Eigen::Index k = basis.cols();
  Eigen::MatrixXd out(svec_dim(n), svec_dim(k));
  Eigen::Index col = 0;
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index i = 0; i <= j; ++i) {
      Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      out.col(col++) = SymMatrix(Eigen::MatrixXd(basis * e * basis.transpose())).svec();
    }
  }
  return out;
}

}  // namespace

SdpProblem::SdpProblem(SymMatrix c, std::vector<SymMatrix> constraints, Eigen::VectorXd b,
                       std::string name)
    : c_(std::move(c)), a_(std::move(constraints)), b_(std::move(b)), name_(std::move(name)) {
  if (static_cast<Eigen::Index>(a_.size()) != b_.size()) {
    throw std::invalid_argument("SdpProblem: number of constraint matrices differs from size of b");
  }
  if (a_.empty()) throw std::invalid_argument("SdpProblem: at least one constraint is required");
  const Eigen::Index n = c_.dim();
  a_svec_.resize(m(), svec_dim(n));
  for (Eigen::Index i = 0; i < m(); ++i) {
    if (a_[i].dim() != n) throw std::invalid_argument("SdpProblem: constraint dimension mismatch");
    a_svec_.row(i) = a_[i].svec().transpose();
  }
  if (!c_.all_finite() || !b_.allFinite() || !a_svec_.allFinite()) {
    throw std::invalid_argument("SdpProblem: non-finite data");
  }
  const Eigen::MatrixXd gram = a_svec_ * a_svec_.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues()(0);
  const double hi = es.eigenvalues()(m() - 1);
  if (!(hi > 0.0) || lo <= 1e-10 * hi) {
    throw std::invalid_argument("SdpProblem: constraint matrices are linearly dependent");
  }
  gram_.compute(gram);
}

Eigen::VectorXd SdpProblem::solve_gram(const Eigen::VectorXd& v) const { return gram_.solve(v); }

Eigen::VectorXd apply_A(const SdpProblem& p, const SymMatrix& x) {
  if (x.dim() != p.n()) throw std::invalid_argument("apply_A: dimension mismatch");
  return p.svec_operator() * x.svec();
}

SymMatrix apply_Astar(const SdpProblem& p, const Eigen::VectorXd& y) {
  if (y.size() != p.m()) throw std::invalid_argument("apply_Astar: dimension mismatch");
  return SymMatrix::from_svec(p.svec_operator().transpose() * y, p.n());
}

double distance(const DualPoint& a, const DualPoint& b) {
  return pair_distance(a.y, a.Z, b.y, b.Z);
}

ResidualSet kkt_residuals(const SdpProblem& p, const SymMatrix& x, const DualPoint& w,
                          std::optional<double> p_star, std::optional<double> d_star) {
  ResidualSet r;
  const double cx = p.C().inner(x);
  const double by = p.b().dot(w.y);
  if (p_star) r.eps1 = std::abs(cx - *p_star) / (1.0 + std::abs(*p_star));
  if (d_star) r.eps2 = std::abs(by - *d_star) / (1.0 + std::abs(*d_star));
  r.eta[0] = (apply_A(p, x) - p.b()).norm() / (1.0 + p.b().norm());
  r.eta[1] = dist_psd(x) / (1.0 + x.norm());
  r.eta[2] = (p.C() - apply_Astar(p, w.y) - w.Z).norm() / (1.0 + p.C().norm());
  r.eta[3] = dist_psd(w.Z) / (1.0 + w.Z.norm());
  const double gap_scale = d_star ? std::abs(*d_star) : std::abs(by);
  r.eta[4] = std::abs(cx - by) / (1.0 + gap_scale);
  r.eps3 = *std::max_element(r.eta.begin(), r.eta.end());
  return r;
}

KnownSolutionInstance certify_instance(SdpProblem problem, SymMatrix x_star,
                                       Eigen::VectorXd y_star, SymMatrix z_star, double tol) {
  const SdpProblem& p = problem;
  if (x_star.dim() != p.n() || z_star.dim() != p.n() || y_star.size() != p.m()) {
    throw std::invalid_argument("certify_instance: dimension mismatch");
  }
  if ((apply_A(p, x_star) - p.b()).lpNorm<Eigen::Infinity>() > tol)
    throw std::runtime_error("certify_instance: A(X*) != b");
  if ((p.C() - apply_Astar(p, y_star) - z_star).dense().lpNorm<Eigen::Infinity>() > tol)
    throw std::runtime_error("certify_instance: Z* != C - A^*(y*)");
  if (lambda_min(x_star) < -tol) throw std::runtime_error("certify_instance: X* not PSD");
  if (lambda_min(z_star) < -tol) throw std::runtime_error("certify_instance: Z* not PSD");
  if (std::abs(x_star.inner(z_star)) > tol)
    throw std::runtime_error("certify_instance: <X*, Z*> != 0");
  const double p_star = p.C().inner(x_star);
  if (std::abs(p_star - p.b().dot(y_star)) > tol)
    throw std::runtime_error("certify_instance: <C, X*> != <b, y*>");

  // Uniqueness: range(X*) spans the primal face, ker(X*) the dual face.
  const EigDecomp ex = eig_sym(x_star);
  const Eigen::Index rx = numerical_rank(x_star);
  const Eigen::MatrixXd q1 = ex.eigenvectors.leftCols(rx);
  const Eigen::MatrixXd q2 = ex.eigenvectors.rightCols(p.n() - rx);

  const Eigen::MatrixXd primal_map = p.svec_operator() * face_directions(q1);
  const bool unique_primal = column_conditioning(primal_map) > 1e-8;

  Eigen::MatrixXd dual_map(svec_dim(p.n()), p.m() + svec_dim(q2.cols()));
  dual_map << p.svec_operator().transpose(), face_directions(q2);
  const bool unique_dual = column_conditioning(dual_map) > 1e-8;

  return KnownSolutionInstance{std::move(problem), std::move(x_star), std::move(y_star),
                               std::move(z_star), p_star, unique_primal, unique_dual};
}

KnownSolutionInstance synth_known_solution(int n, int m, int rank_x, std::uint64_t seed) {
  if (n < 1 || rank_x < 1 || rank_x > n) {
    throw std::invalid_argument("synth_known_solution: need 1 <= rank_x <= n");
  }
  if (m < 1 || m > svec_dim(n)) {
    throw std::invalid_argument("synth_known_solution: need 1 <= m <= n(n+1)/2");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spectrum(0.5, 2.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int attempt = 0; attempt < 20; ++attempt) {
    const Eigen::MatrixXd q = random_orthonormal(rng, n);
    Eigen::VectorXd dx = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd dz = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < rank_x; ++i) dx(i) = spectrum(rng);
    for (int i = rank_x; i < n; ++i) dz(i) = spectrum(rng);
    SymMatrix x_star(Eigen::MatrixXd(q * dx.asDiagonal() * q.transpose()));
    SymMatrix z_star(Eigen::MatrixXd(q * dz.asDiagonal() * q.transpose()));

    std::vector<SymMatrix> a;
    a.reserve(m);
    for (int i = 0; i < m; ++i) a.push_back(random_symmetric(rng, n));
    Eigen::VectorXd y_star(m);
    for (int i = 0; i < m; ++i) y_star(i) = normal(rng);

    try {
      // b and C are computed through the problem's own maps so that the KKT
      // identities hold to rounding.
      SdpProblem scratch(SymMatrix(n), a, Eigen::VectorXd::Zero(m));
      const Eigen::VectorXd b = apply_A(scratch, x_star);
      const SymMatrix c = apply_Astar(scratch, y_star) + z_star;
      SdpProblem problem(c, std::move(a), b,
                         "synth-n" + std::to_string(n) + "-m" + std::to_string(m) + "-r" +
                             std::to_string(rank_x) + "-s" + std::to_string(seed));
      return certify_instance(std::move(problem), std::move(x_star), std::move(y_star),
                              std::move(z_star));
    } catch (const std::invalid_argument&) {
      continue;  // dependent constraint matrices, redraw
    }
  }
  throw std::runtime_error("synth_known_solution: degenerate draws exhausted retries");
}

KnownSolutionInstance example_d1() {
  Eigen::MatrixXd c(2, 2);
  c << 1, -1, -1, 1;
  Eigen::MatrixXd x(2, 2);
  x << 1, 1, 1, 1;
  std::vector<SymMatrix> a{SymMatrix::diagonal(Eigen::Vector2d(1, 0)),
                           SymMatrix::diagonal(Eigen::Vector2d(0, 1))};
  SdpProblem p(SymMatrix(c), std::move(a), Eigen::Vector2d(1, 1), "example-d1");
  return certify_instance(std::move(p), SymMatrix(x), Eigen::Vector2d::Zero(), SymMatrix(c));
}

SdpProblem maxcut_instance(const Eigen::MatrixXd& weights, std::string name) {
  if (weights.rows() < 1 || weights.rows() != weights.cols()) {
    throw std::invalid_argument("maxcut_instance: weights must be square");
  }
  if (weights != weights.transpose()) {
    throw std::invalid_argument("maxcut_instance: weights must be symmetric");
  }
  if (weights.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw std::invalid_argument("maxcut_instance: weights must have a zero diagonal");
  }
  const Eigen::Index n = weights.rows();
  std::vector<SymMatrix> a;
  a.reserve(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e(i) = 1.0;
    a.push_back(SymMatrix::diagonal(e));
  }
  return SdpProblem(SymMatrix(weights), std::move(a), Eigen::VectorXd::Ones(n), std::move(name));
}

double IneqProblem::objective(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(Q * x) + c.dot(x) + offset;
}

Eigen::VectorXd IneqProblem::objective_gradient(const Eigen::VectorXd& x) const {
  return Q * x + c;
}

Eigen::VectorXd IneqProblem::constraint_values(const Eigen::VectorXd& x) const {
  if (num_constraints() == 0) return Eigen::VectorXd(0);
  return G * x + h;
}

void IneqProblem::validate() const {
  const Eigen::Index nv = num_vars();
  if (Q.rows() != nv || Q.cols() != nv) throw std::invalid_argument("IneqProblem: Q size");
  if (G.rows() != num_constraints() || (num_constraints() > 0 && G.cols() != nv)) {
    throw std::invalid_argument("IneqProblem: G size");
  }
  if (nv == 0) return;
  if (!(Q - Q.transpose()).isZero(0.0)) throw std::invalid_argument("IneqProblem: Q not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()(0) < -1e-9 * (1.0 + Q.norm())) {
    throw std::invalid_argument("IneqProblem: Q not PSD");
  }
}

IneqProblem svm_instance(const Eigen::MatrixXd& a, const Eigen::VectorXd& labels, double lambda) {
  const Eigen::Index m = a.rows();
  const Eigen::Index d = a.cols();
  if (labels.size() != m) throw std::invalid_argument("svm_instance: label count mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("svm_instance: lambda must be positive");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (labels(i) != 1.0 && labels(i) != -1.0) {
      throw std::invalid_argument("svm_instance: labels must be +1 or -1");
    }
  }
  IneqProblem q;
  q.name = "svm";
  q.Q = Eigen::MatrixXd::Zero(d + m, d + m);
  q.Q.topLeftCorner(d, d).setIdentity();
  q.c = Eigen::VectorXd::Zero(d + m);
  q.c.tail(m).setConstant(lambda);
  q.G = Eigen::MatrixXd::Zero(2 * m, d + m);
  q.G.topLeftCorner(m, d) = labels.asDiagonal() * a;
  q.G.topRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  q.G.bottomRightCorner(m, m) = -Eigen::MatrixXd::Identity(m, m);
  q.h = Eigen::VectorXd::Zero(2 * m);
  q.h.head(m).setOnes();
  q.validate();
  return q;
}

IneqProblem lasso_instance(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double lambda) {
  const Eigen::Index n = a.cols();
  if (b.size() != a.rows()) throw std::invalid_argument("lasso_instance: size mismatch");
  if (!(lambda > 0.0)) throw std::invalid_argument("lasso_instance: lambda must be positive");
  IneqProblem q;
  q.name = "lasso";
  q.Q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  q.Q.topLeftCorner(n, n) = a.transpose() * a;
  q.c = Eigen::VectorXd::Zero(2 * n);
  q.c.head(n) = -a.transpose() * b;
  q.c.tail(n).setConstant(lambda);
  q.offset = 0.5 * b.squaredNorm();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  q.G.resize(2 * n, 2 * n);
  q.G << eye, -eye, -eye, -eye;
  q.h = Eigen::VectorXd::Zero(2 * n);
  q.validate();
  return q;
}

IneqProblem svm_random(int m, int d, double lambda, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd a = gaussian(rng, m, d);
  std::bernoulli_distribution coin(0.5);
  Eigen::VectorXd labels(m);
  for (int i = 0; i < m; ++i) labels(i) = coin(rng) ? 1.0 : -1.0;
  IneqProblem q = svm_instance(a, labels, lambda);
  q.name = "svm-random-m" + std::to_string(m) + "-d" + std::to_string(d) + "-s" +
           std::to_string(seed);
  return q;
}

IneqProblem lasso_random(int m, int n, double lambda, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Eigen::MatrixXd a = gaussian(rng, m, n);
  const Eigen::VectorXd b = gaussian(rng, m, 1);
  IneqProblem q = lasso_instance(a, b, lambda);
  q.name = "lasso-random-m" + std::to_string(m) + "-n" + std::to_string(n) + "-s" +
           std::to_string(seed);
  return q;
}

}  // namespace conic_alm

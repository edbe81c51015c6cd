#include "conic_alm/theory_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "conic_alm/inner_solver.hpp"
#include "conic_alm/random_matrix.hpp"

namespace conic_alm {

namespace {

constexpr double kDistFloor = 1e-12;
constexpr std::size_t kMaxStoredViolations = 20;

// Symmetric perturbation with Frobenius norm about `sigma`. Half of the draws
// are shrunk by a log-uniform factor in [1e-3, 1] so that points close to the
// center are represented as well.
SymMatrix perturbation(std::mt19937_64& rng, Eigen::Index n, double sigma) {
  const Eigen::Index dim = svec_dim(n);
  Eigen::VectorXd v = gaussian(rng, dim, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double scale = sigma / std::sqrt(static_cast<double>(dim));
  if (unit(rng) < 0.5) scale *= std::pow(10.0, -3.0 * unit(rng));
  return SymMatrix::from_svec(scale * v, n);
}

Eigen::VectorXd vector_perturbation(std::mt19937_64& rng, Eigen::Index m, double sigma) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double scale = sigma / std::sqrt(static_cast<double>(m));
  if (unit(rng) < 0.5) scale *= std::pow(10.0, -3.0 * unit(rng));
  return scale * gaussian(rng, m, 1);
}

SymMatrix affine_project(const SdpProblem& p, const SymMatrix& x) {
  return x - apply_Astar(p, p.solve_gram(apply_A(p, x) - p.b()));
}

// Pulls `point` toward `center` until it lies in the closed ball.
double shrink_factor(double dist, double radius) { return dist > radius ? radius / dist : 1.0; }

class RatioTracker {
 public:
  explicit RatioTracker(GrowthReport& rep) : rep_(rep) {
    rep_.min_ratio = std::numeric_limits<double>::infinity();
  }
  void add(const Eigen::VectorXd& point, double lhs, double dist_sq) {
    ++rep_.sampled_points;
    bool bad = false;
    if (dist_sq > kDistFloor) {
      ++rep_.counted_points;
      rep_.min_ratio = std::min(rep_.min_ratio, lhs / dist_sq);
      if (!rep_.kappa) bad = lhs <= 0.0;
    }
    if (rep_.kappa) bad = lhs < *rep_.kappa * dist_sq - 1e-12 * (1.0 + std::abs(lhs));
    if (bad) {
      ++rep_.violation_count;
      if (rep_.violated.size() < kMaxStoredViolations) rep_.violated.push_back({point, lhs, dist_sq});
    }
  }

 private:
  GrowthReport& rep_;
};

GrowthReport base_report(double gamma, double alpha, double rho, const GrowthOptions& opts) {
  if (!(opts.ball_radius > 0.0)) throw std::invalid_argument("growth verifier: ball_radius must be positive");
  if (opts.samples < 1) throw std::invalid_argument("growth verifier: samples must be positive");
  GrowthReport rep;
  rep.gamma = gamma;
  rep.alpha = alpha;
  rep.rho = rho;
  rep.ball_radius = opts.ball_radius;
  rep.kappa = opts.kappa;
  return rep;
}

void require_unique_primal(const KnownSolutionInstance& inst, const char* who) {
  if (!inst.unique_primal) {
    throw std::invalid_argument(std::string(who) + ": instance has no unique primal solution");
  }
}

void require_unique_dual(const KnownSolutionInstance& inst, const char* who) {
  if (!inst.unique_dual) {
    throw std::invalid_argument(std::string(who) + ": instance has no unique dual solution");
  }
}

Eigen::VectorXd stack(const Eigen::VectorXd& y, const SymMatrix& z) {
  const Eigen::VectorXd zs = z.svec();
  Eigen::VectorXd v(y.size() + zs.size());
  v << y, zs;
  return v;
}

// Projection onto {s >= 0, sum(s) <= 1}.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& w) {
  Eigen::VectorXd s = w.cwiseMax(0.0);
  if (s.sum() <= 1.0) return s;
  std::vector<double> u(w.data(), w.data() + w.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  return (w.array() - theta).cwiseMax(0.0);
}

}  // namespace

double default_gamma(const KnownSolutionInstance& inst) {
  return 2.0 * (1.0 + inst.y_star.norm() + inst.x_star.norm());
}

double default_alpha(const KnownSolutionInstance& inst) {
  return 2.0 * (1.0 + inst.y_star.norm() + inst.x_star.norm() + inst.z_star.norm());
}

GrowthReport verify_qg_primal(const KnownSolutionInstance& inst, double gamma,
                              const GrowthOptions& opts, bool use_penalty, double rho) {
  require_unique_primal(inst, "verify_qg_primal");
  if (use_penalty && !(rho > inst.z_star.trace() + 1e-9)) {
    throw std::invalid_argument("verify_qg_primal: penalty requires rho > tr(Z*)");
  }
  GrowthReport rep = base_report(gamma, 0.0, use_penalty ? rho : 0.0, opts);
  RatioTracker track(rep);
  const SdpProblem& p = inst.problem;
  std::mt19937_64 rng(opts.seed);
  const double sigma = opts.ball_radius / 3.0;
  for (int s = 0; s < opts.samples; ++s) {
    SymMatrix x = affine_project(p, inst.x_star + perturbation(rng, p.n(), sigma));
    if (!use_penalty) x = project_psd(x);
    SymMatrix d = x - inst.x_star;
    const double t = shrink_factor(d.norm(), opts.ball_radius);
    x = inst.x_star + t * d;
    d = x - inst.x_star;
    double lhs = p.C().inner(x) - inst.p_star + gamma * (apply_A(p, x) - p.b()).norm();
    if (use_penalty) lhs += exact_penalty(x, rho);
    track.add(x.svec(), lhs, d.norm() * d.norm());
  }
  return rep;
}

GrowthReport verify_eb_primal(const KnownSolutionInstance& inst, double gamma, double alpha,
                              const GrowthOptions& opts) {
  require_unique_primal(inst, "verify_eb_primal");
  GrowthReport rep = base_report(gamma, alpha, 0.0, opts);
  RatioTracker track(rep);
  const SdpProblem& p = inst.problem;
  std::mt19937_64 rng(opts.seed);
  const double sigma = opts.ball_radius / 3.0;
  for (int s = 0; s < opts.samples; ++s) {
    SymMatrix x = inst.x_star + perturbation(rng, p.n(), sigma);
    if (s % 2 == 0) x = affine_project(p, x);
    SymMatrix d = x - inst.x_star;
    x = inst.x_star + shrink_factor(d.norm(), opts.ball_radius) * d;
    d = x - inst.x_star;
    const double lhs = p.C().inner(x) - inst.p_star + gamma * (apply_A(p, x) - p.b()).norm() +
                       alpha * dist_psd(x);
    track.add(x.svec(), lhs, d.norm() * d.norm());
  }
  return rep;
}

Grid2 fig_d1_grid() { return Grid2{-1.0, 1.0, 201}; }

double dual_penalty_value(const SdpProblem& p, const Eigen::VectorXd& y, double rho) {
  // rho max{0, lambda_max(A^*y - C)} = exact_penalty(C - A^*y, rho)
  return -p.b().dot(y) + exact_penalty(p.C() - apply_Astar(p, y), rho);
}

GrowthReport verify_qg_dual(const KnownSolutionInstance& inst, double gamma,
                            const GrowthOptions& opts, bool use_penalty, double rho,
                            const std::optional<Grid2>& grid) {
  require_unique_dual(inst, "verify_qg_dual");
  if (use_penalty && !(rho > inst.x_star.trace() + 1e-9)) {
    throw std::invalid_argument("verify_qg_dual: penalty requires rho > tr(X*)");
  }
  const SdpProblem& p = inst.problem;
  const double d_star = inst.p_star;
  GrowthReport rep = base_report(gamma, 0.0, use_penalty ? rho : 0.0, opts);
  RatioTracker track(rep);

  if (grid) {
    if (!use_penalty || p.m() != 2) {
      throw std::invalid_argument("verify_qg_dual: grid mode needs the penalty variant and m = 2");
    }
    if (grid->points < 2 || !(grid->hi > grid->lo)) {
      throw std::invalid_argument("verify_qg_dual: invalid grid");
    }
    const double h = (grid->hi - grid->lo) / (grid->points - 1);
    for (int i = 0; i < grid->points; ++i) {
      for (int j = 0; j < grid->points; ++j) {
        const Eigen::Vector2d off(grid->lo + i * h, grid->lo + j * h);
        const Eigen::VectorXd y = inst.y_star + off;
        const double lhs = dual_penalty_value(p, y, rho) + d_star;
        track.add(y, lhs, off.squaredNorm());
      }
    }
    return rep;
  }

  std::mt19937_64 rng(opts.seed);
  const double sigma = opts.ball_radius / 3.0;
  for (int s = 0; s < opts.samples; ++s) {
    if (use_penalty) {
      Eigen::VectorXd d = vector_perturbation(rng, p.m(), sigma);
      d *= shrink_factor(d.norm(), opts.ball_radius);
      const Eigen::VectorXd y = inst.y_star + d;
      track.add(y, dual_penalty_value(p, y, rho) + d_star, d.squaredNorm());
      continue;
    }
    Eigen::VectorXd y = inst.y_star + vector_perturbation(rng, p.m(), sigma);
    SymMatrix z = project_psd(p.C() - apply_Astar(p, y) + perturbation(rng, p.n(), sigma));
    Eigen::VectorXd dy = y - inst.y_star;
    SymMatrix dz = z - inst.z_star;
    const double t = shrink_factor(std::sqrt(dy.squaredNorm() + dz.norm() * dz.norm()),
                                   opts.ball_radius);
    y = inst.y_star + t * dy;
    z = inst.z_star + t * dz;
    dy = y - inst.y_star;
    dz = z - inst.z_star;
    const double lhs =
        d_star - p.b().dot(y) + gamma * (p.C() - apply_Astar(p, y) - z).norm();
    track.add(stack(y, z), lhs, dy.squaredNorm() + dz.norm() * dz.norm());
  }
  return rep;
}

GrowthReport verify_eb_dual(const KnownSolutionInstance& inst, double gamma, double alpha,
                            const GrowthOptions& opts) {
  require_unique_dual(inst, "verify_eb_dual");
  const SdpProblem& p = inst.problem;
  GrowthReport rep = base_report(gamma, alpha, 0.0, opts);
  RatioTracker track(rep);
  std::mt19937_64 rng(opts.seed);
  const double sigma = opts.ball_radius / 3.0;
  for (int s = 0; s < opts.samples; ++s) {
    Eigen::VectorXd dy = vector_perturbation(rng, p.m(), sigma);
    SymMatrix dz = perturbation(rng, p.n(), sigma);
    const double t = shrink_factor(std::sqrt(dy.squaredNorm() + dz.norm() * dz.norm()),
                                   opts.ball_radius);
    dy *= t;
    dz *= t;
    const Eigen::VectorXd y = inst.y_star + dy;
    const SymMatrix z = inst.z_star + dz;
    const double lhs = inst.p_star - p.b().dot(y) +
                       gamma * (p.C() - apply_Astar(p, y) - z).norm() + alpha * dist_psd(z);
    track.add(stack(y, z), lhs, dy.squaredNorm() + dz.norm() * dz.norm());
  }
  return rep;
}

CurveTable no_sharp_growth_curve(const std::vector<double>& t_grid) {
  for (double t : t_grid) {
    if (!(t >= 0.0 && t < 1.0)) throw std::invalid_argument("no_sharp_growth_curve: grid must lie in [0, 1)");
  }
  const KnownSolutionInstance d1 = example_d1();
  const double rho = 4.0;
  const double f_star = dual_penalty_value(d1.problem, d1.y_star, rho);
  CurveTable table;
  for (double y1 : t_grid) {
    CurveRow row;
    row.y1 = y1;
    row.y2 = y1 / (y1 - 1.0);
    const Eigen::Vector2d y(row.y1, row.y2);
    row.value_gap = dual_penalty_value(d1.problem, y, rho) - f_star;
    row.closed_form = -y1 * y1 / (y1 - 1.0);
    row.dist_lower = std::abs(row.y2);
    row.dist = (y - d1.y_star).norm();
    row.ratio = row.dist > 0.0 ? row.value_gap / row.dist : 0.0;
    table.max_closed_form_error =
        std::max(table.max_closed_form_error, std::abs(row.value_gap - row.closed_form));
    table.rows.push_back(row);
  }
  std::vector<CurveRow> sorted = table.rows;
  std::sort(sorted.begin(), sorted.end(), [](const CurveRow& a, const CurveRow& b) { return a.y1 < b.y1; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].y1 > sorted[i - 1].y1 && !(sorted[i - 1].ratio < sorted[i].ratio)) {
      table.ratio_monotone = false;
    }
  }
  return table;
}

PreimageReport verify_penalty_preimage(const SymMatrix& zbar, double rho, int samples,
                                       std::uint64_t seed) {
  if (!is_psd(zbar)) throw std::invalid_argument("verify_penalty_preimage: Zbar must be PSD");
  if (!(zbar.trace() < rho)) {
    throw std::invalid_argument("verify_penalty_preimage: requires tr(Zbar) < rho");
  }
  const Eigen::Index n = zbar.dim();
  const FaceBasis face = face_basis(zbar);
  const Eigen::Index k = face.p2.cols();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int random_probes = 100;

  // -Zbar is a subgradient of l at X iff l(Y) >= l(X) - <Zbar, Y - X> for all Y.
  auto all_probes_pass = [&](const SymMatrix& x, const std::vector<SymMatrix>& probes) {
    const double lx = exact_penalty(x, rho);
    for (const SymMatrix& yprobe : probes) {
      const double rhs = lx - zbar.inner(yprobe - x);
      const double tol = 1e-10 * (1.0 + x.norm() + yprobe.norm()) * (1.0 + rho);
      if (exact_penalty(yprobe, rho) < rhs - tol) return false;
    }
    return true;
  };
  auto probes_for = [&](const SymMatrix& x) {
    std::vector<SymMatrix> probes{SymMatrix(n), 2.0 * x, project_psd(x),
                                  x + SymMatrix(Eigen::MatrixXd(face.p1 * face.p1.transpose())),
                                  x - SymMatrix::identity(n)};
    for (int i = 0; i < random_probes; ++i) {
      probes.push_back((1.0 + x.norm()) * 2.0 * unit(rng) * random_symmetric(rng, n));
    }
    return probes;
  };

  PreimageReport rep;
  rep.face_dimension = static_cast<int>(k);
  rep.probes_per_point = random_probes + 5;
  for (int s = 0; s < samples; ++s) {
    SymMatrix x(n);
    if (k > 0) {
      std::uniform_int_distribution<int> rank_pick(1, static_cast<int>(k));
      const Eigen::MatrixXd r = gaussian(rng, k, rank_pick(rng));
      x = embed_in_face(face, r * r.transpose() / static_cast<double>(r.cols()));
    }
    ++rep.face_samples;
    if (all_probes_pass(x, probes_for(x))) ++rep.face_passed;
  }
  for (int s = 0; s < samples; ++s) {
    SymMatrix x(n);
    bool found = false;
    for (int attempt = 0; attempt < 100 && !found; ++attempt) {
      x = (0.5 + 2.5 * unit(rng)) * random_symmetric(rng, n);
      if (unit(rng) < 0.5) x = project_psd(x);  // PSD but off-face points as well
      found = dist_to_face(x, face) > 0.1;
    }
    if (!found) continue;
    ++rep.off_face_samples;
    if (!all_probes_pass(x, probes_for(x))) ++rep.off_face_detected;
  }
  return rep;
}

GrowthLemmaReport verify_growth_lemma(const SymMatrix& xbar, const SymMatrix& zbar, double mu,
                                      int samples, std::uint64_t seed,
                                      std::optional<double> penalty_rho) {
  if (!(mu > 0.0)) throw std::invalid_argument("verify_growth_lemma: mu must be positive");
  if (xbar.dim() != zbar.dim()) throw std::invalid_argument("verify_growth_lemma: dimension mismatch");
  if (!is_psd(xbar) || !is_psd(zbar)) {
    throw std::invalid_argument("verify_growth_lemma: Xbar and Zbar must be PSD");
  }
  if (xbar.inner(zbar) > 1e-10) {
    throw std::invalid_argument("verify_growth_lemma: complementarity <Xbar, Zbar> = 0 fails");
  }
  if (penalty_rho && !(*penalty_rho > zbar.trace())) {
    throw std::invalid_argument("verify_growth_lemma: penalty check requires rho > tr(Zbar)");
  }
  const Eigen::Index n = xbar.dim();
  const FaceBasis face = face_basis(zbar);
  GrowthLemmaReport rep;
  rep.lambda1_min = face.lambda1_min;
  rep.kappa = face.lambda1_min / (3.0 * mu + 2.0 * xbar.norm());
  rep.min_ratio = std::numeric_limits<double>::infinity();
  if (penalty_rho) {
    rep.penalty_kappa = std::min((*penalty_rho - zbar.trace()) / (2.0 * n * mu), rep.kappa / 2.0);
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto ball_point = [&]() {
    SymMatrix d = random_symmetric(rng, n);
    const double len = d.norm();
    if (len > 0.0) d *= mu * unit(rng) / len;
    return xbar + d;
  };
  for (int s = 0; s < samples; ++s) {
    // Projection onto the PSD cone does not increase the distance to Xbar.
    const SymMatrix x = project_psd(ball_point());
    const double lhs = zbar.inner(x);
    const double dist = dist_to_face(x, face);
    const double dist_sq = dist * dist;
    ++rep.samples;
    if (dist_sq > kDistFloor) rep.min_ratio = std::min(rep.min_ratio, lhs / dist_sq);
    if (lhs < rep.kappa * dist_sq - 1e-12 * (1.0 + std::abs(lhs))) ++rep.violations;
    if (penalty_rho) {
      const SymMatrix xp = ball_point();
      const double lp = exact_penalty(xp, *penalty_rho) + zbar.inner(xp);
      const double dp = dist_to_face(xp, face);
      if (lp < *rep.penalty_kappa * dp * dp - 1e-12 * (1.0 + std::abs(lp))) ++rep.penalty_violations;
    }
  }
  return rep;
}

std::pair<SymMatrix, SymMatrix> random_complementary_pair(int n, int rank_x, std::uint64_t seed) {
  if (n < 1 || rank_x < 0 || rank_x > n) {
    throw std::invalid_argument("random_complementary_pair: need 0 <= rank_x <= n");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> spectrum(0.5, 2.0);
  const Eigen::MatrixXd q = random_orthonormal(rng, n);
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(n), dz = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < rank_x; ++i) dx(i) = spectrum(rng);
  for (int i = rank_x; i < n; ++i) dz(i) = spectrum(rng);
  return {SymMatrix(Eigen::MatrixXd(q * dx.asDiagonal() * q.transpose())),
          SymMatrix(Eigen::MatrixXd(q * dz.asDiagonal() * q.transpose()))};
}

double trace_bound_excess(const SymMatrix& m, Eigen::Index split) {
  const Eigen::Index n = m.dim();
  if (split < 1 || split >= n) throw std::invalid_argument("trace_bound_excess: split out of range");
  const Eigen::MatrixXd& d = m.dense();
  const Eigen::MatrixXd a = d.topLeftCorner(split, split);
  const Eigen::MatrixXd b = d.topRightCorner(split, n - split);
  const SymMatrix dd(Eigen::MatrixXd(d.bottomRightCorner(n - split, n - split)));
  const double d_op = std::max(std::abs(lambda_max(dd)), std::abs(lambda_min(dd)));
  return b.squaredNorm() - d_op * a.trace();
}

TraceBoundReport check_trace_bound(int samples, int n_min, int n_max, std::uint64_t seed) {
  if (n_min < 2 || n_max < n_min) throw std::invalid_argument("check_trace_bound: need 2 <= n_min <= n_max");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick_n(n_min, n_max);
  TraceBoundReport rep;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    const int n = pick_n(rng);
    const int rank = std::uniform_int_distribution<int>(1, n)(rng);
    const int split = std::uniform_int_distribution<int>(1, n - 1)(rng);
    const Eigen::MatrixXd r = gaussian(rng, n, rank);
    const SymMatrix m(Eigen::MatrixXd(r * r.transpose()));
    const double excess = trace_bound_excess(m, split);
    rep.max_excess = std::max(rep.max_excess, excess);
    ++rep.samples;
    if (excess > 1e-10 * (1.0 + m.norm() * m.norm())) ++rep.violations;
  }
  return rep;
}

ComplementarityReport check_strict_complementarity(const SymMatrix& x, const SymMatrix& z,
                                                   double tol) {
  if (x.dim() != z.dim()) throw std::invalid_argument("check_strict_complementarity: dimension mismatch");
  if (lambda_min(x) < -tol) throw std::invalid_argument("check_strict_complementarity: X not PSD");
  if (lambda_min(z) < -tol) throw std::invalid_argument("check_strict_complementarity: Z not PSD");
  if (x.inner(z) > tol) throw std::invalid_argument("check_strict_complementarity: <X, Z> > tol");
  ComplementarityReport rep;
  rep.rank_x = numerical_rank(x, tol);
  rep.rank_z = numerical_rank(z, tol);
  rep.holds = rep.rank_x + rep.rank_z == x.dim();
  return rep;
}

PenaltySolve solve_penalized(const SdpProblem& p, double rho, int max_outer,
                             int inner_max_iter) {
  if (!(rho > 0.0)) throw std::invalid_argument("solve_penalized: rho must be positive");
  const Eigen::Index n = p.n();
  const Eigen::MatrixXd& a = p.svec_operator();
  const Eigen::VectorXd c = p.C().svec();
  const double sigma = 10.0;

  auto h_value = [&](const Eigen::VectorXd& v) {
    return exact_penalty(SymMatrix::from_svec(v, n), rho);
  };
  // Spectral prox: with u = eigenvalues of -V, h = rho max{0, max u} is the
  // support function of rho * {s >= 0, sum s <= 1}.
  auto prox = [&](const Eigen::VectorXd& v, double t) {
    const EigDecomp e = eig_sym(SymMatrix::from_svec(v, n));
    const Eigen::VectorXd u = -e.eigenvalues;
    const double scale = t * rho;
    const Eigen::VectorXd u_new = u - scale * project_capped_simplex(u / scale);
    const Eigen::MatrixXd out = e.eigenvectors * (-u_new).asDiagonal() * e.eigenvectors.transpose();
    return SymMatrix(out).svec();
  };

  PenaltySolve out{SymMatrix(n)};
  Eigen::VectorXd x = Eigen::VectorXd::Zero(svec_dim(n));
  Eigen::VectorXd lam = Eigen::VectorXd::Zero(p.m());
  double tol = 1e-2;
  try {
    for (int k = 0; k < max_outer; ++k) {
      auto smooth = [&](const Eigen::VectorXd& v, Eigen::VectorXd* g) {
        const Eigen::VectorXd res = a * v - p.b();
        if (g) *g = c - a.transpose() * lam + sigma * (a.transpose() * res);
        return c.dot(v) - lam.dot(res) + 0.5 * sigma * res.squaredNorm();
      };
      const CompositeResult inner = minimize_composite(smooth, h_value, prox, x, tol, inner_max_iter);
      x = inner.x;
      const Eigen::VectorXd res = a * x - p.b();
      lam -= sigma * res;
      out.iterations = k + 1;
      if (!x.allFinite() || x.norm() > 1e8) {
        out.diverged = true;
        break;
      }
      const bool feasible = res.norm() <= 1e-10 * (1.0 + p.b().norm());
      if (feasible && inner.converged && tol <= 1e-10) break;
      // Roundoff floor of the inner method: further outer steps change nothing.
      if (inner.stalled && res.norm() <= 1e-9 * (1.0 + p.b().norm())) break;
      tol = std::max(tol * 0.2, 1e-10);
    }
  } catch (const std::runtime_error&) {
    out.diverged = true;
  }
  if (x.allFinite()) {
    out.x = SymMatrix::from_svec(x, n);
    out.value = p.C().inner(out.x) + exact_penalty(out.x, rho);
    out.infeasibility = (apply_A(p, out.x) - p.b()).norm();
  } else {
    out.value = -std::numeric_limits<double>::infinity();
    out.infeasibility = std::numeric_limits<double>::infinity();
  }
  return out;
}

PenaltyEquivalenceReport exact_penalty_equivalence(const KnownSolutionInstance& inst,
                                                   double rho) {
  const double tr = inst.z_star.trace();
  if (!(rho > tr + 1e-9)) {
    throw std::invalid_argument("exact_penalty_equivalence: requires rho > tr(Z*)");
  }
  PenaltyEquivalenceReport rep;
  rep.rho = rho;
  const PenaltySolve sol = solve_penalized(inst.problem, rho);
  rep.distance = (sol.x - inst.x_star).norm();
  rep.value_gap = std::abs(sol.value - inst.p_star);
  rep.matches = !sol.diverged && rep.distance <= 1e-5 && rep.value_gap <= 1e-7;

  rep.control_rho = tr / 2.0;
  const PenaltySolve ctl = solve_penalized(inst.problem, rep.control_rho, 10, 2000);
  rep.control_value = ctl.value;
  rep.control_distance = (ctl.x - inst.x_star).norm();
  rep.control_detected = ctl.diverged || ctl.value < inst.p_star - 1e-6 ||
                         rep.control_distance > 1e-3;
  return rep;
}

}  // namespace conic_alm

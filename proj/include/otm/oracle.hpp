#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "otm/assignment.hpp"
#include "otm/linalg.hpp"
#include "otm/point_cloud.hpp"
#include "otm/rng.hpp"

namespace otm::oracle {

// Ground cost convention throughout: c(x, y) = 0.5 * ||x - y||^2. Under it
// the Gaussian Frechet distance equals exactly twice the squared W2.

struct Gaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Gaussian() = default;
  Gaussian(Eigen::VectorXd m, Eigen::MatrixXd c) : mean(std::move(m)), cov(std::move(c)) {
    if (cov.rows() != mean.size() || cov.cols() != mean.size())
      throw std::invalid_argument("gaussian: covariance must be dim x dim");
    require_symmetric(cov, "gaussian covariance");
    sym_eig_apply(cov, [](double v) { return v; }, "gaussian covariance");  // PSD check
  }

  Index dim() const { return mean.size(); }

  static Gaussian standard(Index d) {
    return {Eigen::VectorXd::Zero(d), Eigen::MatrixXd::Identity(d, d)};
  }
};

struct AffineMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  AffineMap() = default;
  AffineMap(Eigen::MatrixXd a, Eigen::VectorXd off) : A(std::move(a)), b(std::move(off)) {
    if (A.rows() != b.size()) throw std::invalid_argument("affine map: shape mismatch");
  }

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return A * x + b; }

  PointCloud apply(const PointCloud& pc) const {
    if (pc.dim != A.cols()) throw std::invalid_argument("affine map: dimension mismatch");
    EigenRowMat out = pc.mat() * A.transpose();
    out.rowwise() += b.transpose();
    return PointCloud::from_matrix(out);
  }

  static AffineMap identity(Index d) {
    return {Eigen::MatrixXd::Identity(d, d), Eigen::VectorXd::Zero(d)};
  }
};

inline Gaussian pushforward(const AffineMap& t, const Gaussian& g) {
  return {t.A * g.mean + t.b, t.A * g.cov * t.A.transpose()};
}

inline Gaussian fit_gaussian(const PointCloud& pc) {
  const Index n = pc.size();
  if (n < pc.dim + 1)
    throw std::invalid_argument("fit_gaussian: need at least dim + 1 points");
  Eigen::VectorXd mean = pc.mat().colwise().mean().transpose();
  Eigen::MatrixXd centered = pc.mat().rowwise() - mean.transpose();
  Eigen::MatrixXd cov = centered.transpose() * centered / double(n - 1);
  cov = 0.5 * (cov + cov.transpose());
  return {std::move(mean), std::move(cov)};
}

inline PointCloud sample_gaussian(const Gaussian& g, Index n, Rng& rng) {
  const Eigen::MatrixXd root = spd_sqrt(g.cov, "gaussian covariance");
  const Index d = g.dim();
  EigenRowMat z(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) z(i, j) = rng.normal();
  EigenRowMat out = z * root.transpose();
  out.rowwise() += g.mean.transpose();
  return PointCloud::from_matrix(out);
}

namespace detail {
inline double bures_trace(const Gaussian& mu, const Gaussian& nu) {
  const Eigen::MatrixXd rm = spd_sqrt(mu.cov, "gaussian covariance");
  const Eigen::MatrixXd cross = spd_sqrt(rm * nu.cov * rm, "bures inner matrix");
  const double tr = (mu.cov + nu.cov - 2.0 * cross).trace();
  return std::max(tr, 0.0);
}
}  // namespace detail

/// W2^2 for the 0.5||x-y||^2 cost:
/// 0.5 (||m_mu - m_nu||^2 + tr(S_mu + S_nu - 2 (S_mu^1/2 S_nu S_mu^1/2)^1/2)).
inline double gaussian_w2(const Gaussian& mu, const Gaussian& nu) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("gaussian_w2: dimension mismatch");
  return 0.5 * ((mu.mean - nu.mean).squaredNorm() + detail::bures_trace(mu, nu));
}

/// Frechet distance between Gaussians; equals 2 * gaussian_w2 exactly.
inline double frechet_gaussian(const Gaussian& a, const Gaussian& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("frechet_gaussian: dimension mismatch");
  return (a.mean - b.mean).squaredNorm() + detail::bures_trace(a, b);
}

namespace detail {
inline AffineMap gaussian_map_impl(const Gaussian& mu, const Gaussian& nu, bool allow_singular) {
  if (mu.dim() != nu.dim()) throw std::invalid_argument("gaussian_ot_map: dimension mismatch");
  if (!allow_singular && smallest_eigenvalue(mu.cov) <= kEigClampTol)
    throw std::invalid_argument("gaussian_ot_map: input covariance is singular");
  const Eigen::MatrixXd rm = spd_sqrt(mu.cov, "gaussian covariance");
  const Eigen::MatrixXd rm_inv = spd_inv_sqrt_pinv(mu.cov, "gaussian covariance");
  const Eigen::MatrixXd inner = spd_sqrt(rm * nu.cov * rm, "ot map inner matrix");
  Eigen::MatrixXd a = rm_inv * inner * rm_inv;
  Eigen::VectorXd b = nu.mean - a * mu.mean;
  return {std::move(a), std::move(b)};
}
}  // namespace detail

/// Monge map between Gaussians, T(x) = b_nu + A (x - b_mu) with
/// A = S_mu^-1/2 (S_mu^1/2 S_nu S_mu^1/2)^1/2 S_mu^-1/2. Requires a
/// nonsingular input covariance.
inline AffineMap gaussian_ot_map(const Gaussian& mu, const Gaussian& nu) {
  return detail::gaussian_map_impl(mu, nu, /*allow_singular=*/false);
}

/// Same formula with pseudo-inverted square roots: for a singular input
/// covariance this is the barycentric projection of the optimal plan (a
/// strict Monge map no longer exists); it coincides with gaussian_ot_map
/// when the input covariance is positive definite.
inline AffineMap gaussian_barycentric_map(const Gaussian& mu, const Gaussian& nu) {
  return detail::gaussian_map_impl(mu, nu, /*allow_singular=*/true);
}

// ---- discrete optimal transport -------------------------------------------

struct DiscreteOt {
  std::vector<int> assignment;  // X row i matched to Y row assignment[i]
  double mean_cost = 0.0;       // (1/n) sum 0.5 ||x_i - y_pi(i)||^2
};

inline DiscreteOt discrete_ot(const PointCloud& x, const PointCloud& y) {
  if (x.dim != y.dim) throw std::invalid_argument("discrete_ot: dimension mismatch");
  if (x.size() != y.size()) throw std::invalid_argument("discrete_ot: unequal cardinalities");
  const int n = static_cast<int>(x.size());
  if (n == 0) throw std::invalid_argument("discrete_ot: empty clouds");
  if (n > 2048) throw std::invalid_argument("discrete_ot: more than 2048 points");

  std::vector<double> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      cost[static_cast<std::size_t>(i) * n + j] =
          0.5 * (x.point(i) - y.point(j)).squaredNorm();

  DiscreteOt result;
  result.assignment = n <= 8 ? assignment_bruteforce(cost, n) : assignment_hungarian(cost, n);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    total += cost[static_cast<std::size_t>(i) * n + result.assignment[i]];
  result.mean_cost = total / n;
  return result;
}

// ---- quadratic potentials and the duality-gap bound ------------------------

/// psi(y) = 0.5 (y - c)^T M (y - c) + constant with M strictly positive
/// definite; the smallest eigenvalue of M is the strong-convexity modulus.
struct QuadraticPotential {
  Eigen::MatrixXd M;
  Eigen::VectorXd c;
  double constant = 0.0;

  QuadraticPotential() = default;
  QuadraticPotential(Eigen::MatrixXd m, Eigen::VectorXd center, double k = 0.0)
      : M(std::move(m)), c(std::move(center)), constant(k) {
    if (M.rows() != c.size() || M.cols() != c.size())
      throw std::invalid_argument("quadratic potential: shape mismatch");
    require_symmetric(M, "quadratic potential");
    if (smallest_eigenvalue(M) <= 0.0)
      throw std::invalid_argument("quadratic potential: M must be positive definite");
  }

  Index dim() const { return c.size(); }
  double operator()(const Eigen::VectorXd& y) const {
    const Eigen::VectorXd u = y - c;
    return 0.5 * u.dot(M * u) + constant;
  }
  Eigen::VectorXd grad(const Eigen::VectorXd& y) const { return M * (y - c); }
  double beta() const { return smallest_eigenvalue(M); }
};

struct ConjugateResult {
  Eigen::VectorXd argmax;
  double value = 0.0;
};

/// Convex conjugate sup_y { <x, y> - psi(y) }, attained at y* = c + M^-1 x.
inline ConjugateResult conjugate(const QuadraticPotential& psi, const Eigen::VectorXd& x) {
  if (x.size() != psi.dim()) throw std::invalid_argument("conjugate: dimension mismatch");
  ConjugateResult r;
  r.argmax = psi.c + psi.M.llt().solve(x);
  r.value = x.dot(r.argmax) - psi(r.argmax);
  return r;
}

/// The map x -> argmax_y { <Q x, y> - psi(y) } as an affine map.
inline AffineMap conjugate_map(const QuadraticPotential& psi, const Eigen::MatrixXd& q) {
  const Eigen::MatrixXd m_inv = psi.M.llt().solve(Eigen::MatrixXd::Identity(psi.dim(), psi.dim()));
  return {m_inv * q, psi.c};
}

struct BoundReport {
  // Duality gaps, closed form and Monte-Carlo (with standard errors).
  double eps1 = 0.0, eps2 = 0.0;
  double eps1_mc = 0.0, eps2_mc = 0.0;
  double eps1_se = 0.0, eps2_se = 0.0;
  double beta = 0.0;

  // Chain members.
  double frechet = 0.0;        // FD(G_hat # mu, nu)
  double twice_w2 = 0.0;       // 2 W2^2(G_hat # mu, nu)
  double l2_diff = 0.0;        // ||G_hat - G*||^2_L2(mu), closed form
  double l2_diff_mc = 0.0;
  double l2_diff_se = 0.0;
  double bound = 0.0;          // (2/beta)(sqrt(eps1)+sqrt(eps2))^2

  double tolerance = 0.0;
  bool frechet_le_twice_w2 = false;
  bool twice_w2_le_l2 = false;
  bool l2_le_bound = false;
  bool pass = false;
};

/// Closed-form verification of the duality-gap error bound chain
///   FD <= 2 W2^2 <= ||G_hat - G*||^2 <= (2/beta)(sqrt(eps1)+sqrt(eps2))^2
/// in the Gaussian / quadratic-potential / affine-map setting, where every
/// expectation has an exact form. Monte-Carlo estimates of the mu-side
/// expectations (n_mc samples) cross-check the closed forms; a gap estimate
/// that is negative beyond Monte-Carlo noise signals an implementation bug.
inline BoundReport verify_bound(const Gaussian& mu, const Gaussian& nu,
                                const QuadraticPotential& psi_hat, const AffineMap& g_hat,
                                Index n_mc,
                                const std::optional<Eigen::MatrixXd>& q_opt = std::nullopt,
                                double tolerance = 1e-3, std::uint64_t seed = 20240901) {
  const Index h = mu.dim(), d = nu.dim();
  const Eigen::MatrixXd q = q_opt.value_or(Eigen::MatrixXd::Identity(d, h));
  if (q.rows() != d || q.cols() != h)
    throw std::invalid_argument("verify_bound: embedding matrix must be D x H");
  if (psi_hat.dim() != d || g_hat.A.rows() != d || g_hat.A.cols() != h)
    throw std::invalid_argument("verify_bound: dimension mismatch");

  // E_nu[psi_hat], exact.
  const Eigen::VectorXd dn = nu.mean - psi_hat.c;
  const double e_nu_psi =
      0.5 * ((psi_hat.M * nu.cov).trace() + dn.dot(psi_hat.M * dn)) + psi_hat.constant;

  // E_mu[<Qx, G x> - psi_hat(G x)] for an affine G, exact.
  const auto mu_term = [&](const AffineMap& g) {
    const Eigen::MatrixXd qta = q.transpose() * g.A;
    const double inner = (qta * mu.cov).trace() + mu.mean.dot(qta * mu.mean) +
                         g.b.dot(q * mu.mean);
    const Eigen::VectorXd r = g.A * mu.mean + g.b - psi_hat.c;
    const Eigen::MatrixXd ama = g.A.transpose() * psi_hat.M * g.A;
    const double quad =
        0.5 * ((ama * mu.cov).trace() + r.dot(psi_hat.M * r)) + psi_hat.constant;
    return inner - quad;
  };

  const AffineMap g_prime = conjugate_map(psi_hat, q);
  const Gaussian q_mu = pushforward({q, Eigen::VectorXd::Zero(d)}, mu);
  const AffineMap t_star = gaussian_barycentric_map(q_mu, nu);
  const AffineMap g_star{t_star.A * q, t_star.b};

  BoundReport rep;
  rep.tolerance = tolerance;
  rep.beta = psi_hat.beta();

  const double l_prime = mu_term(g_prime) + e_nu_psi;
  const double l_hat = mu_term(g_hat) + e_nu_psi;
  // inf_psi sup_G equals E_mu <Qx, G*(x)>.
  const Eigen::MatrixXd qts = q.transpose() * g_star.A;
  const double infsup = (qts * mu.cov).trace() + mu.mean.dot(qts * mu.mean) +
                        g_star.b.dot(q * mu.mean);

  rep.eps1 = l_prime - l_hat;
  rep.eps2 = l_prime - infsup;
  if (rep.eps1 < -1e-9 || rep.eps2 < -1e-9)
    throw std::runtime_error("verify_bound: closed-form duality gap is negative");
  rep.eps1 = std::max(rep.eps1, 0.0);
  rep.eps2 = std::max(rep.eps2, 0.0);

  const Eigen::MatrixXd diff_a = g_hat.A - g_star.A;
  const Eigen::VectorXd diff_b = g_hat.b - g_star.b;
  rep.l2_diff = (diff_a * mu.cov * diff_a.transpose()).trace() +
                (diff_a * mu.mean + diff_b).squaredNorm();

  const Gaussian push = pushforward(g_hat, mu);
  rep.twice_w2 = 2.0 * gaussian_w2(push, nu);
  rep.frechet = frechet_gaussian(push, nu);
  rep.bound = (2.0 / rep.beta) * std::pow(std::sqrt(rep.eps1) + std::sqrt(rep.eps2), 2.0);

  // Monte-Carlo cross-check on a shared mu sample.
  if (n_mc > 0) {
    Rng rng(seed);
    const PointCloud xs = sample_gaussian(mu, n_mc, rng);
    auto accum = [&](auto&& f, double& out_mean, double& out_se) {
      double s = 0.0, s2 = 0.0;
      for (Index i = 0; i < n_mc; ++i) {
        const double v = f(Eigen::VectorXd(xs.point(i)));
        s += v;
        s2 += v * v;
      }
      out_mean = s / double(n_mc);
      const double var = std::max(0.0, s2 / double(n_mc) - out_mean * out_mean);
      out_se = std::sqrt(var / double(n_mc));
    };
    auto integrand = [&](const AffineMap& g, const Eigen::VectorXd& x) {
      const Eigen::VectorXd gx = g(x);
      return (q * x).dot(gx) - psi_hat(gx);
    };
    accum([&](const Eigen::VectorXd& x) { return integrand(g_prime, x) - integrand(g_hat, x); },
          rep.eps1_mc, rep.eps1_se);
    accum(
        [&](const Eigen::VectorXd& x) {
          return integrand(g_prime, x) + e_nu_psi - (q * x).dot(g_star(x));
        },
        rep.eps2_mc, rep.eps2_se);
    accum([&](const Eigen::VectorXd& x) { return (g_hat(x) - g_star(x)).squaredNorm(); },
          rep.l2_diff_mc, rep.l2_diff_se);
    if (rep.eps1_mc < -(5.0 * rep.eps1_se + 1e-9) || rep.eps2_mc < -(5.0 * rep.eps2_se + 1e-9))
      throw std::runtime_error("verify_bound: Monte-Carlo duality gap negative beyond noise");
  }

  rep.frechet_le_twice_w2 = rep.frechet <= rep.twice_w2 + tolerance;
  rep.twice_w2_le_l2 = rep.twice_w2 <= rep.l2_diff + tolerance;
  rep.l2_le_bound = rep.l2_diff <= rep.bound + tolerance;
  rep.pass = rep.frechet_le_twice_w2 && rep.twice_w2_le_l2 && rep.l2_le_bound;
  return rep;
}

}  // namespace otm::oracle

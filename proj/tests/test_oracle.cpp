#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "otm/oracle.hpp"

using namespace otm;
using namespace otm::oracle;

namespace {

Eigen::MatrixXd random_spd(Index d, Rng& rng, double jitter = 0.3) {
  Eigen::MatrixXd a(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a * a.transpose() + jitter * Eigen::MatrixXd::Identity(d, d);
}

Eigen::Vector2d v2(double x, double y) { return Eigen::Vector2d(x, y); }

}  // namespace

TEST_CASE("gaussian_ot_map: pure translation") {
  Gaussian mu = Gaussian::standard(2);
  Gaussian nu{v2(2.0, 0.0), Eigen::Matrix2d::Identity()};
  AffineMap t = gaussian_ot_map(mu, nu);
  CHECK((t.A - Eigen::Matrix2d::Identity()).norm() < 1e-12);
  CHECK((t.b - v2(2.0, 0.0)).norm() < 1e-12);
}

TEST_CASE("gaussian_ot_map: one-dimensional scaling") {
  Gaussian mu{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  Gaussian nu{Eigen::VectorXd::Zero(1), 4.0 * Eigen::MatrixXd::Identity(1, 1)};
  AffineMap t = gaussian_ot_map(mu, nu);
  CHECK(t.A(0, 0) == Catch::Approx(2.0).margin(1e-12));
  CHECK(std::abs(t.b(0)) < 1e-12);
}

TEST_CASE("gaussian_ot_map: pushforward moments match the target (Monte-Carlo)") {
  Rng rng(101);
  Gaussian mu{v2(0.5, -1.0), random_spd(2, rng)};
  Gaussian nu{v2(-2.0, 3.0), random_spd(2, rng)};
  AffineMap t = gaussian_ot_map(mu, nu);

  const Index n = 100000;
  Rng sampler(7);
  PointCloud xs = sample_gaussian(mu, n, sampler);
  PointCloud ys = t.apply(xs);
  Gaussian fitted = fit_gaussian(ys);
  for (Index j = 0; j < 2; ++j) {
    const double se = std::sqrt(nu.cov(j, j) / double(n));
    CHECK(std::abs(fitted.mean(j) - nu.mean(j)) < 3 * se);
  }
  for (Index i = 0; i < 2; ++i)
    for (Index j = 0; j < 2; ++j) {
      const double se =
          std::sqrt((nu.cov(i, i) * nu.cov(j, j) + nu.cov(i, j) * nu.cov(i, j)) / double(n));
      CHECK(std::abs(fitted.cov(i, j) - nu.cov(i, j)) < 3 * se);
    }
}

TEST_CASE("gaussian_ot_map: singular input covariance is rejected") {
  Gaussian mu{v2(0, 0), (Eigen::Matrix2d() << 1, 0, 0, 0).finished()};
  Gaussian nu = Gaussian::standard(2);
  CHECK_THROWS(gaussian_ot_map(mu, nu));
  // The barycentric variant accepts it and maps the dead coordinate to the
  // target mean.
  AffineMap t = gaussian_barycentric_map(mu, nu);
  Eigen::VectorXd y = t(v2(3.0, 5.0));
  CHECK(y(0) == Catch::Approx(3.0).margin(1e-12));
  CHECK(y(1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("gaussian_w2: identities") {
  Gaussian a = Gaussian::standard(2);
  CHECK(gaussian_w2(a, a) == Catch::Approx(0.0).margin(1e-12));

  Gaussian m0{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  Gaussian m2{2.0 * Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Identity(1, 1)};
  CHECK(gaussian_w2(m0, m2) == Catch::Approx(2.0).margin(1e-12));

  Gaussian wide{Eigen::VectorXd::Zero(1), 4.0 * Eigen::MatrixXd::Identity(1, 1)};
  CHECK(gaussian_w2(m0, wide) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("gaussian_w2: symmetry and Frechet identity") {
  Rng rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    Gaussian a{v2(rng.uniform(-2, 2), rng.uniform(-2, 2)), random_spd(2, rng)};
    Gaussian b{v2(rng.uniform(-2, 2), rng.uniform(-2, 2)), random_spd(2, rng)};
    CHECK(std::abs(gaussian_w2(a, b) - gaussian_w2(b, a)) < 1e-10);
    CHECK(std::abs(frechet_gaussian(a, b) - 2.0 * gaussian_w2(a, b)) < 1e-9);
    CHECK(std::abs(frechet_gaussian(a, b) - frechet_gaussian(b, a)) < 1e-10);
  }
}

TEST_CASE("matrix square root round trip") {
  Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd s = random_spd(3, rng);
    Eigen::MatrixXd r = spd_sqrt(s);
    CHECK((r * r - s).norm() < 1e-9);
  }
}

TEST_CASE("analytic map attains the W2 cost (Monte-Carlo consistency)") {
  Rng rng(23);
  Gaussian mu{v2(0.0, 0.0), random_spd(2, rng)};
  Gaussian nu{v2(1.5, -0.5), random_spd(2, rng)};
  AffineMap t = gaussian_ot_map(mu, nu);
  const double w2 = gaussian_w2(mu, nu);

  const Index n = 10000;
  Rng sampler(31);
  PointCloud xs = sample_gaussian(mu, n, sampler);
  double mean = 0.0, m2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = xs.point(i);
    const double c = 0.5 * (x - t(x)).squaredNorm();
    mean += c;
    m2 += c * c;
  }
  mean /= double(n);
  const double se = std::sqrt((m2 / n - mean * mean) / double(n));
  CHECK(std::abs(mean - w2) < 3 * se);
}

TEST_CASE("discrete_ot: identical clouds cost zero") {
  PointCloud x(2, {0, 0, 1, 1, 2, 2});
  DiscreteOt r = discrete_ot(x, x);
  CHECK(r.mean_cost == 0.0);
}

TEST_CASE("discrete_ot: one-dimensional monotone matching") {
  PointCloud x(1, {0.0, 1.0});
  PointCloud y(1, {1.0, 2.0});
  DiscreteOt r = discrete_ot(x, y);
  CHECK(r.assignment == std::vector<int>{0, 1});
  CHECK(r.mean_cost == Catch::Approx(0.5).margin(1e-15));
}

TEST_CASE("discrete_ot: assignment solver equals exhaustive search (20 instances)") {
  Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 7;
    std::vector<double> xd, yd;
    for (int i = 0; i < 2 * n; ++i) {
      xd.push_back(rng.uniform(-3, 3));
      yd.push_back(rng.uniform(-3, 3));
    }
    PointCloud x(2, xd), y(2, yd);
    std::vector<double> cost(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        cost[static_cast<std::size_t>(i * n + j)] =
            0.5 * (x.point(i) - y.point(j)).squaredNorm();
    std::vector<int> brute = assignment_bruteforce(cost, n);
    std::vector<int> hung = assignment_hungarian(cost, n);
    double cb = 0, ch = 0;
    for (int i = 0; i < n; ++i) {
      cb += cost[static_cast<std::size_t>(i * n + brute[i])];
      ch += cost[static_cast<std::size_t>(i * n + hung[i])];
    }
    CHECK(cb == ch);
  }
}

TEST_CASE("discrete_ot: errors") {
  PointCloud x(2, {0, 0});
  PointCloud y(1, {0});
  CHECK_THROWS(discrete_ot(x, y));
  PointCloud y2(2, {0, 0, 1, 1});
  CHECK_THROWS(discrete_ot(x, y2));
}

TEST_CASE("empirical W2 approaches the analytic value as n grows") {
  Gaussian mu = Gaussian::standard(2);
  Gaussian nu{v2(1.0, 0.0), (Eigen::Matrix2d() << 0.5, 0, 0, 2.0).finished()};
  const double w2 = gaussian_w2(mu, nu);
  std::vector<double> values;
  for (Index n : {32, 128, 512}) {
    // Average enough draws that the trend reflects the bias, not draw noise
    // (the per-draw spread is several times the 128 -> 512 bias gap).
    double acc = 0.0;
    const int reps = 24;
    for (int rep = 0; rep < reps; ++rep) {
      Rng ra(400 + 10 * n + rep), rb(900 + 10 * n + rep);
      PointCloud xs = sample_gaussian(mu, n, ra);
      PointCloud ys = sample_gaussian(nu, n, rb);
      acc += discrete_ot(xs, ys).mean_cost;
    }
    values.push_back(acc / reps);
  }
  CHECK(values[0] > values[1]);
  CHECK(values[1] > values[2]);
  CHECK(values[2] > 0.9 * w2);
  CHECK(std::abs(values[2] - w2) < std::abs(values[0] - w2));
}

TEST_CASE("conjugate: closed forms") {
  QuadraticPotential self{Eigen::Matrix2d::Identity(), v2(0, 0)};
  ConjugateResult r = conjugate(self, v2(1.0, -2.0));
  CHECK((r.argmax - v2(1.0, -2.0)).norm() < 1e-12);
  CHECK(r.value == Catch::Approx(0.5 * 5.0).margin(1e-12));

  QuadraticPotential half{0.5 * Eigen::Matrix2d::Identity(), v2(0, 0)};
  ConjugateResult r2 = conjugate(half, v2(1.0, -2.0));
  CHECK((r2.argmax - v2(2.0, -4.0)).norm() < 1e-12);
  CHECK(r2.value == Catch::Approx(5.0).margin(1e-12));
}

TEST_CASE("conjugate: matches numeric ascent on random potentials") {
  Rng rng(43);
  for (int trial = 0; trial < 5; ++trial) {
    QuadraticPotential psi{random_spd(2, rng), v2(rng.uniform(-1, 1), rng.uniform(-1, 1)),
                           rng.uniform(-1, 1)};
    const Eigen::Vector2d x = v2(rng.uniform(-2, 2), rng.uniform(-2, 2));
    ConjugateResult r = conjugate(psi, x);

    Eigen::VectorXd y = Eigen::VectorXd::Zero(2);
    const double lr = 0.2 / psi.M.norm();
    for (int it = 0; it < 4000; ++it) y += lr * (x - psi.grad(y));
    const double numeric = x.dot(y) - psi(y);
    CHECK(std::abs(numeric - r.value) < 1e-6);
  }
}

TEST_CASE("verify_bound: tight colinear translation case") {
  const Eigen::Vector2d b = v2(2.0, 0.0);
  const Eigen::Vector2d delta = v2(0.3, 0.0);
  const Eigen::Vector2d shift = v2(0.4, 0.0);  // b_hat_prime - b_hat
  Gaussian mu = Gaussian::standard(2);
  Gaussian nu{b, Eigen::Matrix2d::Identity()};
  QuadraticPotential psi{Eigen::Matrix2d::Identity(), b + delta};
  AffineMap g_hat{Eigen::Matrix2d::Identity(), b + delta + shift};

  BoundReport rep = verify_bound(mu, nu, psi, g_hat, 20000);
  CHECK(rep.eps1 == Catch::Approx(0.5 * 0.16).margin(1e-9));
  CHECK(rep.eps2 == Catch::Approx(0.5 * 0.09).margin(1e-9));
  CHECK(rep.l2_diff == Catch::Approx(0.49).margin(1e-9));
  CHECK(rep.twice_w2 == Catch::Approx(0.49).margin(1e-9));
  CHECK(std::abs(rep.l2_diff - rep.bound) < 1e-6);  // tight when directions align
  CHECK(rep.pass);
  // Monte-Carlo estimates agree with the closed forms within noise.
  CHECK(std::abs(rep.eps1_mc - rep.eps1) < 5 * rep.eps1_se + 1e-9);
  CHECK(std::abs(rep.eps2_mc - rep.eps2) < 5 * rep.eps2_se + 1e-9);
  CHECK(std::abs(rep.l2_diff_mc - rep.l2_diff) < 5 * rep.l2_diff_se + 1e-9);
}

TEST_CASE("verify_bound: exact solution gives an all-zero chain") {
  const Eigen::Vector2d b = v2(-1.0, 0.5);
  Gaussian mu = Gaussian::standard(2);
  Gaussian nu{b, Eigen::Matrix2d::Identity()};
  QuadraticPotential psi{Eigen::Matrix2d::Identity(), b};
  AffineMap g_star{Eigen::Matrix2d::Identity(), b};
  BoundReport rep = verify_bound(mu, nu, psi, g_star, 1000);
  CHECK(rep.eps1 == Catch::Approx(0.0).margin(1e-10));
  CHECK(rep.eps2 == Catch::Approx(0.0).margin(1e-10));
  CHECK(rep.l2_diff == Catch::Approx(0.0).margin(1e-10));
  CHECK(rep.twice_w2 == Catch::Approx(0.0).margin(1e-10));
  CHECK(rep.bound == Catch::Approx(0.0).margin(1e-10));
  CHECK(rep.pass);
}

TEST_CASE("verify_bound: strict slack when directions oppose") {
  const Eigen::Vector2d b = v2(2.0, 0.0);
  Gaussian mu = Gaussian::standard(2);
  Gaussian nu{b, Eigen::Matrix2d::Identity()};
  QuadraticPotential psi{Eigen::Matrix2d::Identity(), b + v2(0.3, 0.0)};
  AffineMap g_hat{Eigen::Matrix2d::Identity(), b + v2(0.3, 0.0) + v2(-0.4, 0.0)};
  BoundReport rep = verify_bound(mu, nu, psi, g_hat, 1000);
  CHECK(rep.l2_diff == Catch::Approx(0.01).margin(1e-9));
  CHECK(rep.bound == Catch::Approx(0.49).margin(1e-9));
  CHECK(rep.l2_diff < rep.bound);
  CHECK(rep.pass);
}

TEST_CASE("verify_bound: random quadratic/affine configurations hold the chain") {
  Rng rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    Gaussian mu{v2(rng.uniform(-1, 1), rng.uniform(-1, 1)), random_spd(2, rng)};
    Gaussian nu{v2(rng.uniform(-2, 2), rng.uniform(-2, 2)), random_spd(2, rng)};
    QuadraticPotential psi{random_spd(2, rng, 0.5),
                           v2(rng.uniform(-2, 2), rng.uniform(-2, 2))};
    Eigen::Matrix2d a = Eigen::Matrix2d::Identity();
    a(0, 0) += rng.uniform(-0.3, 0.3);
    a(1, 1) += rng.uniform(-0.3, 0.3);
    a(0, 1) = rng.uniform(-0.2, 0.2);
    AffineMap g_hat{a, v2(rng.uniform(-2, 2), rng.uniform(-2, 2))};
    BoundReport rep = verify_bound(mu, nu, psi, g_hat, 4000, std::nullopt, 1e-9);
    INFO("trial " << trial);
    CHECK(rep.pass);
  }
}

TEST_CASE("verify_bound: embedding between unequal dimensions") {
  // H = 1 into D = 2. The target is supported on the embedded line so a
  // deterministic plan exists: G*(x) = (x + 1, 2). The fitted map is offset
  // by 0.2 along the line, making every chain member equal 0.04.
  Gaussian mu{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Identity(1, 1)};
  Gaussian nu{v2(1.0, 2.0), (Eigen::Matrix2d() << 1, 0, 0, 0).finished()};
  Eigen::MatrixXd q(2, 1);
  q << 1.0, 0.0;
  QuadraticPotential psi{Eigen::Matrix2d::Identity(), v2(1.0, 2.0)};
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 0.0;
  AffineMap g_hat{a, v2(1.2, 2.0)};
  BoundReport rep = verify_bound(mu, nu, psi, g_hat, 2000, q);
  CHECK(rep.eps1 == Catch::Approx(0.02).margin(1e-9));
  CHECK(rep.eps2 == Catch::Approx(0.0).margin(1e-9));
  CHECK(rep.l2_diff == Catch::Approx(0.04).margin(1e-9));
  CHECK(rep.twice_w2 == Catch::Approx(0.04).margin(1e-9));
  CHECK(rep.bound == Catch::Approx(0.04).margin(1e-9));
  CHECK(rep.pass);
}

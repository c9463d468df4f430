#pragma once

#include <functional>
#include <optional>

#include "otm/embedding.hpp"
#include "otm/oracle.hpp"
#include "otm/point_cloud.hpp"

namespace otm::metrics {

/// One evaluation of a fitted map. l2_uvp_percent is present only when an
/// analytic oracle map exists for the configured pair.
struct EvalReport {
  std::optional<double> l2_uvp_percent;
  double empirical_transport_cost = 0.0;
  double empirical_w2_pushforward_vs_target = 0.0;
  double frechet_gaussian = 0.0;
  Index sample_count = 0;
  std::uint64_t seed = 0;
};

using BatchMap = std::function<PointCloud(const PointCloud&)>;

/// L2 unexplained variance percentage:
/// 100 * E_mu ||G_hat(x) - T*(x)||^2 / Var(nu).
inline double l2_uvp(const BatchMap& g_hat, const BatchMap& t_star,
                     const PointCloud& mu_samples, double nu_variance) {
  if (nu_variance <= 0.0) throw std::invalid_argument("l2_uvp: variance must be positive");
  if (mu_samples.size() == 0) throw std::invalid_argument("l2_uvp: empty sample");
  const PointCloud a = g_hat(mu_samples);
  const PointCloud b = t_star(mu_samples);
  if (a.dim != b.dim || a.size() != b.size())
    throw std::invalid_argument("l2_uvp: map outputs are inconsistent");
  const double mean_sq = (a.mat() - b.mat()).rowwise().squaredNorm().mean();
  return 100.0 * mean_sq / nu_variance;
}

/// Point-cloud form: fits mean and unbiased covariance, then evaluates the
/// Gaussian Frechet distance (argument-dependent lookup finds the
/// parametric oracle form for Gaussian inputs). Needs at least dim + 1
/// points per cloud.
inline double frechet_gaussian(const PointCloud& a, const PointCloud& b) {
  return oracle::frechet_gaussian(oracle::fit_gaussian(a), oracle::fit_gaussian(b));
}

inline double frechet_gaussian(const PointCloud& a, const oracle::Gaussian& b) {
  return oracle::frechet_gaussian(oracle::fit_gaussian(a), b);
}

inline double frechet_gaussian(const oracle::Gaussian& a, const PointCloud& b) {
  return oracle::frechet_gaussian(a, oracle::fit_gaussian(b));
}

/// (1/n) sum 0.5 ||Q(x) - G(x)||^2 over the sample.
inline double empirical_transport_cost(const BatchMap& g, const Embedding& q,
                                       const PointCloud& x) {
  if (x.size() == 0) throw std::invalid_argument("empirical_transport_cost: empty sample");
  const PointCloud qx = embed(q, x);
  const PointCloud gx = g(x);
  if (qx.dim != gx.dim || qx.size() != gx.size())
    throw std::invalid_argument("empirical_transport_cost: dimension mismatch");
  return 0.5 * (qx.mat() - gx.mat()).rowwise().squaredNorm().mean();
}

/// Empirical W2 via the discrete OT solver (equal-weight clouds).
inline double empirical_w2(const PointCloud& x, const PointCloud& y) {
  return oracle::discrete_ot(x, y).mean_cost;
}

}  // namespace otm::metrics

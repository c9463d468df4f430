#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "otm/linalg.hpp"
#include "otm/point_cloud.hpp"
#include "otm/rng.hpp"

namespace otm {

enum class DatasetKind {
  kGaussian,
  kGaussianMixtureRing,
  kTwoMoons,
  kCircles,
  kSCurve,
  kSwissRoll,
  kDegradedPair,
};

enum class Degradation { kGaussianNoise, kCoordinateMask };

inline std::string dataset_kind_name(DatasetKind k) {
  switch (k) {
    case DatasetKind::kGaussian: return "gaussian";
    case DatasetKind::kGaussianMixtureRing: return "gaussian_mixture_ring";
    case DatasetKind::kTwoMoons: return "two_moons";
    case DatasetKind::kCircles: return "circles";
    case DatasetKind::kSCurve: return "s_curve";
    case DatasetKind::kSwissRoll: return "swiss_roll";
    case DatasetKind::kDegradedPair: return "degraded_pair";
  }
  return "?";
}

inline DatasetKind dataset_kind_from_name(const std::string& s) {
  if (s == "gaussian") return DatasetKind::kGaussian;
  if (s == "gaussian_mixture_ring") return DatasetKind::kGaussianMixtureRing;
  if (s == "two_moons") return DatasetKind::kTwoMoons;
  if (s == "circles") return DatasetKind::kCircles;
  if (s == "s_curve") return DatasetKind::kSCurve;
  if (s == "swiss_roll") return DatasetKind::kSwissRoll;
  if (s == "degraded_pair") return DatasetKind::kDegradedPair;
  throw std::invalid_argument("unknown dataset kind '" + s + "'");
}

/// Seeded synthetic distribution. Sampling is an infinite deterministic
/// stream addressed by position: every point index owns its generator, so
/// sample(spec, n, p) ++ sample(spec, m, p+n) == sample(spec, n+m, p).
struct DatasetSpec {
  DatasetKind kind = DatasetKind::kGaussian;
  std::uint64_t seed = 0;

  // gaussian
  std::vector<double> mean{0.0, 0.0};
  std::vector<double> cov{1.0, 0.0, 0.0, 1.0};  // row-major dim x dim

  // gaussian_mixture_ring
  int components = 8;
  double radius = 4.0;
  double component_std = 0.4;

  // two_moons / circles / s_curve / swiss_roll
  double noise = 0.1;
  double factor = 0.5;  // circles: inner/outer radius ratio
  double scale = 0.2;   // swiss_roll: multiplier on the planar spiral

  // degraded_pair
  std::shared_ptr<DatasetSpec> base;
  Degradation degradation = Degradation::kGaussianNoise;
  double sigma = 0.3;
  std::vector<int> mask;  // coordinates zeroed by kCoordinateMask

  Index dim() const {
    switch (kind) {
      case DatasetKind::kGaussian: return static_cast<Index>(mean.size());
      case DatasetKind::kDegradedPair: return base ? base->dim() : 0;
      default: return 2;
    }
  }

  void validate() const {
    switch (kind) {
      case DatasetKind::kGaussian: {
        const Index d = static_cast<Index>(mean.size());
        if (d <= 0) throw std::invalid_argument("gaussian: empty mean");
        if (static_cast<Index>(cov.size()) != d * d)
          throw std::invalid_argument("gaussian: covariance must be dim x dim");
        break;
      }
      case DatasetKind::kGaussianMixtureRing:
        if (components < 1) throw std::invalid_argument("ring: components must be >= 1");
        if (radius < 0.0 || component_std < 0.0)
          throw std::invalid_argument("ring: radius/std must be nonnegative");
        break;
      case DatasetKind::kTwoMoons:
      case DatasetKind::kSCurve:
        if (noise < 0.0) throw std::invalid_argument("noise must be nonnegative");
        break;
      case DatasetKind::kCircles:
        if (noise < 0.0) throw std::invalid_argument("noise must be nonnegative");
        if (factor <= 0.0 || factor > 1.0)
          throw std::invalid_argument("circles: factor must lie in (0, 1]");
        break;
      case DatasetKind::kSwissRoll:
        if (noise < 0.0 || scale <= 0.0)
          throw std::invalid_argument("swiss_roll: invalid noise/scale");
        break;
      case DatasetKind::kDegradedPair:
        if (!base) throw std::invalid_argument("degraded_pair: missing base spec");
        if (base->kind == DatasetKind::kDegradedPair)
          throw std::invalid_argument("degraded_pair: base cannot itself be degraded");
        base->validate();
        if (degradation == Degradation::kGaussianNoise && sigma < 0.0)
          throw std::invalid_argument("degraded_pair: sigma must be nonnegative");
        if (degradation == Degradation::kCoordinateMask)
          for (int c : mask)
            if (c < 0 || c >= base->dim())
              throw std::invalid_argument("degraded_pair: mask index out of range");
        break;
    }
  }
};

namespace detail {

inline void sample_point(const DatasetSpec& spec, PointRng& rng, const Eigen::MatrixXd* chol,
                         double* out) {
  switch (spec.kind) {
    case DatasetKind::kGaussian: {
      const Index d = spec.dim();
      Eigen::VectorXd z(d);
      for (Index j = 0; j < d; ++j) z[j] = rng.normal();
      Eigen::Map<Eigen::VectorXd> x(out, d);
      x = Eigen::Map<const Eigen::VectorXd>(spec.mean.data(), d) + (*chol) * z;
      break;
    }
    case DatasetKind::kGaussianMixtureRing: {
      const std::uint64_t j = rng.uniform_index(static_cast<std::uint64_t>(spec.components));
      const double a = 2.0 * M_PI * static_cast<double>(j) / spec.components;
      out[0] = spec.radius * std::cos(a) + spec.component_std * rng.normal();
      out[1] = spec.radius * std::sin(a) + spec.component_std * rng.normal();
      break;
    }
    case DatasetKind::kTwoMoons: {
      // The usual two-interleaved-halfmoons construction with a random arc
      // parameter instead of a linspace grid, so the stream is infinite.
      const bool lower = rng.uniform() < 0.5;
      const double t = rng.uniform(0.0, M_PI);
      double x, y;
      if (!lower) {
        x = std::cos(t);
        y = std::sin(t);
      } else {
        x = 1.0 - std::cos(t);
        y = 0.5 - std::sin(t);
      }
      out[0] = x + spec.noise * rng.normal();
      out[1] = y + spec.noise * rng.normal();
      break;
    }
    case DatasetKind::kCircles: {
      const bool inner = rng.uniform() < 0.5;
      const double r = inner ? spec.factor : 1.0;
      const double a = rng.uniform(0.0, 2.0 * M_PI);
      out[0] = r * std::cos(a) + spec.noise * rng.normal();
      out[1] = r * std::sin(a) + spec.noise * rng.normal();
      break;
    }
    case DatasetKind::kSCurve: {
      // Planar projection of the classic S-curve: keep the two curved
      // coordinates, drop the extruded one.
      const double t = 3.0 * M_PI * (rng.uniform() - 0.5);
      const double sgn = t >= 0.0 ? 1.0 : -1.0;
      out[0] = std::sin(t) + spec.noise * rng.normal();
      out[1] = sgn * (std::cos(t) - 1.0) + spec.noise * rng.normal();
      break;
    }
    case DatasetKind::kSwissRoll: {
      const double t = 1.5 * M_PI * (1.0 + 2.0 * rng.uniform());
      out[0] = spec.scale * t * std::cos(t) + spec.noise * rng.normal();
      out[1] = spec.scale * t * std::sin(t) + spec.noise * rng.normal();
      break;
    }
    case DatasetKind::kDegradedPair:
      throw std::logic_error("sample_point: degraded_pair handled by caller");
  }
}

}  // namespace detail

/// Deterministic function of (spec.seed, stream position).
inline PointCloud sample(const DatasetSpec& spec, Index n, std::uint64_t position = 0) {
  spec.validate();
  if (n < 0) throw std::invalid_argument("sample: n must be nonnegative");

  const bool degraded = spec.kind == DatasetKind::kDegradedPair;
  const DatasetSpec& inner = degraded ? *spec.base : spec;
  const Index d = inner.dim();

  Eigen::MatrixXd factor_;
  const Eigen::MatrixXd* chol = nullptr;
  if (inner.kind == DatasetKind::kGaussian) {
    Eigen::Map<const EigenRowMat> cov(inner.cov.data(), d, d);
    factor_ = spd_sqrt(Eigen::MatrixXd(cov), "gaussian covariance");
    chol = &factor_;
  }

  PointCloud pc(d);
  pc.data.resize(static_cast<std::size_t>(n * d));
  for (Index i = 0; i < n; ++i) {
    PointRng rng(mix_seed(inner.seed, position + static_cast<std::uint64_t>(i)));
    double* out = pc.data.data() + i * d;
    detail::sample_point(inner, rng, chol, out);
    if (degraded) {
      // Degradation draws come from the same per-index stream, after the
      // base draws, so sigma = 0 reproduces the base sampler bit for bit.
      if (spec.degradation == Degradation::kGaussianNoise) {
        for (Index j = 0; j < d; ++j) out[j] += spec.sigma * rng.normal();
      } else {
        for (int c : spec.mask) out[c] = 0.0;
      }
    }
  }
  return pc;
}

/// Total variance (trace of the covariance) when known analytically.
/// Returns a negative value when the spec has no closed form.
inline double analytic_total_variance(const DatasetSpec& spec) {
  switch (spec.kind) {
    case DatasetKind::kGaussian: {
      const Index d = spec.dim();
      double tr = 0.0;
      for (Index j = 0; j < d; ++j) tr += spec.cov[static_cast<std::size_t>(j * d + j)];
      return tr;
    }
    case DatasetKind::kGaussianMixtureRing:
      // Centers of an equally spaced ring average to the origin, so the
      // trace is E||y||^2 = r^2 + 2 s^2 (a single component is pure noise).
      if (spec.components == 1) return 2.0 * spec.component_std * spec.component_std;
      return spec.radius * spec.radius + 2.0 * spec.component_std * spec.component_std;
    default:
      return -1.0;
  }
}

}  // namespace otm

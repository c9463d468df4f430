#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "otm/datasets.hpp"
#include "otm/embedding.hpp"

using namespace otm;

TEST_CASE("gaussian sampler: moments within 3 standard errors") {
  DatasetSpec spec;
  spec.kind = DatasetKind::kGaussian;
  spec.mean = {0.0, 0.0};
  spec.cov = {1.0, 0.0, 0.0, 1.0};
  spec.seed = 42;
  const Index n = 100000;
  PointCloud pc = sample(spec, n);

  Eigen::Vector2d mean = pc.mat().colwise().mean();
  const double se_mean = 1.0 / std::sqrt(double(n));
  CHECK(std::abs(mean[0]) < 3 * se_mean);
  CHECK(std::abs(mean[1]) < 3 * se_mean);

  Eigen::MatrixXd centered = pc.mat().rowwise() - mean.transpose();
  Eigen::Matrix2d cov = centered.transpose() * centered / double(n - 1);
  CHECK(std::abs(cov(0, 0) - 1.0) < 3 * std::sqrt(2.0 / n));
  CHECK(std::abs(cov(1, 1) - 1.0) < 3 * std::sqrt(2.0 / n));
  CHECK(std::abs(cov(0, 1)) < 3 / std::sqrt(double(n)));
}

TEST_CASE("mixture ring: nearest-center assignment is uniform (chi-square)") {
  DatasetSpec spec;
  spec.kind = DatasetKind::kGaussianMixtureRing;
  spec.components = 8;
  spec.radius = 4.0;
  spec.component_std = 0.4;
  spec.seed = 3;
  const Index n = 80000;
  PointCloud pc = sample(spec, n);

  std::vector<double> counts(8, 0.0);
  for (Index i = 0; i < n; ++i) {
    double best = 1e300;
    int arg = 0;
    for (int j = 0; j < 8; ++j) {
      const double a = 2.0 * M_PI * j / 8.0;
      const double dx = pc.at(i, 0) - 4.0 * std::cos(a);
      const double dy = pc.at(i, 1) - 4.0 * std::sin(a);
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        arg = j;
      }
    }
    counts[arg] += 1.0;
  }
  const double expected = double(n) / 8.0;
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - expected) * (c - expected) / expected;
  CHECK(chi2 < 24.322);  // chi-square(7) critical value at alpha = 0.001
}

TEST_CASE("degraded pair with sigma 0 reproduces the base stream exactly") {
  auto base = std::make_shared<DatasetSpec>();
  base->kind = DatasetKind::kSwissRoll;
  base->noise = 0.0;
  base->scale = 0.2;
  base->seed = 9;

  DatasetSpec deg;
  deg.kind = DatasetKind::kDegradedPair;
  deg.base = base;
  deg.degradation = Degradation::kGaussianNoise;
  deg.sigma = 0.0;

  PointCloud a = sample(*base, 256, 1000);
  PointCloud b = sample(deg, 256, 1000);
  CHECK(a.data == b.data);

  deg.sigma = 0.3;
  PointCloud c = sample(deg, 256, 1000);
  CHECK(a.data != c.data);
}

TEST_CASE("coordinate mask degradation zeroes the selected coordinates") {
  auto base = std::make_shared<DatasetSpec>();
  base->kind = DatasetKind::kGaussian;
  base->mean = {1.0, 2.0, 3.0};
  base->cov = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  base->seed = 4;

  DatasetSpec deg;
  deg.kind = DatasetKind::kDegradedPair;
  deg.base = base;
  deg.degradation = Degradation::kCoordinateMask;
  deg.mask = {2};

  PointCloud pc = sample(deg, 64);
  for (Index i = 0; i < pc.size(); ++i) CHECK(pc.at(i, 2) == 0.0);
}

TEST_CASE("stream determinism: consecutive draws equal one long draw") {
  for (DatasetKind kind : {DatasetKind::kGaussian, DatasetKind::kGaussianMixtureRing,
                           DatasetKind::kTwoMoons, DatasetKind::kCircles,
                           DatasetKind::kSCurve, DatasetKind::kSwissRoll}) {
    DatasetSpec spec;
    spec.kind = kind;
    spec.seed = 17;
    const Index n = 33, m = 21;
    const std::uint64_t p = 500;
    PointCloud a = sample(spec, n, p);
    PointCloud b = sample(spec, m, p + n);
    PointCloud whole = sample(spec, n + m, p);
    std::vector<double> joined = a.data;
    joined.insert(joined.end(), b.data.begin(), b.data.end());
    CHECK(joined == whole.data);
  }
}

TEST_CASE("disjoint seeds give uncorrelated streams") {
  DatasetSpec a, b;
  a.kind = b.kind = DatasetKind::kGaussian;
  a.seed = 1;
  b.seed = 2;
  const Index n = 10000;
  PointCloud pa = sample(a, n), pb = sample(b, n);
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  for (Index i = 0; i < n; ++i) {
    const double x = pa.at(i, 0), y = pb.at(i, 0);
    sx += x;
    sy += y;
    sxy += x * y;
    sxx += x * x;
    syy += y * y;
  }
  const double num = sxy - sx * sy / n;
  const double den = std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  CHECK(std::abs(num / den) < 0.05);
}

TEST_CASE("analytic total variance matches an empirical estimate") {
  DatasetSpec ring;
  ring.kind = DatasetKind::kGaussianMixtureRing;
  ring.seed = 8;
  const double analytic = analytic_total_variance(ring);
  CHECK(analytic == 4.0 * 4.0 + 2.0 * 0.4 * 0.4);
  PointCloud pc = sample(ring, 200000);
  Eigen::Vector2d mean = pc.mat().colwise().mean();
  Eigen::MatrixXd centered = pc.mat().rowwise() - mean.transpose();
  const double est = (centered.transpose() * centered / double(pc.size() - 1)).trace();
  CHECK(std::abs(est - analytic) / analytic < 0.02);
}

TEST_CASE("invalid specs are rejected") {
  DatasetSpec bad;
  bad.kind = DatasetKind::kCircles;
  bad.factor = 1.5;
  CHECK_THROWS(sample(bad, 1));
  DatasetSpec deg;
  deg.kind = DatasetKind::kDegradedPair;
  CHECK_THROWS(sample(deg, 1));
  DatasetSpec g;
  g.kind = DatasetKind::kGaussian;
  g.cov = {1.0};  // wrong length for dim 2
  CHECK_THROWS(sample(g, 1));
  CHECK_THROWS(sample(DatasetSpec{}, -1));
}

TEST_CASE("embed: identity, zero_pad and linear interpolation") {
  Embedding id;
  id.kind = EmbeddingKind::kIdentity;
  id.input_dim = id.output_dim = 2;
  PointCloud x(2, {1.0, 2.0});
  CHECK(embed(id, x).data == std::vector<double>{1.0, 2.0});

  Embedding pad;
  pad.kind = EmbeddingKind::kZeroPad;
  pad.input_dim = 2;
  pad.output_dim = 4;
  CHECK(embed(pad, x).data == std::vector<double>{1.0, 2.0, 0.0, 0.0});

  Embedding up;
  up.kind = EmbeddingKind::kLinearInterpUpsample;
  up.input_dim = 2;
  up.output_dim = 3;
  PointCloud y(2, {0.0, 2.0});
  CHECK(embed(up, y).data == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("embed: kind/dimension inconsistencies are errors") {
  Embedding id;
  id.kind = EmbeddingKind::kIdentity;
  id.input_dim = 2;
  id.output_dim = 3;
  CHECK_THROWS(id.validate());

  Embedding pad;
  pad.kind = EmbeddingKind::kZeroPad;
  pad.input_dim = 4;
  pad.output_dim = 2;
  CHECK_THROWS(pad.validate());

  Embedding ok;
  ok.kind = EmbeddingKind::kZeroPad;
  ok.input_dim = 2;
  ok.output_dim = 4;
  CHECK_THROWS(embed(ok, PointCloud(3, {1, 2, 3})));

  Embedding ex;
  ex.kind = EmbeddingKind::kExplicitMatrix;
  ex.input_dim = 2;
  ex.output_dim = 3;
  ex.matrix = {1.0, 2.0};  // wrong size
  CHECK_THROWS(ex.validate());
}

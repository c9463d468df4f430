#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "otm/tensor.hpp"

namespace otm {

/// Batch of points in R^dim, row per point. The universal sample currency.
struct PointCloud {
  Index dim = 0;
  std::vector<double> data;  // row-major, size() * dim entries

  PointCloud() = default;
  explicit PointCloud(Index d) : dim(d) {
    if (d <= 0) throw std::invalid_argument("point cloud dimension must be positive");
  }
  PointCloud(Index d, std::vector<double> values) : dim(d), data(std::move(values)) {
    if (d <= 0) throw std::invalid_argument("point cloud dimension must be positive");
    if (data.size() % static_cast<std::size_t>(d) != 0)
      throw std::invalid_argument("point cloud data length not divisible by dim");
    for (double v : data)
      if (!std::isfinite(v)) throw std::invalid_argument("point cloud contains non-finite value");
  }

  Index size() const { return static_cast<Index>(data.size()) / dim; }

  double at(Index i, Index j) const { return data[static_cast<std::size_t>(i * dim + j)]; }
  double& at(Index i, Index j) { return data[static_cast<std::size_t>(i * dim + j)]; }

  ConstMatMap mat() const { return ConstMatMap(data.data(), size(), dim); }
  MatMap mat() { return MatMap(data.data(), size(), dim); }

  Eigen::Map<const Eigen::VectorXd> point(Index i) const {
    return {data.data() + i * dim, dim};
  }

  Tensor tensor() const { return Tensor({size(), dim}, data); }

  static PointCloud from_tensor(const Tensor& t) {
    if (t.rank() != 2) throw std::invalid_argument("point cloud tensor must be rank 2");
    return PointCloud(t.shape[1], t.data);
  }

  template <typename Derived>
  static PointCloud from_matrix(const Eigen::MatrixBase<Derived>& m) {
    PointCloud pc(static_cast<Index>(m.cols()));
    pc.data.resize(static_cast<std::size_t>(m.size()));
    if (m.size() > 0) MatMap(pc.data.data(), m.rows(), m.cols()) = m;
    for (double v : pc.data)
      if (!std::isfinite(v)) throw std::invalid_argument("point cloud contains non-finite value");
    return pc;
  }
};

}  // namespace otm

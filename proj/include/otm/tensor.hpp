#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace otm {

using Index = std::int64_t;
using Shape = std::vector<Index>;

using EigenRowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatMap = Eigen::Map<EigenRowMat>;
using ConstMatMap = Eigen::Map<const EigenRowMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;

inline Index numel(const Shape& shape) {
  Index n = 1;
  for (Index e : shape) {
    if (e < 0) throw std::invalid_argument("tensor extent must be nonnegative");
    n *= e;
  }
  return n;
}

inline std::string shape_str(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

/// Dense row-major tensor of doubles. Rank 0 (scalar), 1 (vector) and
/// 2 (matrix) are the ranks the rest of the library uses.
struct Tensor {
  Shape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(Shape s) : shape(std::move(s)), data(numel(shape), 0.0) {}
  Tensor(Shape s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
    if (static_cast<Index>(data.size()) != numel(shape))
      throw std::invalid_argument("tensor data length does not match shape " +
                                  shape_str(shape));
  }

  static Tensor scalar(double v) { return Tensor({}, {v}); }
  static Tensor zeros(Shape s) { return Tensor(std::move(s)); }
  static Tensor full(Shape s, double v) {
    Tensor t(std::move(s));
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
  }

  Index size() const { return static_cast<Index>(data.size()); }
  int rank() const { return static_cast<int>(shape.size()); }
  Index rows() const { return shape.at(0); }
  Index cols() const { return shape.at(1); }

  double& at(Index i) { return data[static_cast<std::size_t>(i)]; }
  double at(Index i) const { return data[static_cast<std::size_t>(i)]; }
  double& at(Index r, Index c) { return data[static_cast<std::size_t>(r * cols() + c)]; }
  double at(Index r, Index c) const { return data[static_cast<std::size_t>(r * cols() + c)]; }

  double value() const {
    if (rank() != 0) throw std::logic_error("value() on non-scalar tensor");
    return data[0];
  }

  MatMap mat() {
    if (rank() != 2) throw std::logic_error("mat() on tensor of rank " + std::to_string(rank()));
    return MatMap(data.data(), shape[0], shape[1]);
  }
  ConstMatMap mat() const {
    if (rank() != 2) throw std::logic_error("mat() on tensor of rank " + std::to_string(rank()));
    return ConstMatMap(data.data(), shape[0], shape[1]);
  }
  VecMap flat() { return VecMap(data.data(), size()); }
  ConstVecMap flat() const { return ConstVecMap(data.data(), size()); }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline bool operator==(const Tensor& a, const Tensor& b) {
  return a.shape == b.shape && a.data == b.data;
}

}  // namespace otm

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "otm/point_cloud.hpp"

namespace otm {

enum class EmbeddingKind { kIdentity, kZeroPad, kLinearInterpUpsample, kExplicitMatrix };

inline std::string embedding_kind_name(EmbeddingKind k) {
  switch (k) {
    case EmbeddingKind::kIdentity: return "identity";
    case EmbeddingKind::kZeroPad: return "zero_pad";
    case EmbeddingKind::kLinearInterpUpsample: return "linear_interp_upsample";
    case EmbeddingKind::kExplicitMatrix: return "explicit_matrix";
  }
  return "?";
}

inline EmbeddingKind embedding_kind_from_name(const std::string& s) {
  if (s == "identity") return EmbeddingKind::kIdentity;
  if (s == "zero_pad") return EmbeddingKind::kZeroPad;
  if (s == "linear_interp_upsample") return EmbeddingKind::kLinearInterpUpsample;
  if (s == "explicit_matrix") return EmbeddingKind::kExplicitMatrix;
  throw std::invalid_argument("unknown embedding kind '" + s + "'");
}

/// Deterministic pointwise embedding Q: R^H -> R^D equalizing dimensions.
/// All kinds are linear, so Q also has a matrix form (used by the oracles).
struct Embedding {
  EmbeddingKind kind = EmbeddingKind::kIdentity;
  Index input_dim = 2;
  Index output_dim = 2;
  std::vector<double> matrix;  // row-major D x H, kExplicitMatrix only

  void validate() const {
    if (input_dim <= 0 || output_dim <= 0)
      throw std::invalid_argument("embedding: dimensions must be positive");
    switch (kind) {
      case EmbeddingKind::kIdentity:
        if (input_dim != output_dim)
          throw std::invalid_argument("identity embedding requires equal dimensions");
        break;
      case EmbeddingKind::kZeroPad:
      case EmbeddingKind::kLinearInterpUpsample:
        if (input_dim > output_dim)
          throw std::invalid_argument(embedding_kind_name(kind) + " requires H <= D");
        break;
      case EmbeddingKind::kExplicitMatrix:
        if (static_cast<Index>(matrix.size()) != input_dim * output_dim)
          throw std::invalid_argument("explicit embedding matrix must be D x H");
        break;
    }
  }

  Eigen::MatrixXd as_matrix() const {
    validate();
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(output_dim, input_dim);
    switch (kind) {
      case EmbeddingKind::kIdentity:
        q.setIdentity();
        break;
      case EmbeddingKind::kZeroPad:
        q.topRows(input_dim).setIdentity();
        break;
      case EmbeddingKind::kLinearInterpUpsample:
        // Coordinates are treated as samples of a 1-D signal on a uniform
        // grid, linearly interpolated up to D samples.
        for (Index j = 0; j < output_dim; ++j) {
          if (output_dim == 1 || input_dim == 1) {
            q(j, 0) = 1.0;
            continue;
          }
          const double pos = static_cast<double>(j) * static_cast<double>(input_dim - 1) /
                             static_cast<double>(output_dim - 1);
          const Index i0 = std::min(static_cast<Index>(pos), input_dim - 2);
          const double frac = pos - static_cast<double>(i0);
          q(j, i0) = 1.0 - frac;
          q(j, i0 + 1) = frac;
        }
        break;
      case EmbeddingKind::kExplicitMatrix:
        for (Index r = 0; r < output_dim; ++r)
          for (Index c = 0; c < input_dim; ++c)
            q(r, c) = matrix[static_cast<std::size_t>(r * input_dim + c)];
        break;
    }
    return q;
  }
};

inline PointCloud embed(const Embedding& q, const PointCloud& batch) {
  q.validate();
  if (batch.dim != q.input_dim)
    throw std::invalid_argument("embed: batch dimension " + std::to_string(batch.dim) +
                                " != embedding input dimension " +
                                std::to_string(q.input_dim));
  if (q.kind == EmbeddingKind::kIdentity) return batch;
  const Index n = batch.size(), h = q.input_dim, d = q.output_dim;
  PointCloud out(d);
  out.data.resize(static_cast<std::size_t>(n * d));
  if (q.kind == EmbeddingKind::kZeroPad) {
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < h; ++j) out.at(i, j) = batch.at(i, j);
      for (Index j = h; j < d; ++j) out.at(i, j) = 0.0;
    }
    return out;
  }
  const Eigen::MatrixXd m = q.as_matrix();
  out.mat() = batch.mat() * m.transpose();
  return out;
}

}  // namespace otm

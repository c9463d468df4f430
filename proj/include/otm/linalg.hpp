#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace otm {

inline constexpr double kSymTol = 1e-12;
inline constexpr double kEigClampTol = 1e-10;

inline void require_symmetric(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(what) + ": matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > kSymTol * scale)
    throw std::invalid_argument(std::string(what) + ": matrix is not symmetric");
}

/// Applies f to the eigenvalues of a symmetric PSD matrix. Eigenvalues in
/// [-1e-10, 0) are clamped to 0 (sampled covariance estimates can be
/// marginally indefinite); anything below that is an error.
template <typename F>
Eigen::MatrixXd sym_eig_apply(const Eigen::MatrixXd& m, F&& f, const char* what) {
  require_symmetric(m, what);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
  Eigen::VectorXd vals = eig.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    if (vals[i] < -kEigClampTol)
      throw std::invalid_argument(std::string(what) + ": matrix is not positive semi-definite");
    vals[i] = f(std::max(vals[i], 0.0));
  }
  return eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
}

/// Symmetric PSD square root.
inline Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m, const char* what = "spd_sqrt") {
  return sym_eig_apply(m, [](double v) { return std::sqrt(v); }, what);
}

/// Inverse square root; zero eigenvalues map to zero (pseudo-inverse).
inline Eigen::MatrixXd spd_inv_sqrt_pinv(const Eigen::MatrixXd& m,
                                         const char* what = "spd_inv_sqrt") {
  return sym_eig_apply(
      m, [](double v) { return v > kEigClampTol ? 1.0 / std::sqrt(v) : 0.0; }, what);
}

inline double smallest_eigenvalue(const Eigen::MatrixXd& m, const char* what = "eigenvalues") {
  require_symmetric(m, what);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error(std::string(what) + ": eigendecomposition failed");
  return eig.eigenvalues().minCoeff();
}

}  // namespace otm

#pragma once

#include "gmf/types.hpp"

namespace gmf {

/// Scaled unscented transform parameters; lambda = alpha^2 (n + kappa) - n.
struct UtParams {
  double alpha = 1e-3;
  double beta = 2.0;
  double kappa = 0.0;

  [[nodiscard]] double lambda(Eigen::Index n) const {
    return alpha * alpha * (static_cast<double>(n) + kappa) - static_cast<double>(n);
  }
  /// Throws DomainError unless alpha > 0 and n + lambda > 0.
  void validate(Eigen::Index n) const;
};

/// 2n+1 points (columns): the mean, then mean + and - the columns of the
/// Cholesky factor of (n + lambda) P.
struct SigmaPoints {
  Matrix points;
  Vector mean_weights;
  Vector cov_weights;
};

SigmaPoints ut_sigma_points(const Vector& mean, const Matrix& cov, const UtParams& params);

}  // namespace gmf

#include "gmf/filters/unscented.hpp"

#include "gmf/errors.hpp"
#include "gmf/stats.hpp"

namespace gmf {

void UtParams::validate(Eigen::Index n) const {
  if (!(alpha > 0.0)) {
    throw DomainError("UT: alpha must be positive");
  }
  if (!(static_cast<double>(n) + lambda(n) > 0.0)) {
    throw DomainError("UT: n + lambda must be positive");
  }
}

SigmaPoints ut_sigma_points(const Vector& mean, const Matrix& cov, const UtParams& params) {
  const Eigen::Index n = mean.size();
  if (cov.rows() != n || cov.cols() != n) {
    throw ShapeError("ut_sigma_points: covariance does not match mean dimension");
  }
  params.validate(n);
  const double lambda = params.lambda(n);
  const double scale = static_cast<double>(n) + lambda;
  const Matrix offsets = cholesky_factor(Matrix(scale * cov));

  SigmaPoints sp{Matrix(n, 2 * n + 1), Vector::Constant(2 * n + 1, 0.5 / scale),
                 Vector::Constant(2 * n + 1, 0.5 / scale)};
  sp.points.col(0) = mean;
  for (Eigen::Index i = 0; i < n; ++i) {
    sp.points.col(1 + i) = mean + offsets.col(i);
    sp.points.col(1 + n + i) = mean - offsets.col(i);
  }
  sp.mean_weights[0] = lambda / scale;
  sp.cov_weights[0] = lambda / scale + 1.0 - params.alpha * params.alpha + params.beta;
  return sp;
}

}  // namespace gmf

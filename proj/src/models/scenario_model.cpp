#include "gmf/models/scenario_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gmf/errors.hpp"
#include "gmf/stats.hpp"

namespace gmf {

std::vector<Eigen::Index> active_channels(const MeasurementContext& ctx, Eigen::Index meas_dim) {
  std::vector<Eigen::Index> rows;
  if (ctx.available.empty()) {
    rows.resize(static_cast<std::size_t>(meas_dim));
    for (Eigen::Index i = 0; i < meas_dim; ++i) {
      rows[static_cast<std::size_t>(i)] = i;
    }
    return rows;
  }
  if (static_cast<Eigen::Index>(ctx.available.size()) != meas_dim) {
    throw ShapeError("availability mask has " + std::to_string(ctx.available.size()) + " channels, model has " +
                     std::to_string(meas_dim));
  }
  for (Eigen::Index i = 0; i < meas_dim; ++i) {
    if (ctx.available[static_cast<std::size_t>(i)]) {
      rows.push_back(i);
    }
  }
  return rows;
}

LinearizedMeasurement linearize_measurement(const ScenarioModel& model, const Vector& x, const Measurement& m) {
  if (m.z.size() != model.meas_dim()) {
    throw ShapeError("measurement has dimension " + std::to_string(m.z.size()) + ", model expects " +
                     std::to_string(model.meas_dim()));
  }
  const auto rows = active_channels(m.context, model.meas_dim());
  const Vector full_innovation = model.innovation(m.z, model.measure(x, m.context));
  const Matrix full_jacobian = model.measurement_jacobian(x, m.context);
  const Matrix full_noise = model.measurement_noise(m);
  const auto k = static_cast<Eigen::Index>(rows.size());
  LinearizedMeasurement out{Vector(k), Matrix(k, x.size()), Matrix(k, k)};
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto ri = rows[static_cast<std::size_t>(i)];
    out.innovation[i] = full_innovation[ri];
    out.jacobian.row(i) = full_jacobian.row(ri);
    for (Eigen::Index j = 0; j < k; ++j) {
      out.noise(i, j) = full_noise(ri, rows[static_cast<std::size_t>(j)]);
    }
  }
  return out;
}

double gaussian_log_density(const Vector& residual, const Matrix& cov) {
  if (residual.size() == 0) {
    return 0.0;
  }
  const Eigen::LLT<Matrix> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("gaussian_log_density: covariance is not positive definite");
  }
  const Vector solved = llt.matrixL().solve(residual);
  const double log_det = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return -0.5 * (solved.squaredNorm() + log_det + static_cast<double>(residual.size()) * std::log(2.0 * std::numbers::pi));
}

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(angle + std::numbers::pi, two_pi);
  if (wrapped < 0.0) {
    wrapped += two_pi;
  }
  wrapped -= std::numbers::pi;
  // fmod maps +pi to -pi; the interval is (-pi, pi].
  return wrapped == -std::numbers::pi ? std::numbers::pi : wrapped;
}

double ScenarioModel::point_log_likelihood(const Vector& x, const Measurement& m) const {
  const auto lin = linearize_measurement(*this, x, m);
  return gaussian_log_density(lin.innovation, lin.noise);
}

double ScenarioModel::component_log_likelihood(const Vector& /*mean*/, const Vector& innovation,
                                               const Matrix& innovation_cov, const Measurement& /*m*/) const {
  return gaussian_log_density(innovation, innovation_cov);
}

void recenter_angles(Eigen::Ref<Matrix> states, const Vector& weights, const std::vector<Eigen::Index>& angles) {
  if (weights.size() != states.cols()) {
    throw ShapeError("recenter_angles: one weight per column required");
  }
  for (const auto a : angles) {
    if (a < 0 || a >= states.rows()) {
      throw ShapeError("recenter_angles: angular index out of range");
    }
    double s = 0.0;
    double c = 0.0;
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
      s += weights[j] * std::sin(states(a, j));
      c += weights[j] * std::cos(states(a, j));
    }
    const double center = std::atan2(s, c);
    for (Eigen::Index j = 0; j < states.cols(); ++j) {
      states(a, j) = center + wrap_angle(states(a, j) - center);
    }
  }
}

Vector ScenarioModel::sample_process_noise(double dt, RngStream& rng) const {
  const Matrix q = process_noise(dt);
  const Vector zero = Vector::Zero(q.rows());
  if (q.isDiagonal(0.0)) {
    Vector w(q.rows());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      w[i] = std::sqrt(std::max(0.0, q(i, i))) * rng.normal();
    }
    return w;
  }
  return mvn_sample(zero, q, rng);
}

}  // namespace gmf

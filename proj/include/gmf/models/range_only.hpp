#pragma once

#include <algorithm>

#include "gmf/errors.hpp"
#include "gmf/models/scenario_model.hpp"

namespace gmf {

/// Static planar target observed through its distance to the observer in
/// MeasurementContext::robot_position: z = |x - robot| + v, v ~ N(0, r).
/// The target drifts as a random walk with variance q per axis per second.
class RangeOnlyModel final : public ScenarioModel {
 public:
  RangeOnlyModel(double range_variance, double process_noise)
      : r_(range_variance), q_(process_noise) {
    if (!(r_ > 0.0) || q_ < 0.0) {
      throw DomainError("RangeOnlyModel: range variance must be positive and process noise non-negative");
    }
  }

  [[nodiscard]] Eigen::Index state_dim() const override { return 2; }
  [[nodiscard]] Eigen::Index meas_dim() const override { return 1; }
  [[nodiscard]] Eigen::Index noise_dim() const override { return 2; }

  [[nodiscard]] Vector dynamics(const Vector& x, double, double, const Vector& noise) const override {
    return x + noise;
  }
  [[nodiscard]] Matrix dynamics_jacobian(const Vector&, double, double) const override {
    return Matrix::Identity(2, 2);
  }
  [[nodiscard]] Matrix noise_gain(const Vector&, double, double) const override { return Matrix::Identity(2, 2); }
  [[nodiscard]] Matrix process_noise(double dt) const override { return Matrix::Identity(2, 2) * (q_ * dt); }

  [[nodiscard]] Vector measure(const Vector& x, const MeasurementContext& ctx) const override {
    return Vector::Constant(1, (Eigen::Vector2d(x[0], x[1]) - ctx.robot_position).norm());
  }
  [[nodiscard]] Matrix measurement_jacobian(const Vector& x, const MeasurementContext& ctx) const override {
    const Eigen::Vector2d rel = Eigen::Vector2d(x[0], x[1]) - ctx.robot_position;
    // The gradient is undefined on the observer itself; any unit direction is as good as zero there.
    const double d = std::max(rel.norm(), 1e-9);
    return (rel / d).transpose();
  }
  [[nodiscard]] Matrix measurement_noise(const Measurement&) const override { return Matrix::Constant(1, 1, r_); }

 private:
  double r_;
  double q_;
};

}  // namespace gmf

#pragma once

#include "gmf/errors.hpp"
#include "gmf/models/scenario_model.hpp"

namespace gmf {

/// x' = A x + G w,  z = C x + v. Used for Kalman-filter consistency checks.
class LinearGaussianModel final : public ScenarioModel {
 public:
  LinearGaussianModel(Matrix transition, Matrix noise_gain, Matrix process_noise, Matrix observation,
                      Matrix measurement_noise)
      : a_(std::move(transition)),
        g_(std::move(noise_gain)),
        q_(std::move(process_noise)),
        c_(std::move(observation)),
        r_(std::move(measurement_noise)) {
    if (a_.rows() != a_.cols() || g_.rows() != a_.rows() || q_.rows() != g_.cols() || c_.cols() != a_.rows() ||
        r_.rows() != c_.rows()) {
      throw ShapeError("LinearGaussianModel: inconsistent matrix dimensions");
    }
  }

  /// Scalar random walk observed directly.
  static LinearGaussianModel scalar(double a, double q, double r) {
    return {Matrix::Constant(1, 1, a), Matrix::Identity(1, 1), Matrix::Constant(1, 1, q), Matrix::Identity(1, 1),
            Matrix::Constant(1, 1, r)};
  }

  [[nodiscard]] Eigen::Index state_dim() const override { return a_.rows(); }
  [[nodiscard]] Eigen::Index meas_dim() const override { return c_.rows(); }
  [[nodiscard]] Eigen::Index noise_dim() const override { return g_.cols(); }

  [[nodiscard]] Vector dynamics(const Vector& x, double, double, const Vector& noise) const override {
    return a_ * x + g_ * noise;
  }
  [[nodiscard]] Matrix dynamics_jacobian(const Vector&, double, double) const override { return a_; }
  [[nodiscard]] Matrix noise_gain(const Vector&, double, double) const override { return g_; }
  [[nodiscard]] Matrix process_noise(double) const override { return q_; }

  [[nodiscard]] Vector measure(const Vector& x, const MeasurementContext&) const override { return c_ * x; }
  [[nodiscard]] Matrix measurement_jacobian(const Vector&, const MeasurementContext&) const override { return c_; }
  [[nodiscard]] Matrix measurement_noise(const Measurement&) const override { return r_; }

 private:
  Matrix a_;
  Matrix g_;
  Matrix q_;
  Matrix c_;
  Matrix r_;
};

}  // namespace gmf

#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmf/rng.hpp"
#include "gmf/types.hpp"

namespace gmf {

/// Side information that accompanies a measurement.
struct MeasurementContext {
  double t = 0.0;
  /// Per-channel availability; empty means every channel is present.
  std::vector<bool> available;
  /// Observer position for range-type sensors.
  Eigen::Vector2d robot_position = Eigen::Vector2d::Zero();
  /// Observed scalar value, for models whose linearization branch depends on it.
  std::optional<double> observed;
};

struct Measurement {
  Vector z;
  MeasurementContext context;
};

/// Dynamics and measurement model shared by all filters.
///
/// The state evolves as x' = f(x, u(t), w, dt) with w ~ N(0, Q) entering
/// through the gain Gamma = df/dw; measurements are z = h(x) + v, v ~ N(0, R).
/// Implementations are immutable and safe to evaluate concurrently.
class ScenarioModel {
 public:
  virtual ~ScenarioModel() = default;

  [[nodiscard]] virtual Eigen::Index state_dim() const = 0;
  [[nodiscard]] virtual Eigen::Index meas_dim() const = 0;
  [[nodiscard]] virtual Eigen::Index noise_dim() const = 0;

  [[nodiscard]] virtual Vector dynamics(const Vector& x, double t, double dt, const Vector& noise) const = 0;
  /// df/dx at zero noise.
  [[nodiscard]] virtual Matrix dynamics_jacobian(const Vector& x, double t, double dt) const = 0;
  /// df/dw at zero noise.
  [[nodiscard]] virtual Matrix noise_gain(const Vector& x, double t, double dt) const = 0;
  [[nodiscard]] virtual Matrix process_noise(double dt) const = 0;

  [[nodiscard]] virtual Vector measure(const Vector& x, const MeasurementContext& ctx) const = 0;
  [[nodiscard]] virtual Matrix measurement_jacobian(const Vector& x, const MeasurementContext& ctx) const = 0;
  [[nodiscard]] virtual Matrix measurement_noise(const Measurement& m) const = 0;

  /// z - predicted, with any wrapping the measurement space needs.
  [[nodiscard]] virtual Vector innovation(const Vector& z, const Vector& predicted) const { return z - predicted; }

  /// log p(z | x) for a point state. Default: Gaussian with R on the
  /// available channels.
  [[nodiscard]] virtual double point_log_likelihood(const Vector& x, const Measurement& m) const;

  /// Log weight factor for a Gaussian component evaluated at its predicted
  /// mean. Default: log N(innovation; 0, S).
  [[nodiscard]] virtual double component_log_likelihood(const Vector& mean, const Vector& innovation,
                                                        const Matrix& innovation_cov, const Measurement& m) const;

  /// Draw w ~ N(0, Q).
  [[nodiscard]] Vector sample_process_noise(double dt, RngStream& rng) const;

  /// State entries that are angles and enter the model only through
  /// trigonometric functions, so any multiple of 2 pi may be added to them.
  [[nodiscard]] virtual std::vector<Eigen::Index> angular_states() const { return {}; }
};

/// Indices of the available measurement channels.
std::vector<Eigen::Index> active_channels(const MeasurementContext& ctx, Eigen::Index meas_dim);

/// Innovation, Jacobian and noise restricted to the available channels.
struct LinearizedMeasurement {
  Vector innovation;
  Matrix jacobian;
  Matrix noise;
};

LinearizedMeasurement linearize_measurement(const ScenarioModel& model, const Vector& x, const Measurement& m);

/// log N(residual; 0, cov).
double gaussian_log_density(const Vector& residual, const Matrix& cov);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Moves each listed angular entry of every column of `states` to within pi
/// of the weighted circular mean of that entry. The represented density is
/// unchanged, but sample covariances no longer see 2 pi jumps between
/// samples on different branches.
void recenter_angles(Eigen::Ref<Matrix> states, const Vector& weights, const std::vector<Eigen::Index>& angles);

}  // namespace gmf

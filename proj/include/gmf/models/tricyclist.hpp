#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "gmf/models/scenario_model.hpp"

namespace gmf {

/// Tricycle pose plus the angles and rates of the two friends riding
/// merry-go-rounds. Vector layout: [X, Y, theta, phi1, phi1_dot, phi2, phi2_dot].
struct TricyclistState {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;
  double phi1 = 0.0;
  double phi1_dot = 0.0;
  double phi2 = 0.0;
  double phi2_dot = 0.0;

  static constexpr Eigen::Index kDim = 7;

  [[nodiscard]] Vector to_vector() const;
  static TricyclistState from_vector(const Vector& v);
  /// Copy with every angle reduced to (-pi, pi].
  [[nodiscard]] TricyclistState wrapped() const;
};

struct TricyclistMeasurement {
  std::array<double, 2> bearing{0.0, 0.0};
  std::array<bool, 2> available{true, true};
};

struct MerryGoRound {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
};

struct ControlInput {
  double speed = 0.0;     // m/s
  double steering = 0.0;  // rad
};

struct ControlSegment {
  double duration = 0.0;  // s
  ControlInput input;
};

/// Channel j is available at step k iff (k + offset) mod period < on.
struct ChannelSchedule {
  int period = 1;
  int on = 1;
  int offset = 0;

  [[nodiscard]] bool available(long step) const;
};

/// Process noise channels, in order:
///   0 speed [m/s], 1 steering [rad], 2 phi1 rate [rad/s], 3 phi2 rate [rad/s], 4 heading [rad].
struct TricyclistConfig {
  double wheelbase = 1.0;
  std::array<MerryGoRound, 2> friends{};
  std::vector<ControlSegment> controls;
  std::array<ChannelSchedule, 2> schedule{};
  Vector process_noise_diag = Vector::Zero(5);
  Vector measurement_noise_diag = Vector::Zero(2);
  double dt = 0.5;
  int steps = 100;
  Vector initial_mean = Vector::Zero(TricyclistState::kDim);
  Vector initial_cov_diag = Vector::Ones(TricyclistState::kDim);

  /// Piecewise-constant control at time t; the last segment is held past the end.
  [[nodiscard]] ControlInput control_at(double t) const;
  [[nodiscard]] std::vector<bool> availability(long step) const;

  /// Park geometry, controls and noise levels shipped with the benchmark.
  static TricyclistConfig defaults();
};

/// One step of the tricycle and merry-go-round kinematics. `noise` has the
/// five channels documented on TricyclistConfig. Angles in the result are wrapped.
TricyclistState tricyclist_step(const TricyclistState& state, const ControlInput& controls, double wheelbase,
                                double dt, const Vector& noise);

/// Bearings to both friends relative to the tricycle heading. Throws
/// DomainError when a friend coincides with the tricycle.
TricyclistMeasurement tricyclist_measure(const TricyclistState& state, const std::array<MerryGoRound, 2>& geometry,
                                         const std::array<bool, 2>& availability);

/// ScenarioModel adapter. Angles are carried unwrapped inside the filter state
/// so that sample covariances stay meaningful; bearings are wrapped.
class TricyclistModel final : public ScenarioModel {
 public:
  explicit TricyclistModel(TricyclistConfig config);

  [[nodiscard]] Eigen::Index state_dim() const override { return TricyclistState::kDim; }
  [[nodiscard]] Eigen::Index meas_dim() const override { return 2; }
  [[nodiscard]] Eigen::Index noise_dim() const override { return 5; }

  [[nodiscard]] Vector dynamics(const Vector& x, double t, double dt, const Vector& noise) const override;
  [[nodiscard]] Matrix dynamics_jacobian(const Vector& x, double t, double dt) const override;
  [[nodiscard]] Matrix noise_gain(const Vector& x, double t, double dt) const override;
  [[nodiscard]] Matrix process_noise(double dt) const override;

  [[nodiscard]] Vector measure(const Vector& x, const MeasurementContext& ctx) const override;
  [[nodiscard]] Matrix measurement_jacobian(const Vector& x, const MeasurementContext& ctx) const override;
  [[nodiscard]] Matrix measurement_noise(const Measurement& m) const override;
  [[nodiscard]] Vector innovation(const Vector& z, const Vector& predicted) const override;
  [[nodiscard]] std::vector<Eigen::Index> angular_states() const override { return {2, 3, 5}; }

  [[nodiscard]] const TricyclistConfig& config() const noexcept { return config_; }

 private:
  TricyclistConfig config_;
};

}  // namespace gmf

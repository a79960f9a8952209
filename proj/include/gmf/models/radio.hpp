#pragma once

#include <utility>

#include <Eigen/Dense>

#include "gmf/models/scenario_model.hpp"

namespace gmf {

/// snr = p1 * log10(d) + p2, in dB.
struct LogLinearParams {
  double p1 = -20.0;
  double p2 = 50.0;
};

enum class PropagationMode { kLos, kNlos };

/// Parameters of the bimodal log-linear SNR measurement model.
struct RadioParams {
  LogLinearParams los;
  LogLinearParams nlos{-25.0, 40.0};
  /// Samples within this distance of the robot are considered likely LOS.
  double los_threshold = 15.0;
  /// Mode probabilities (LOS, NLOS) within and beyond the threshold. The
  /// beyond pair deliberately does not sum to one.
  std::pair<double, double> within{0.95, 0.05};
  std::pair<double, double> beyond{0.05, 0.5};
  double r_min = 8.0;   // dB^2
  double r_max = 35.0;  // dB^2
  double snr_low = 10.0;
  double snr_high = 50.0;
  /// Random-walk variance per axis per second for the static source.
  double process_noise = 0.5;
  double d_floor = 0.1;
};

struct SnrContext {
  Eigen::Vector2d robot_position = Eigen::Vector2d::Zero();
  double snr_measured = 0.0;
  RadioParams params;
};

/// Predicted SNR for a source hypothesis; distances below d_floor are clamped.
double snr_predict(const Eigen::Vector2d& source, const SnrContext& ctx, PropagationMode mode);

/// (p_los, p_nlos) by distance to the robot; the threshold itself counts as within.
std::pair<double, double> los_mode_probabilities(const Eigen::Vector2d& source, const SnrContext& ctx);

/// Linear blend between r_max (at snr_low and below) and r_min (at snr_high and above).
double adaptive_measurement_noise(double snr_measured, double snr_low, double snr_high, double r_min, double r_max);

/// p_los N(snr; snr_los, R) + p_nlos N(snr; snr_nlos, R).
double bimodal_likelihood(const Eigen::Vector2d& source, const SnrContext& ctx, double noise_variance);

/// Same, with R from adaptive_measurement_noise.
double bimodal_likelihood(const Eigen::Vector2d& source, const SnrContext& ctx);

/// Logarithm of bimodal_likelihood, stable for large residuals.
double bimodal_log_likelihood(const Eigen::Vector2d& source, const SnrContext& ctx, double noise_variance);

/// Static planar source observed through SNR. The EKF-style linearization
/// follows one propagation mode: the one that better explains the observed
/// SNR when the context carries it, otherwise the more probable mode at the
/// evaluation point. Weights use the full bimodal likelihood.
class RadioModel final : public ScenarioModel {
 public:
  explicit RadioModel(RadioParams params);

  [[nodiscard]] Eigen::Index state_dim() const override { return 2; }
  [[nodiscard]] Eigen::Index meas_dim() const override { return 1; }
  [[nodiscard]] Eigen::Index noise_dim() const override { return 2; }

  [[nodiscard]] Vector dynamics(const Vector& x, double t, double dt, const Vector& noise) const override;
  [[nodiscard]] Matrix dynamics_jacobian(const Vector& x, double t, double dt) const override;
  [[nodiscard]] Matrix noise_gain(const Vector& x, double t, double dt) const override;
  [[nodiscard]] Matrix process_noise(double dt) const override;

  [[nodiscard]] Vector measure(const Vector& x, const MeasurementContext& ctx) const override;
  [[nodiscard]] Matrix measurement_jacobian(const Vector& x, const MeasurementContext& ctx) const override;
  [[nodiscard]] Matrix measurement_noise(const Measurement& m) const override;

  [[nodiscard]] double point_log_likelihood(const Vector& x, const Measurement& m) const override;
  [[nodiscard]] double component_log_likelihood(const Vector& mean, const Vector& innovation,
                                                const Matrix& innovation_cov, const Measurement& m) const override;

  [[nodiscard]] const RadioParams& params() const noexcept { return params_; }
  [[nodiscard]] SnrContext context_for(const Measurement& m) const;
  [[nodiscard]] PropagationMode dominant_mode(const Vector& x, const MeasurementContext& ctx) const;

 private:
  RadioParams params_;
};

}  // namespace gmf

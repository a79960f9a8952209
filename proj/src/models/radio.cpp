#include "gmf/models/radio.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gmf/errors.hpp"

namespace gmf {
namespace {

const LogLinearParams& params_for(const RadioParams& p, PropagationMode mode) {
  return mode == PropagationMode::kLos ? p.los : p.nlos;
}

double log_normal_pdf(double residual, double variance) {
  return -0.5 * (residual * residual / variance + std::log(2.0 * std::numbers::pi * variance));
}

}  // namespace

double snr_predict(const Eigen::Vector2d& source, const SnrContext& ctx, PropagationMode mode) {
  const double d = std::max((source - ctx.robot_position).norm(), ctx.params.d_floor);
  const auto& lp = params_for(ctx.params, mode);
  return lp.p1 * std::log10(d) + lp.p2;
}

std::pair<double, double> los_mode_probabilities(const Eigen::Vector2d& source, const SnrContext& ctx) {
  const double d = (source - ctx.robot_position).norm();
  return d <= ctx.params.los_threshold ? ctx.params.within : ctx.params.beyond;
}

double adaptive_measurement_noise(double snr_measured, double snr_low, double snr_high, double r_min, double r_max) {
  if (!(snr_low < snr_high)) {
    throw DomainError("adaptive_measurement_noise: snr_low must be below snr_high");
  }
  const double lambda = std::clamp((snr_measured - snr_low) / (snr_high - snr_low), 0.0, 1.0);
  return lambda * r_min + (1.0 - lambda) * r_max;
}

double bimodal_log_likelihood(const Eigen::Vector2d& source, const SnrContext& ctx, double noise_variance) {
  if (!(noise_variance > 0.0)) {
    throw DomainError("bimodal_likelihood: noise variance must be positive");
  }
  const auto [p_los, p_nlos] = los_mode_probabilities(source, ctx);
  const double a = std::log(p_los) +
                   log_normal_pdf(ctx.snr_measured - snr_predict(source, ctx, PropagationMode::kLos), noise_variance);
  const double b = std::log(p_nlos) +
                   log_normal_pdf(ctx.snr_measured - snr_predict(source, ctx, PropagationMode::kNlos), noise_variance);
  const double hi = std::max(a, b);
  if (!std::isfinite(hi)) {
    return hi;
  }
  return hi + std::log(std::exp(a - hi) + std::exp(b - hi));
}

double bimodal_likelihood(const Eigen::Vector2d& source, const SnrContext& ctx, double noise_variance) {
  return std::exp(bimodal_log_likelihood(source, ctx, noise_variance));
}

double bimodal_likelihood(const Eigen::Vector2d& source, const SnrContext& ctx) {
  const auto& p = ctx.params;
  return bimodal_likelihood(source, ctx,
                            adaptive_measurement_noise(ctx.snr_measured, p.snr_low, p.snr_high, p.r_min, p.r_max));
}

RadioModel::RadioModel(RadioParams params) : params_(params) {
  if (!(params_.los_threshold > 0.0)) {
    throw DomainError("RadioModel: los_threshold must be positive");
  }
  if (params_.r_min > params_.r_max) {
    throw DomainError("RadioModel: r_min must not exceed r_max");
  }
  if (!(params_.snr_low < params_.snr_high)) {
    throw DomainError("RadioModel: snr_low must be below snr_high");
  }
  if (!(params_.d_floor > 0.0)) {
    throw DomainError("RadioModel: d_floor must be positive");
  }
}

SnrContext RadioModel::context_for(const Measurement& m) const {
  if (m.z.size() != 1) {
    throw ShapeError("RadioModel: expected a scalar SNR measurement");
  }
  return {m.context.robot_position, m.z[0], params_};
}

PropagationMode RadioModel::dominant_mode(const Vector& x, const MeasurementContext& ctx) const {
  const Eigen::Vector2d source(x[0], x[1]);
  const SnrContext snr{ctx.robot_position, ctx.observed.value_or(0.0), params_};
  const auto [p_los, p_nlos] = los_mode_probabilities(source, snr);
  if (!ctx.observed) {
    return p_los >= p_nlos ? PropagationMode::kLos : PropagationMode::kNlos;
  }
  const double r = adaptive_measurement_noise(*ctx.observed, params_.snr_low, params_.snr_high, params_.r_min,
                                              params_.r_max);
  const double los = std::log(p_los) + log_normal_pdf(*ctx.observed - snr_predict(source, snr, PropagationMode::kLos), r);
  const double nlos =
      std::log(p_nlos) + log_normal_pdf(*ctx.observed - snr_predict(source, snr, PropagationMode::kNlos), r);
  return los >= nlos ? PropagationMode::kLos : PropagationMode::kNlos;
}

Vector RadioModel::dynamics(const Vector& x, double /*t*/, double /*dt*/, const Vector& noise) const {
  return x + noise;
}

Matrix RadioModel::dynamics_jacobian(const Vector& /*x*/, double /*t*/, double /*dt*/) const {
  return Matrix::Identity(2, 2);
}

Matrix RadioModel::noise_gain(const Vector& /*x*/, double /*t*/, double /*dt*/) const {
  return Matrix::Identity(2, 2);
}

Matrix RadioModel::process_noise(double dt) const { return Matrix::Identity(2, 2) * (params_.process_noise * dt); }

Vector RadioModel::measure(const Vector& x, const MeasurementContext& ctx) const {
  const SnrContext snr{ctx.robot_position, 0.0, params_};
  Vector z(1);
  z[0] = snr_predict(Eigen::Vector2d(x[0], x[1]), snr, dominant_mode(x, ctx));
  return z;
}

Matrix RadioModel::measurement_jacobian(const Vector& x, const MeasurementContext& ctx) const {
  const Eigen::Vector2d rel = Eigen::Vector2d(x[0], x[1]) - ctx.robot_position;
  Matrix h = Matrix::Zero(1, 2);
  const double d2 = rel.squaredNorm();
  if (d2 < params_.d_floor * params_.d_floor) {
    return h;  // clamped region: prediction is constant
  }
  const auto& lp = dominant_mode(x, ctx) == PropagationMode::kLos ? params_.los : params_.nlos;
  h.row(0) = (lp.p1 / std::numbers::ln10) * rel.transpose() / d2;
  return h;
}

Matrix RadioModel::measurement_noise(const Measurement& m) const {
  Matrix r(1, 1);
  r(0, 0) = adaptive_measurement_noise(m.z[0], params_.snr_low, params_.snr_high, params_.r_min, params_.r_max);
  return r;
}

double RadioModel::point_log_likelihood(const Vector& x, const Measurement& m) const {
  return bimodal_log_likelihood(Eigen::Vector2d(x[0], x[1]), context_for(m), measurement_noise(m)(0, 0));
}

double RadioModel::component_log_likelihood(const Vector& mean, const Vector& /*innovation*/,
                                            const Matrix& /*innovation_cov*/, const Measurement& m) const {
  return point_log_likelihood(mean, m);
}

}  // namespace gmf

#include "gmf/models/tricyclist.hpp"

#include <cmath>
#include <numbers>

#include "gmf/errors.hpp"

namespace gmf {
namespace {

enum StateIndex : Eigen::Index { kX = 0, kY, kTheta, kPhi1, kPhi1Dot, kPhi2, kPhi2Dot };
enum NoiseIndex : Eigen::Index { kSpeed = 0, kSteering, kRate1, kRate2, kHeading };

Eigen::Vector2d friend_position(const MerryGoRound& mgr, double phi) {
  return mgr.center + mgr.radius * Eigen::Vector2d(std::cos(phi), std::sin(phi));
}

double friend_angle(const Vector& x, int j) { return j == 0 ? x[kPhi1] : x[kPhi2]; }

}  // namespace

Vector TricyclistState::to_vector() const {
  Vector v(kDim);
  v << x, y, theta, phi1, phi1_dot, phi2, phi2_dot;
  return v;
}

TricyclistState TricyclistState::from_vector(const Vector& v) {
  if (v.size() != kDim) {
    throw ShapeError("TricyclistState: expected 7 entries");
  }
  return {v[kX], v[kY], v[kTheta], v[kPhi1], v[kPhi1Dot], v[kPhi2], v[kPhi2Dot]};
}

TricyclistState TricyclistState::wrapped() const {
  TricyclistState s = *this;
  s.theta = wrap_angle(theta);
  s.phi1 = wrap_angle(phi1);
  s.phi2 = wrap_angle(phi2);
  return s;
}

bool ChannelSchedule::available(long step) const {
  if (period <= 0) {
    return true;
  }
  long phase = (step + offset) % period;
  if (phase < 0) {
    phase += period;
  }
  return phase < on;
}

ControlInput TricyclistConfig::control_at(double t) const {
  if (controls.empty()) {
    return {};
  }
  double elapsed = 0.0;
  for (const auto& segment : controls) {
    elapsed += segment.duration;
    if (t < elapsed) {
      return segment.input;
    }
  }
  return controls.back().input;
}

std::vector<bool> TricyclistConfig::availability(long step) const {
  return {schedule[0].available(step), schedule[1].available(step)};
}

TricyclistConfig TricyclistConfig::defaults() {
  constexpr double pi = std::numbers::pi;
  TricyclistConfig c;
  c.wheelbase = 1.0;
  c.friends = {MerryGoRound{{-10.0, 20.0}, 5.0}, MerryGoRound{{20.0, 15.0}, 4.0}};
  // Two straight legs and two left arcs of radius ~14 m keep the rider in the park.
  c.controls = {
      {10.0, {1.5, 0.0}},
      {30.0, {1.5, 0.07}},
      {10.0, {1.5, 0.0}},
      {30.0, {1.5, 0.07}},
  };
  c.schedule = {ChannelSchedule{4, 3, 0}, ChannelSchedule{5, 3, 2}};
  c.process_noise_diag = (Vector(5) << 0.0567, 0.0, 0.0063, 0.0063, 0.0).finished();
  c.measurement_noise_diag = (Vector(2) << 0.3046e-3, 0.1354e-3).finished();
  c.dt = 0.5;
  c.steps = 160;
  c.initial_mean = (Vector(7) << 0.0, 0.0, 0.5, 0.0, 2.0 * pi / 30.0, 0.5 * pi, -2.0 * pi / 40.0).finished();
  const double pos = 18.75;
  const double heading = 5.0 * pi / 8.0;
  const double phase = 5.0 * pi / 6.0;
  const double rate = 1.857e-2;
  c.initial_cov_diag =
      (Vector(7) << pos * pos, pos * pos, heading * heading, phase * phase, rate * rate, phase * phase, rate * rate)
          .finished();
  return c;
}

TricyclistState tricyclist_step(const TricyclistState& state, const ControlInput& controls, double wheelbase,
                                double dt, const Vector& noise) {
  if (!(dt > 0.0)) {
    throw DomainError("tricyclist_step: dt must be positive");
  }
  if (noise.size() != 5) {
    throw ShapeError("tricyclist_step: expected 5 noise channels");
  }
  const double speed = controls.speed + noise[kSpeed];
  const double steering = controls.steering + noise[kSteering];
  TricyclistState next = state;
  next.x += speed * dt * std::cos(state.theta);
  next.y += speed * dt * std::sin(state.theta);
  next.theta += speed * dt * std::tan(steering) / wheelbase + noise[kHeading];
  next.phi1 += (state.phi1_dot + noise[kRate1]) * dt;
  next.phi2 += (state.phi2_dot + noise[kRate2]) * dt;
  const Vector v = next.to_vector();
  if (!v.allFinite()) {
    throw NumericalError("tricyclist_step: non-finite state");
  }
  return next.wrapped();
}

TricyclistMeasurement tricyclist_measure(const TricyclistState& state, const std::array<MerryGoRound, 2>& geometry,
                                         const std::array<bool, 2>& availability) {
  TricyclistMeasurement m;
  const std::array<double, 2> phis{state.phi1, state.phi2};
  for (int j = 0; j < 2; ++j) {
    m.available[j] = availability[j];
    if (!availability[j]) {
      continue;
    }
    const Eigen::Vector2d rel = friend_position(geometry[j], phis[j]) - Eigen::Vector2d(state.x, state.y);
    if (rel.norm() == 0.0) {
      throw DomainError("tricyclist_measure: friend " + std::to_string(j + 1) + " coincides with the tricycle");
    }
    m.bearing[j] = wrap_angle(std::atan2(rel.y(), rel.x()) - state.theta);
  }
  return m;
}

TricyclistModel::TricyclistModel(TricyclistConfig config) : config_(std::move(config)) {
  if (config_.process_noise_diag.size() != 5 || config_.measurement_noise_diag.size() != 2) {
    throw ShapeError("TricyclistModel: noise diagonals must have 5 and 2 entries");
  }
  if (!(config_.wheelbase > 0.0)) {
    throw DomainError("TricyclistModel: wheelbase must be positive");
  }
}

Vector TricyclistModel::dynamics(const Vector& x, double t, double dt, const Vector& noise) const {
  const ControlInput u = config_.control_at(t);
  const double speed = u.speed + noise[kSpeed];
  const double steering = u.steering + noise[kSteering];
  Vector next = x;
  next[kX] += speed * dt * std::cos(x[kTheta]);
  next[kY] += speed * dt * std::sin(x[kTheta]);
  next[kTheta] += speed * dt * std::tan(steering) / config_.wheelbase + noise[kHeading];
  next[kPhi1] += (x[kPhi1Dot] + noise[kRate1]) * dt;
  next[kPhi2] += (x[kPhi2Dot] + noise[kRate2]) * dt;
  return next;
}

Matrix TricyclistModel::dynamics_jacobian(const Vector& x, double t, double dt) const {
  const ControlInput u = config_.control_at(t);
  Matrix f = Matrix::Identity(7, 7);
  f(kX, kTheta) = -u.speed * dt * std::sin(x[kTheta]);
  f(kY, kTheta) = u.speed * dt * std::cos(x[kTheta]);
  f(kPhi1, kPhi1Dot) = dt;
  f(kPhi2, kPhi2Dot) = dt;
  return f;
}

Matrix TricyclistModel::noise_gain(const Vector& x, double t, double dt) const {
  const ControlInput u = config_.control_at(t);
  const double cos_steer = std::cos(u.steering);
  Matrix g = Matrix::Zero(7, 5);
  g(kX, kSpeed) = dt * std::cos(x[kTheta]);
  g(kY, kSpeed) = dt * std::sin(x[kTheta]);
  g(kTheta, kSpeed) = dt * std::tan(u.steering) / config_.wheelbase;
  g(kTheta, kSteering) = u.speed * dt / (config_.wheelbase * cos_steer * cos_steer);
  g(kPhi1, kRate1) = dt;
  g(kPhi2, kRate2) = dt;
  g(kTheta, kHeading) = 1.0;
  return g;
}

Matrix TricyclistModel::process_noise(double /*dt*/) const { return config_.process_noise_diag.asDiagonal(); }

Vector TricyclistModel::measure(const Vector& x, const MeasurementContext& /*ctx*/) const {
  Vector z(2);
  for (int j = 0; j < 2; ++j) {
    const Eigen::Vector2d rel = friend_position(config_.friends[j], friend_angle(x, j)) - Eigen::Vector2d(x[kX], x[kY]);
    z[j] = wrap_angle(std::atan2(rel.y(), rel.x()) - x[kTheta]);
  }
  return z;
}

Matrix TricyclistModel::measurement_jacobian(const Vector& x, const MeasurementContext& /*ctx*/) const {
  Matrix h = Matrix::Zero(2, 7);
  for (int j = 0; j < 2; ++j) {
    const auto& mgr = config_.friends[j];
    const double phi = friend_angle(x, j);
    const Eigen::Vector2d rel = friend_position(mgr, phi) - Eigen::Vector2d(x[kX], x[kY]);
    const double q = std::max(rel.squaredNorm(), 1e-12);
    h(j, kX) = rel.y() / q;
    h(j, kY) = -rel.x() / q;
    h(j, kTheta) = -1.0;
    h(j, j == 0 ? kPhi1 : kPhi2) = mgr.radius * (rel.y() * std::sin(phi) + rel.x() * std::cos(phi)) / q;
  }
  return h;
}

Matrix TricyclistModel::measurement_noise(const Measurement& /*m*/) const {
  return config_.measurement_noise_diag.asDiagonal();
}

Vector TricyclistModel::innovation(const Vector& z, const Vector& predicted) const {
  Vector d = z - predicted;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    d[i] = wrap_angle(d[i]);
  }
  return d;
}

}  // namespace gmf

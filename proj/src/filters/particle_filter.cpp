#include "gmf/filters/particle_filter.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "gmf/errors.hpp"
#include "gmf/parallel.hpp"
#include "gmf/stats.hpp"

namespace gmf {

ParticleSet pf_init(const Vector& mean, const Matrix& cov, std::size_t count, RngStream& rng) {
  if (count == 0) {
    throw ConfigError("num_samples", "must be at least 1");
  }
  const Matrix factor = cholesky_factor(cov);
  ParticleSet set{Matrix(mean.size(), static_cast<Eigen::Index>(count)),
                  Vector::Constant(static_cast<Eigen::Index>(count), 1.0 / static_cast<double>(count))};
  for (std::size_t i = 0; i < count; ++i) {
    set.particles.col(static_cast<Eigen::Index>(i)) = mvn_sample_factored(mean, factor, rng);
  }
  return set;
}

void pf_propagate(ParticleSet& set, const ScenarioModel& model, double t, double dt, RngStream& rng, int jobs) {
  if (set.particles.rows() != model.state_dim()) {
    throw ShapeError("pf_propagate: particle dimension does not match the model");
  }
  const RngStream step_stream = rng.substream(rng());
  parallel_for(set.size(), jobs, [&](std::size_t i) {
    RngStream local = step_stream.substream(i);
    const auto col = static_cast<Eigen::Index>(i);
    const Vector prior = set.particles.col(col);
    set.particles.col(col) = model.dynamics(prior, t, dt, model.sample_process_noise(dt, local));
    if (!set.particles.col(col).allFinite()) {
      throw NumericalError("pf_propagate: particle " + std::to_string(i) + " became non-finite");
    }
  });
}

void pf_weight(ParticleSet& set, const ScenarioModel& model, const Measurement& measurement, Diagnostics* diag,
               int jobs) {
  if (active_channels(measurement.context, model.meas_dim()).empty()) {
    return;
  }
  std::vector<double> log_w(set.size());
  parallel_for(set.size(), jobs, [&](std::size_t i) {
    const double w = set.weights[static_cast<Eigen::Index>(i)];
    log_w[i] = (w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity()) +
               model.point_log_likelihood(set.particles.col(static_cast<Eigen::Index>(i)), measurement);
  });
  if (!normalize_log_weights<double>(log_w, set.weights)) {
    emit(diag, "pf: all likelihoods underflowed; weights reset to uniform");
  }
}

void pf_resample(ParticleSet& set, RngStream& rng) {
  const auto parents = systematic_resample(set.weights, set.size(), rng);
  Matrix next(set.particles.rows(), set.particles.cols());
  for (std::size_t j = 0; j < parents.size(); ++j) {
    next.col(static_cast<Eigen::Index>(j)) = set.particles.col(static_cast<Eigen::Index>(parents[j]));
  }
  set.particles = std::move(next);
  set.weights.setConstant(1.0 / static_cast<double>(set.size()));
}

bool pf_step(ParticleSet& set, const ScenarioModel& model, double t, double dt, const Measurement& measurement,
             RngStream& rng, double ess_threshold, Diagnostics* diag, int jobs) {
  pf_propagate(set, model, t, dt, rng, jobs);
  pf_weight(set, model, measurement, diag, jobs);
  if (effective_sample_size(set.weights) < ess_threshold * static_cast<double>(set.size())) {
    pf_resample(set, rng);
    return true;
  }
  return false;
}

}  // namespace gmf

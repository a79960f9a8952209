#pragma once

#include "gmf/filters/diagnostics.hpp"
#include "gmf/models/scenario_model.hpp"
#include "gmf/rng.hpp"
#include "gmf/types.hpp"

namespace gmf {

/// Weighted particles, one state per column.
struct ParticleSet {
  Matrix particles;
  Vector weights;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(particles.cols()); }
  [[nodiscard]] Vector mean() const { return particles * weights; }
};

/// N draws from N(mean, cov) with uniform weights.
ParticleSet pf_init(const Vector& mean, const Matrix& cov, std::size_t count, RngStream& rng);

/// Each particle through the dynamics with its own noise draw.
void pf_propagate(ParticleSet& set, const ScenarioModel& model, double t, double dt, RngStream& rng, int jobs = 1);

/// Multiplies weights by the measurement likelihood and renormalizes. Total
/// underflow resets the weights to uniform with a diagnostic.
void pf_weight(ParticleSet& set, const ScenarioModel& model, const Measurement& measurement, Diagnostics* diag,
               int jobs = 1);

/// Systematic resampling with uniform weights afterwards.
void pf_resample(ParticleSet& set, RngStream& rng);

/// One SIR cycle: propagate, weight, then resample when
/// ESS < ess_threshold * N. Returns whether resampling happened.
bool pf_step(ParticleSet& set, const ScenarioModel& model, double t, double dt, const Measurement& measurement,
             RngStream& rng, double ess_threshold = 0.5, Diagnostics* diag = nullptr, int jobs = 1);

}  // namespace gmf

#pragma once

#include <cstddef>

#include "gmf/filters/dbscan.hpp"
#include "gmf/filters/diagnostics.hpp"
#include "gmf/filters/particle_filter.hpp"
#include "gmf/filters/unscented.hpp"
#include "gmf/mixture.hpp"
#include "gmf/models/scenario_model.hpp"
#include "gmf/rng.hpp"

namespace gmf {

/// One Gaussian per cluster: weight = summed particle weight (renormalized over
/// clusters), weighted mean and weighted sample covariance. Noise particles are
/// excluded; singleton clusters get the covariance floor. With no clusters at
/// all, a single Gaussian over every particle is returned and a diagnostic is
/// emitted.
GaussianMixtured fit_cluster_gaussians(const ParticleSet& particles, const ClusterAssignment& assignment,
                                       Diagnostics* diag = nullptr);

/// EKF mean update of each cluster Gaussian. The covariance is kept as the
/// cluster sample covariance unless `covariance_update` is set.
GaussianMixtured pgm_ds_update(const GaussianMixtured& mix, const Measurement& measurement,
                               const ScenarioModel& model, Diagnostics* diag = nullptr,
                               bool covariance_update = false, int jobs = 1);

/// Unscented mean update of each cluster Gaussian; covariance handling as in
/// pgm_ds_update.
GaussianMixtured pgm_du_update(const GaussianMixtured& mix, const Measurement& measurement,
                               const ScenarioModel& model, const UtParams& params, Diagnostics* diag = nullptr,
                               bool covariance_update = false, int jobs = 1);

/// N particles: systematic component selection by weight, one draw from the
/// selected Gaussian each; uniform weights.
ParticleSet pgm_resample(const GaussianMixtured& mix, std::size_t num_particles, RngStream& rng, int jobs = 1);

}  // namespace gmf

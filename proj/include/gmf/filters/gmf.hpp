#pragma once

#include <cstddef>
#include <optional>

#include "gmf/filters/diagnostics.hpp"
#include "gmf/mixture.hpp"
#include "gmf/models/scenario_model.hpp"
#include "gmf/rng.hpp"
#include "gmf/stats.hpp"

namespace gmf {

/// Settings of the Gaussian mixture filter in which every sample carries its
/// own mean, covariance and weight.
struct GmfConfig {
  std::size_t num_samples = 2000;
  double bandwidth_exponent = kDefaultBandwidthExponent;
  Vector initial_mean;
  Matrix initial_cov;
  /// Cap component covariances at the scaled sample covariance after propagation.
  bool mi_bounding = true;
  bool joseph_form = false;
  /// Resample only when ESS < fraction * N. Unset: resample every step.
  std::optional<double> ess_trigger;
  /// Worker threads for the per-component loops (0 = hardware concurrency).
  int jobs = 1;

  /// Throws ConfigError for N < 2, a non-negative exponent or mismatched prior.
  void validate() const;
};

/// Samples N means from N(mu0, P0); every component gets cov h^2 I and weight 1/N.
/// Accepts N = 1 (h = 1) so that the degenerate case can be exercised directly.
GaussianMixtured gmf_init(const GmfConfig& config, RngStream& rng);

/// Pushes every mean through the dynamics with its own process-noise draw
/// and every covariance through F P F^T + G Q G^T. Weights are unchanged.
/// Component i draws from a substream keyed by i, so the result does not
/// depend on `jobs`.
GaussianMixtured gmf_propagate(const GaussianMixtured& mix, const ScenarioModel& model, double t, double dt,
                               RngStream& rng, int jobs = 1);

/// Replaces every covariance that is not Loewner-dominated by the scaled
/// sample covariance of the current means with that matrix. If all means
/// coincide the bound is the covariance floor and a diagnostic is emitted.
/// `bound_out`, when given, receives the bound that was applied.
GaussianMixtured gmf_mi_bound(const GaussianMixtured& mix, const GmfConfig& config, Diagnostics* diag = nullptr,
                              Matrix* bound_out = nullptr);

/// EKF measurement update of every component followed by the likelihood
/// weight update and renormalization.
GaussianMixtured gmf_update(const GaussianMixtured& mix, const Measurement& measurement, const ScenarioModel& model,
                            const GmfConfig& config, Diagnostics* diag = nullptr);

/// Draws N ancestors systematically by weight, samples one point from each
/// selected component, then assigns every new component the scaled sample
/// covariance of the new means and weight 1/N.
GaussianMixtured gmf_resample(const GaussianMixtured& mix, const GmfConfig& config, RngStream& rng,
                              Diagnostics* diag = nullptr);

/// Mixture mean and full covariance.
inline MixtureMoments<double> gmf_estimate(const GaussianMixtured& mix) { return mixture_moments(mix); }

}  // namespace gmf

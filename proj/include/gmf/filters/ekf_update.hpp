#pragma once

#include <span>

#include "gmf/filters/diagnostics.hpp"
#include "gmf/mixture.hpp"
#include "gmf/models/scenario_model.hpp"

namespace gmf {

enum class CovarianceUpdate {
  kNone,      // keep the prior covariance
  kStandard,  // (I - K H) P
  kJoseph,    // (I - K H) P (I - K H)^T + K R K^T
};

/// EKF update of one component in place. Returns the log-likelihood factor
/// for its weight, evaluated at the prior mean. Components with no available
/// channels are left untouched and return 0.
double ekf_update_component(GaussianComponentd& comp, const Measurement& m, const ScenarioModel& model,
                            CovarianceUpdate mode);

/// Multiplies weights by exp(log_likelihoods) in log space and renormalizes.
/// On total underflow the weights are reset to uniform and a diagnostic is
/// emitted.
void reweight_mixture(GaussianMixtured& mix, std::span<const double> log_likelihoods, Diagnostics* diag,
                      const char* who);

}  // namespace gmf

#include "gmf/filters/ekf_update.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gmf/stats.hpp"

namespace gmf {

double ekf_update_component(GaussianComponentd& comp, const Measurement& m, const ScenarioModel& model,
                            CovarianceUpdate mode) {
  const auto lin = linearize_measurement(model, comp.mean, m);
  if (lin.innovation.size() == 0) {
    return 0.0;
  }
  const Matrix ph = comp.cov * lin.jacobian.transpose();
  Matrix s = lin.jacobian * ph + lin.noise;
  s = 0.5 * (s + s.transpose());
  const Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("EKF update: innovation covariance is not positive definite");
  }
  const double log_lik = model.component_log_likelihood(comp.mean, lin.innovation, s, m);
  // K = P H^T S^-1, computed as (S^-1 H P)^T.
  const Matrix gain = llt.solve(ph.transpose()).transpose();
  comp.mean += gain * lin.innovation;

  switch (mode) {
    case CovarianceUpdate::kNone:
      break;
    case CovarianceUpdate::kStandard:
      comp.cov -= gain * ph.transpose();
      break;
    case CovarianceUpdate::kJoseph: {
      const Matrix ikh = Matrix::Identity(comp.cov.rows(), comp.cov.cols()) - gain * lin.jacobian;
      comp.cov = ikh * comp.cov * ikh.transpose() + gain * lin.noise * gain.transpose();
      break;
    }
  }
  comp.cov = 0.5 * (comp.cov + comp.cov.transpose());
  return log_lik;
}

void reweight_mixture(GaussianMixtured& mix, std::span<const double> log_likelihoods, Diagnostics* diag,
                      const char* who) {
  std::vector<double> log_w(mix.size());
  for (std::size_t i = 0; i < mix.size(); ++i) {
    const double w = mix[i].weight;
    log_w[i] = (w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity()) + log_likelihoods[i];
  }
  Vector weights;
  if (!normalize_log_weights<double>(log_w, weights)) {
    emit(diag, std::string(who) + ": all likelihoods underflowed; weights reset to uniform");
  }
  mix.set_weights(weights);
}

}  // namespace gmf

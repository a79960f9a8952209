#include "gmf/filters/gmf.hpp"

#include <string>
#include <vector>

#include "gmf/filters/ekf_update.hpp"
#include "gmf/parallel.hpp"

namespace gmf {
namespace {

/// Scaled sample covariance of the component means, or the covariance floor
/// when the means coincide.
Matrix scaled_mean_covariance(const Matrix& means, std::size_t num_samples, double exponent, Diagnostics* diag,
                              const char* who) {
  Matrix bound = scaled_sample_covariance(means, num_samples, exponent);
  if (!(bound.trace() > 0.0)) {
    emit(diag, std::string(who) + ": all component means coincide; using covariance floor");
    bound = covariance_floor<double>(means.rows());
  }
  return bound;
}

}  // namespace

void GmfConfig::validate() const {
  if (num_samples < 2) {
    throw ConfigError("num_samples", "must be at least 2");
  }
  if (!(bandwidth_exponent < 0.0)) {
    throw ConfigError("gmf.bandwidth_exponent", "must be negative");
  }
  if (initial_mean.size() == 0 || initial_cov.rows() != initial_mean.size() ||
      initial_cov.cols() != initial_mean.size()) {
    throw ConfigError("initial_cov", "must be square and match initial_mean");
  }
  if (ess_trigger && !(*ess_trigger > 0.0 && *ess_trigger <= 1.0)) {
    throw ConfigError("gmf.ess_trigger", "must lie in (0, 1]");
  }
}

GaussianMixtured gmf_init(const GmfConfig& config, RngStream& rng) {
  if (config.num_samples == 0) {
    throw ConfigError("num_samples", "must be at least 1");
  }
  if (!(config.bandwidth_exponent < 0.0)) {
    throw ConfigError("gmf.bandwidth_exponent", "must be negative");
  }
  const Eigen::Index n = config.initial_mean.size();
  if (config.initial_cov.rows() != n || config.initial_cov.cols() != n) {
    throw ConfigError("initial_cov", "must be square and match initial_mean");
  }
  const Matrix factor = cholesky_factor(config.initial_cov);
  const double h = bandwidth(config.num_samples, config.bandwidth_exponent);
  const Matrix cov0 = Matrix::Identity(n, n) * (h * h);
  const double w = 1.0 / static_cast<double>(config.num_samples);

  GaussianMixtured mix;
  mix.reserve(config.num_samples);
  for (std::size_t i = 0; i < config.num_samples; ++i) {
    mix.push_back({mvn_sample_factored(config.initial_mean, factor, rng), cov0, w});
  }
  return mix;
}

GaussianMixtured gmf_propagate(const GaussianMixtured& mix, const ScenarioModel& model, double t, double dt,
                               RngStream& rng, int jobs) {
  if (mix.dim() != model.state_dim()) {
    throw ShapeError("gmf_propagate: mixture dimension does not match the model");
  }
  const RngStream step_stream = rng.substream(rng());
  const Matrix q = model.process_noise(dt);
  GaussianMixtured out = mix;
  parallel_for(mix.size(), jobs, [&](std::size_t i) {
    RngStream local = step_stream.substream(i);
    const auto& prior = mix[i];
    auto& comp = out[i];
    const Vector noise = model.sample_process_noise(dt, local);
    comp.mean = model.dynamics(prior.mean, t, dt, noise);
    const Matrix f = model.dynamics_jacobian(prior.mean, t, dt);
    const Matrix g = model.noise_gain(prior.mean, t, dt);
    comp.cov = f * prior.cov * f.transpose() + g * q * g.transpose();
    comp.cov = 0.5 * (comp.cov + comp.cov.transpose());
    if (!comp.mean.allFinite() || !comp.cov.allFinite()) {
      throw NumericalError("gmf_propagate: component " + std::to_string(i) + " became non-finite");
    }
  });
  return out;
}

GaussianMixtured gmf_mi_bound(const GaussianMixtured& mix, const GmfConfig& config, Diagnostics* diag,
                              Matrix* bound_out) {
  if (mix.size() < 2) {
    throw DegenerateInputError("gmf_mi_bound: need at least 2 components");
  }
  const Matrix bound = scaled_mean_covariance(mix.means(), mix.size(), config.bandwidth_exponent, diag, "gmf_mi_bound");
  GaussianMixtured out = mix;
  parallel_for(out.size(), config.jobs, [&](std::size_t i) {
    if (psd_exceeds(out[i].cov, bound)) {
      out[i].cov = bound;
    }
  });
  if (bound_out != nullptr) {
    *bound_out = bound;
  }
  return out;
}

GaussianMixtured gmf_update(const GaussianMixtured& mix, const Measurement& measurement, const ScenarioModel& model,
                            const GmfConfig& config, Diagnostics* diag) {
  if (active_channels(measurement.context, model.meas_dim()).empty()) {
    return mix;
  }
  const CovarianceUpdate mode = config.joseph_form ? CovarianceUpdate::kJoseph : CovarianceUpdate::kStandard;
  GaussianMixtured out = mix;
  std::vector<double> log_lik(out.size());
  parallel_for(out.size(), config.jobs,
               [&](std::size_t i) { log_lik[i] = ekf_update_component(out[i], measurement, model, mode); });
  reweight_mixture(out, log_lik, diag, "gmf_update");
  return out;
}

GaussianMixtured gmf_resample(const GaussianMixtured& mix, const GmfConfig& config, RngStream& rng,
                              Diagnostics* diag) {
  if (mix.empty()) {
    throw DegenerateInputError("gmf_resample: empty mixture");
  }
  const std::size_t count = config.num_samples;
  const auto parents = systematic_resample(mix.weights(), count, rng);
  const RngStream draw_stream = rng.substream(rng());

  // Ancestors are sorted, so each distinct parent is factored once.
  std::vector<std::size_t> unique_parents;
  std::vector<std::size_t> slot(count);
  for (std::size_t j = 0; j < count; ++j) {
    if (unique_parents.empty() || unique_parents.back() != parents[j]) {
      unique_parents.push_back(parents[j]);
    }
    slot[j] = unique_parents.size() - 1;
  }
  std::vector<Matrix> factors(unique_parents.size());
  parallel_for(unique_parents.size(), config.jobs,
               [&](std::size_t u) { factors[u] = cholesky_factor(mix[unique_parents[u]].cov); });

  Matrix means(mix.dim(), static_cast<Eigen::Index>(count));
  parallel_for(count, config.jobs, [&](std::size_t j) {
    RngStream local = draw_stream.substream(j);
    means.col(static_cast<Eigen::Index>(j)) = mvn_sample_factored(mix[parents[j]].mean, factors[slot[j]], local);
  });

  const Matrix cov = count >= 2 ? scaled_mean_covariance(means, count, config.bandwidth_exponent, diag, "gmf_resample")
                                : covariance_floor<double>(mix.dim());
  const double w = 1.0 / static_cast<double>(count);
  GaussianMixtured out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    out.push_back({means.col(static_cast<Eigen::Index>(j)), cov, w});
  }
  return out;
}

}  // namespace gmf

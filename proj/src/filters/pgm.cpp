#include "gmf/filters/pgm.hpp"

#include <string>
#include <vector>

#include "gmf/filters/ekf_update.hpp"
#include "gmf/parallel.hpp"
#include "gmf/stats.hpp"

namespace gmf {
namespace {

/// Weighted moments of the selected columns. The covariance uses the
/// reliability-weight correction 1 / (1 - sum w^2), which reduces to 1/(n-1)
/// for equal weights.
GaussianComponentd weighted_gaussian(const ParticleSet& set, const std::vector<Eigen::Index>& members) {
  const Eigen::Index dim = set.particles.rows();
  double total = 0.0;
  for (const auto i : members) {
    total += set.weights[i];
  }
  GaussianComponentd comp{Vector::Zero(dim), Matrix::Zero(dim, dim), total};
  if (members.size() < 2 || !(total > 0.0)) {
    for (const auto i : members) {
      comp.mean += set.particles.col(i) / static_cast<double>(members.size());
    }
    comp.cov = covariance_floor<double>(dim);
    return comp;
  }
  double sum_sq = 0.0;
  for (const auto i : members) {
    const double w = set.weights[i] / total;
    comp.mean += w * set.particles.col(i);
    sum_sq += w * w;
  }
  for (const auto i : members) {
    const double w = set.weights[i] / total;
    const Vector d = set.particles.col(i) - comp.mean;
    comp.cov += w * d * d.transpose();
  }
  comp.cov /= (1.0 - sum_sq);
  if (!(comp.cov.trace() > 0.0)) {
    comp.cov = covariance_floor<double>(dim);
  }
  return comp;
}

}  // namespace

GaussianMixtured fit_cluster_gaussians(const ParticleSet& particles, const ClusterAssignment& assignment,
                                       Diagnostics* diag) {
  if (assignment.labels.size() != particles.size()) {
    throw ShapeError("fit_cluster_gaussians: assignment does not match particle count");
  }
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(assignment.num_clusters));
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    const int label = assignment.labels[i];
    if (label != ClusterAssignment::kNoise) {
      members[static_cast<std::size_t>(label)].push_back(static_cast<Eigen::Index>(i));
    }
  }

  GaussianMixtured mix;
  if (members.empty()) {
    emit(diag, "fit_cluster_gaussians: every particle is noise; fitting one global Gaussian");
    std::vector<Eigen::Index> all(particles.size());
    for (std::size_t i = 0; i < all.size(); ++i) {
      all[i] = static_cast<Eigen::Index>(i);
    }
    mix.push_back(weighted_gaussian(particles, all));
    mix[0].weight = 1.0;
    return mix;
  }
  mix.reserve(members.size());
  for (const auto& m : members) {
    mix.push_back(weighted_gaussian(particles, m));
  }
  if (!mix.normalize()) {
    emit(diag, "fit_cluster_gaussians: clusters carry zero weight; using uniform cluster weights");
    for (auto& c : mix) {
      c.weight = 1.0 / static_cast<double>(mix.size());
    }
  }
  return mix;
}

GaussianMixtured pgm_ds_update(const GaussianMixtured& mix, const Measurement& measurement,
                               const ScenarioModel& model, Diagnostics* diag, bool covariance_update, int jobs) {
  if (active_channels(measurement.context, model.meas_dim()).empty()) {
    return mix;
  }
  const CovarianceUpdate mode = covariance_update ? CovarianceUpdate::kStandard : CovarianceUpdate::kNone;
  GaussianMixtured out = mix;
  std::vector<double> log_lik(out.size());
  parallel_for(out.size(), jobs,
               [&](std::size_t i) { log_lik[i] = ekf_update_component(out[i], measurement, model, mode); });
  reweight_mixture(out, log_lik, diag, "pgm_ds_update");
  return out;
}

GaussianMixtured pgm_du_update(const GaussianMixtured& mix, const Measurement& measurement,
                               const ScenarioModel& model, const UtParams& params, Diagnostics* diag,
                               bool covariance_update, int jobs) {
  const auto rows = active_channels(measurement.context, model.meas_dim());
  if (rows.empty()) {
    return mix;
  }
  if (measurement.z.size() != model.meas_dim()) {
    throw ShapeError("pgm_du_update: measurement dimension does not match the model");
  }
  const auto k = static_cast<Eigen::Index>(rows.size());
  const auto select = [&](const Vector& full) {
    Vector v(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      v[r] = full[rows[static_cast<std::size_t>(r)]];
    }
    return v;
  };

  GaussianMixtured out = mix;
  std::vector<double> log_lik(out.size());
  parallel_for(out.size(), jobs, [&](std::size_t c) {
    auto& comp = out[c];
    const SigmaPoints sp = ut_sigma_points(comp.mean, comp.cov, params);
    const Eigen::Index count = sp.points.cols();
    // Sigma-point predictions as wrapped offsets from h(mean), so angular
    // measurements average correctly.
    const Vector reference = model.measure(comp.mean, measurement.context);
    Matrix offsets(k, count);
    for (Eigen::Index i = 0; i < count; ++i) {
      offsets.col(i) = select(model.innovation(model.measure(sp.points.col(i), measurement.context), reference));
    }
    const Vector shift = offsets * sp.mean_weights;
    const Matrix residuals = offsets.colwise() - shift;
    const Matrix deviations = sp.points.colwise() - comp.mean;

    Matrix full_noise = model.measurement_noise(measurement);
    Matrix noise(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) {
        noise(i, j) = full_noise(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(j)]);
      }
    }
    Matrix s = residuals * sp.cov_weights.asDiagonal() * residuals.transpose() + noise;
    s = 0.5 * (s + s.transpose());
    const Matrix cross = deviations * sp.cov_weights.asDiagonal() * residuals.transpose();
    const Vector innovation = select(model.innovation(measurement.z, reference)) - shift;

    const Eigen::LLT<Matrix> llt(s);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("pgm_du_update: innovation covariance of cluster " + std::to_string(c) +
                           " is not positive definite");
    }
    log_lik[c] = model.component_log_likelihood(comp.mean, innovation, s, measurement);
    const Matrix gain = llt.solve(cross.transpose()).transpose();
    comp.mean += gain * innovation;
    if (covariance_update) {
      comp.cov -= gain * s * gain.transpose();
      comp.cov = 0.5 * (comp.cov + comp.cov.transpose());
    }
  });
  reweight_mixture(out, log_lik, diag, "pgm_du_update");
  return out;
}

ParticleSet pgm_resample(const GaussianMixtured& mix, std::size_t num_particles, RngStream& rng, int jobs) {
  if (mix.empty()) {
    throw DegenerateInputError("pgm_resample: empty mixture");
  }
  const auto parents = systematic_resample(mix.weights(), num_particles, rng);
  const RngStream draw_stream = rng.substream(rng());
  std::vector<Matrix> factors(mix.size());
  std::vector<bool> needed(mix.size(), false);
  for (const auto p : parents) {
    needed[p] = true;
  }
  for (std::size_t c = 0; c < mix.size(); ++c) {
    if (needed[c]) {
      factors[c] = cholesky_factor(mix[c].cov);
    }
  }
  ParticleSet set{Matrix(mix.dim(), static_cast<Eigen::Index>(num_particles)),
                  Vector::Constant(static_cast<Eigen::Index>(num_particles), 1.0 / static_cast<double>(num_particles))};
  parallel_for(num_particles, jobs, [&](std::size_t j) {
    RngStream local = draw_stream.substream(j);
    set.particles.col(static_cast<Eigen::Index>(j)) = mvn_sample_factored(mix[parents[j]].mean, factors[parents[j]], local);
  });
  return set;
}

}  // namespace gmf

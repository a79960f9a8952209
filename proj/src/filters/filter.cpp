#include "gmf/filters/filter.hpp"

#include "gmf/filters/gmf.hpp"
#include "gmf/filters/particle_filter.hpp"
#include "gmf/filters/pgm.hpp"
#include "gmf/stats.hpp"

namespace gmf {
namespace {

void recenter(GaussianMixtured& mix, const ScenarioModel& model) {
  const auto angles = model.angular_states();
  if (angles.empty() || mix.empty()) {
    return;
  }
  Matrix means = mix.means();
  recenter_angles(means, mix.weights(), angles);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    mix[i].mean = means.col(static_cast<Eigen::Index>(i));
  }
}

void recenter(ParticleSet& set, const ScenarioModel& model) {
  const auto angles = model.angular_states();
  if (!angles.empty()) {
    recenter_angles(set.particles, set.weights, angles);
  }
}

class GaussianMixtureFilter final : public Filter {
 public:
  GaussianMixtureFilter(GmfConfig config, RngStream rng) : config_(std::move(config)), rng_(rng) {
    config_.validate();
    mix_ = gmf_init(config_, rng_);
  }

  [[nodiscard]] FilterKind kind() const override { return FilterKind::kGmf; }

  void propagate(const ScenarioModel& model, double t, double dt) override {
    mix_ = gmf_propagate(mix_, model, t, dt, rng_, config_.jobs);
    recenter(mix_, model);
    if (config_.mi_bounding) {
      mix_ = gmf_mi_bound(mix_, config_, &diagnostics_);
    }
  }

  void update(const ScenarioModel& model, const Measurement& measurement) override {
    mix_ = gmf_update(mix_, measurement, model, config_, &diagnostics_);
    recenter(mix_, model);
  }

  void resample() override {
    if (config_.ess_trigger &&
        effective_sample_size(mix_.weights()) >= *config_.ess_trigger * static_cast<double>(mix_.size())) {
      return;
    }
    mix_ = gmf_resample(mix_, config_, rng_, &diagnostics_);
  }

  [[nodiscard]] Vector estimate() const override { return gmf_estimate(mix_).mean; }
  [[nodiscard]] std::optional<std::size_t> num_mixtures() const override { return mix_.size(); }
  [[nodiscard]] GaussianMixtured belief() const override { return mix_; }

 private:
  GmfConfig config_;
  RngStream rng_;
  GaussianMixtured mix_;
};

GaussianMixtured particles_as_mixture(const ParticleSet& set) {
  GaussianMixtured mix;
  mix.reserve(set.size());
  const Eigen::Index dim = set.particles.rows();
  for (Eigen::Index i = 0; i < set.particles.cols(); ++i) {
    mix.push_back({set.particles.col(i), Matrix::Zero(dim, dim), set.weights[i]});
  }
  return mix;
}

class SirParticleFilter final : public Filter {
 public:
  SirParticleFilter(const FilterSettings& settings, const Vector& mean, const Matrix& cov, RngStream rng)
      : settings_(settings), rng_(rng), set_(pf_init(mean, cov, settings.num_samples, rng_)) {}

  [[nodiscard]] FilterKind kind() const override { return FilterKind::kPf; }

  void propagate(const ScenarioModel& model, double t, double dt) override {
    pf_propagate(set_, model, t, dt, rng_, settings_.jobs);
    recenter(set_, model);
  }

  void update(const ScenarioModel& model, const Measurement& measurement) override {
    pf_weight(set_, model, measurement, &diagnostics_, settings_.jobs);
  }

  void resample() override {
    if (effective_sample_size(set_.weights) < settings_.pf_ess_threshold * static_cast<double>(set_.size())) {
      pf_resample(set_, rng_);
    }
  }

  [[nodiscard]] Vector estimate() const override { return set_.mean(); }
  [[nodiscard]] std::optional<std::size_t> num_mixtures() const override { return std::nullopt; }
  [[nodiscard]] GaussianMixtured belief() const override { return particles_as_mixture(set_); }

 private:
  FilterSettings settings_;
  RngStream rng_;
  ParticleSet set_;
};

/// Particles clustered into Gaussians before every update and resampled
/// from the updated mixture afterwards.
class PgmFilter final : public Filter {
 public:
  PgmFilter(FilterKind kind, const FilterSettings& settings, const Vector& mean, const Matrix& cov, RngStream rng)
      : kind_(kind), settings_(settings), rng_(rng), set_(pf_init(mean, cov, settings.num_samples, rng_)) {
    if (!(settings_.eps > 0.0)) {
      throw ConfigError("pgm.eps", "must be positive");
    }
    if (settings_.min_pts < 1) {
      throw ConfigError("pgm.min_pts", "must be at least 1");
    }
    if (kind_ == FilterKind::kPgmDu) {
      try {
        settings_.ut.validate(mean.size());
      } catch (const DomainError& e) {
        throw ConfigError("ut", e.what());
      }
    }
  }

  [[nodiscard]] FilterKind kind() const override { return kind_; }

  void propagate(const ScenarioModel& model, double t, double dt) override {
    pf_propagate(set_, model, t, dt, rng_, settings_.jobs);
    recenter(set_, model);
  }

  void update(const ScenarioModel& model, const Measurement& measurement) override {
    const auto clusters = dbscan(set_.particles, settings_.eps, settings_.min_pts);
    mix_ = fit_cluster_gaussians(set_, clusters, &diagnostics_);
    if (kind_ == FilterKind::kPgmDs) {
      mix_ = pgm_ds_update(mix_, measurement, model, &diagnostics_, settings_.pgm_covariance_update, settings_.jobs);
    } else {
      mix_ = pgm_du_update(mix_, measurement, model, settings_.ut, &diagnostics_, settings_.pgm_covariance_update,
                           settings_.jobs);
    }
  }

  void resample() override {
    if (!mix_.empty()) {
      set_ = pgm_resample(mix_, settings_.num_samples, rng_, settings_.jobs);
    }
  }

  [[nodiscard]] Vector estimate() const override { return set_.mean(); }
  [[nodiscard]] std::optional<std::size_t> num_mixtures() const override { return mix_.size(); }
  [[nodiscard]] GaussianMixtured belief() const override { return mix_.empty() ? particles_as_mixture(set_) : mix_; }

 private:
  FilterKind kind_;
  FilterSettings settings_;
  RngStream rng_;
  ParticleSet set_;
  GaussianMixtured mix_;
};

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::kGmf:
      return "gmf";
    case FilterKind::kPf:
      return "pf";
    case FilterKind::kPgmDs:
      return "pgm-ds";
    case FilterKind::kPgmDu:
      return "pgm-du";
  }
  return "unknown";
}

std::optional<FilterKind> parse_filter_kind(std::string_view name) {
  for (const auto kind : {FilterKind::kGmf, FilterKind::kPf, FilterKind::kPgmDs, FilterKind::kPgmDu}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  return std::nullopt;
}

std::unique_ptr<Filter> make_filter(FilterKind kind, const FilterSettings& settings, const Vector& prior_mean,
                                    const Matrix& prior_cov, RngStream rng) {
  if (prior_cov.rows() != prior_mean.size() || prior_cov.cols() != prior_mean.size()) {
    throw ConfigError("initial_cov", "must be square and match initial_mean");
  }
  switch (kind) {
    case FilterKind::kGmf: {
      GmfConfig config;
      config.num_samples = settings.num_samples;
      config.bandwidth_exponent = settings.bandwidth_exponent;
      config.initial_mean = prior_mean;
      config.initial_cov = prior_cov;
      config.mi_bounding = settings.mi_bounding;
      config.joseph_form = settings.joseph_form;
      config.ess_trigger = settings.gmf_ess_trigger;
      config.jobs = settings.jobs;
      return std::make_unique<GaussianMixtureFilter>(std::move(config), rng);
    }
    case FilterKind::kPf:
      return std::make_unique<SirParticleFilter>(settings, prior_mean, prior_cov, rng);
    case FilterKind::kPgmDs:
    case FilterKind::kPgmDu:
      return std::make_unique<PgmFilter>(kind, settings, prior_mean, prior_cov, rng);
  }
  throw ConfigError("filters", "unknown filter kind");
}

}  // namespace gmf

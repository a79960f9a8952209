#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "gmf/filters/diagnostics.hpp"
#include "gmf/filters/unscented.hpp"
#include "gmf/mixture.hpp"
#include "gmf/models/scenario_model.hpp"
#include "gmf/rng.hpp"

namespace gmf {

enum class FilterKind { kGmf, kPf, kPgmDs, kPgmDu };

/// "gmf", "pf", "pgm-ds", "pgm-du".
std::string_view to_string(FilterKind kind);
std::optional<FilterKind> parse_filter_kind(std::string_view name);

/// Settings for every filter kind; each filter reads the fields it uses.
struct FilterSettings {
  std::size_t num_samples = 2000;
  int jobs = 1;

  // Gaussian mixture filter
  double bandwidth_exponent = -0.2;
  bool mi_bounding = true;
  bool joseph_form = false;
  std::optional<double> gmf_ess_trigger;

  // SIR particle filter
  double pf_ess_threshold = 0.5;

  // PGM filters
  int min_pts = 8;
  double eps = 5.0;
  bool pgm_covariance_update = false;
  UtParams ut{0.01, 2.0, 0.0};
};

/// Uniform propagate / update / resample interface over all filters.
class Filter {
 public:
  virtual ~Filter() = default;

  [[nodiscard]] virtual FilterKind kind() const = 0;

  virtual void propagate(const ScenarioModel& model, double t, double dt) = 0;
  virtual void update(const ScenarioModel& model, const Measurement& measurement) = 0;
  virtual void resample() = 0;

  /// propagate, then update and resample when any measurement channel is
  /// available. A step without measurements is prediction only.
  void step(const ScenarioModel& model, double t, double dt, const Measurement& measurement) {
    if (dt > 0.0) {
      propagate(model, t, dt);
    }
    if (!active_channels(measurement.context, model.meas_dim()).empty()) {
      update(model, measurement);
      resample();
    }
  }

  /// Mean of the current belief.
  [[nodiscard]] virtual Vector estimate() const = 0;
  /// Number of Gaussian components; empty for the particle filter.
  [[nodiscard]] virtual std::optional<std::size_t> num_mixtures() const = 0;
  /// Current belief as a mixture (particles become zero-covariance components).
  [[nodiscard]] virtual GaussianMixtured belief() const = 0;

  [[nodiscard]] const Diagnostics& diagnostics() const noexcept { return diagnostics_; }

 protected:
  Diagnostics diagnostics_;
};

/// Builds and initializes a filter from the prior N(mean, cov). The filter
/// owns `rng` and derives every random draw from it.
std::unique_ptr<Filter> make_filter(FilterKind kind, const FilterSettings& settings, const Vector& prior_mean,
                                    const Matrix& prior_cov, RngStream rng);

}  // namespace gmf

#include "gmf/harness/runner.hpp"

#include <chrono>
#include <exception>

#include "gmf/errors.hpp"
#include "gmf/parallel.hpp"

namespace gmf {
namespace {

constexpr std::uint64_t kScenarioStreamKey = 1;
constexpr std::uint64_t kFilterStreamKey = 2;

}  // namespace

RngStream scenario_stream(std::uint64_t seed) { return RngStream(seed).substream(kScenarioStreamKey); }

RngStream filter_stream(std::uint64_t seed) { return RngStream(seed).substream(kFilterStreamKey); }

RunReport run_filter(Filter& filter, const ScenarioModel& model, const TrialData& data,
                     const SnapshotOptions& snapshots, const StepObserver& observer) {
  const std::size_t n = data.measurements.size();
  if (n == 0) {
    throw DegenerateInputError("run_filter: no measurements");
  }
  if (data.times.size() != n || data.dts.size() != n || data.truth.size() != n) {
    throw ShapeError("run_filter: trial traces differ in length");
  }
  std::vector<Vector> estimates;
  std::vector<double> timings;
  std::vector<std::optional<std::size_t>> mixtures;
  estimates.reserve(n);
  timings.reserve(n);
  mixtures.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto start = std::chrono::steady_clock::now();
    filter.step(model, data.times[k] - data.dts[k], data.dts[k], data.measurements[k]);
    const auto stop = std::chrono::steady_clock::now();
    timings.push_back(std::chrono::duration<double>(stop - start).count());
    estimates.push_back(filter.estimate());
    mixtures.push_back(filter.num_mixtures());
    if (observer) {
      observer(k, filter);
    }
    if (snapshots.due(k, n)) {
      snapshots.sink(k, filter.belief());
    }
  }
  RunReport report = compute_metrics(data.truth, estimates, data.times, timings, mixtures);
  report.measurement_hash = measurement_hash(data.measurements);
  report.diagnostics = filter.diagnostics().events.size();
  return report;
}

RunReport run_trial(FilterKind kind, const FilterSettings& settings, const ScenarioModel& model,
                    const TrialData& data, RngStream rng, const SnapshotOptions& snapshots,
                    const StepObserver& observer) {
  auto filter = make_filter(kind, settings, data.prior_mean, data.prior_cov, rng);
  return run_filter(*filter, model, data, snapshots, observer);
}

McSummary run_mc(const Scenario& scenario, FilterKind kind, const FilterSettings& settings, std::size_t num_runs,
                 std::uint64_t base_seed, int jobs) {
  if (num_runs < 1) {
    throw ConfigError("runs", "must be at least 1");
  }
  McSummary summary;
  summary.scenario = scenario.name();
  summary.filter = std::string(to_string(kind));
  summary.base_seed = base_seed;
  summary.runs.resize(num_runs);
  summary.seeds.resize(num_runs);

  const bool concurrent_runs = num_runs > 1 && resolve_jobs(jobs) > 1;
  FilterSettings run_settings = settings;
  if (concurrent_runs) {
    run_settings.jobs = 1;
  }
  parallel_for(num_runs, concurrent_runs ? jobs : 1, [&](std::size_t i) {
    const std::uint64_t seed = run_seed(base_seed, i);
    summary.seeds[i] = seed;
    RunReport report;
    try {
      RngStream noise = scenario_stream(seed);
      const TrialData data = scenario.generate(noise);
      report = run_trial(kind, run_settings, scenario.model(), data, filter_stream(seed));
    } catch (const std::exception& e) {
      report = RunReport{};
      report.error = e.what();
    }
    report.seed = seed;
    summary.runs[i] = std::move(report);
  });
  summary.aggregate();
  return summary;
}

RunReport replay(const std::vector<MeasurementRecord>& records, FilterKind kind, const FilterSettings& settings,
                 const RadioModel& model, const Vector& prior_mean, const Matrix& prior_cov,
                 const std::optional<Eigen::Vector2d>& source, RngStream rng, const SnapshotOptions& snapshots) {
  const TrialData data = radio_trial(records, prior_mean, prior_cov, source);
  return run_trial(kind, settings, model, data, rng, snapshots);
}

}  // namespace gmf

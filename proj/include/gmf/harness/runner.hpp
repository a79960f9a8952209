#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gmf/filters/filter.hpp"
#include "gmf/harness/metrics.hpp"
#include "gmf/harness/radio_log.hpp"
#include "gmf/harness/scenario.hpp"
#include "gmf/rng.hpp"

namespace gmf {

/// Receives the filter belief after step `step` (0-based).
using SnapshotSink = std::function<void(std::size_t step, const GaussianMixtured& belief)>;

/// Snapshot cadence: after every `every`-th step and after the final step.
/// `every == 0` disables snapshots.
struct SnapshotOptions {
  std::size_t every = 0;
  SnapshotSink sink;

  [[nodiscard]] bool due(std::size_t step, std::size_t total) const {
    return every > 0 && sink && ((step + 1) % every == 0 || step + 1 == total);
  }
};

/// Observer invoked after each step, for checks that need the live filter.
using StepObserver = std::function<void(std::size_t step, const Filter& filter)>;

/// Seed of run `index` in a batch.
constexpr std::uint64_t run_seed(std::uint64_t base_seed, std::uint64_t index) noexcept { return base_seed ^ index; }

/// Scenario noise and filter randomness come from disjoint substreams of the
/// run seed, so swapping the filter never changes the measurements.
RngStream scenario_stream(std::uint64_t seed);
RngStream filter_stream(std::uint64_t seed);

/// Feeds `data` through `filter`, timing only the filter step.
RunReport run_filter(Filter& filter, const ScenarioModel& model, const TrialData& data,
                     const SnapshotOptions& snapshots = {}, const StepObserver& observer = {});

/// Builds the filter from the trial prior and runs it.
RunReport run_trial(FilterKind kind, const FilterSettings& settings, const ScenarioModel& model,
                    const TrialData& data, RngStream rng, const SnapshotOptions& snapshots = {},
                    const StepObserver& observer = {});

/// Independent Monte Carlo runs; run i uses seed base_seed ^ i. Failures are
/// recorded on the run without aborting the batch. With jobs > 1 the runs
/// execute concurrently and each filter runs single-threaded.
McSummary run_mc(const Scenario& scenario, FilterKind kind, const FilterSettings& settings, std::size_t num_runs,
                 std::uint64_t base_seed, int jobs = 1);

/// Replays a measurement log through a radio filter. `source` is the true
/// source position when known. The filter randomness comes from `rng`.
RunReport replay(const std::vector<MeasurementRecord>& records, FilterKind kind, const FilterSettings& settings,
                 const RadioModel& model, const Vector& prior_mean, const Matrix& prior_cov,
                 const std::optional<Eigen::Vector2d>& source, RngStream rng, const SnapshotOptions& snapshots = {});

}  // namespace gmf

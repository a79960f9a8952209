#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gmf/types.hpp"

namespace gmf {

/// One filter step as persisted in the per-step trace CSV.
struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;
  double err = 0.0;        // position error norm [m]
  double iter_time = 0.0;  // filter wall time [s]
  std::optional<double> num_mixtures;
};

struct RunReport {
  double terminate_rmse = 0.0;
  double armse = 0.0;
  double avg_iteration_time = 0.0;
  double median_iteration_time = 0.0;
  std::optional<double> avg_num_mixtures;
  std::vector<StepRecord> trace;

  // Provenance, filled by the runners.
  std::uint64_t seed = 0;
  std::uint64_t measurement_hash = 0;
  std::size_t diagnostics = 0;
  /// Set when the run failed; metric fields are then meaningless.
  std::optional<std::string> error;
};

/// Position metrics from truth/estimate traces (the first two state entries
/// are the planar position) plus timing and mixture-count averages.
RunReport compute_metrics(const std::vector<Vector>& truth, const std::vector<Vector>& estimate,
                          const std::vector<double>& times, const std::vector<double>& step_timings,
                          const std::vector<std::optional<std::size_t>>& mixture_counts);

/// Recomputes the summary fields of a report from its trace alone.
RunReport report_from_trace(std::vector<StepRecord> trace);

struct MetricStats {
  double mean = 0.0;
  double median = 0.0;
  double std = 0.0;
  std::size_t count = 0;
};

MetricStats describe(std::vector<double> values);

/// Per-run reports of one filter on one scenario plus aggregates over the
/// successful runs.
struct McSummary {
  std::string scenario;
  std::string filter;
  std::uint64_t base_seed = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<RunReport> runs;

  MetricStats terminate_rmse;
  MetricStats armse;
  MetricStats avg_iteration_time;
  std::optional<MetricStats> avg_num_mixtures;
  std::size_t failed_runs = 0;

  /// Recomputes the aggregates from `runs`.
  void aggregate();
};

}  // namespace gmf

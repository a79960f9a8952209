#include "gmf/harness/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gmf/errors.hpp"

namespace gmf {

RunReport compute_metrics(const std::vector<Vector>& truth, const std::vector<Vector>& estimate,
                          const std::vector<double>& times, const std::vector<double>& step_timings,
                          const std::vector<std::optional<std::size_t>>& mixture_counts) {
  const std::size_t n = truth.size();
  if (n == 0) {
    throw ShapeError("compute_metrics: traces must contain at least one step");
  }
  if (estimate.size() != n || times.size() != n || step_timings.size() != n || mixture_counts.size() != n) {
    throw ShapeError("compute_metrics: trace lengths differ");
  }
  std::vector<StepRecord> trace(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (truth[k].size() < 2 || estimate[k].size() < 2) {
      throw ShapeError("compute_metrics: states need a planar position");
    }
    trace[k].step = k;
    trace[k].t = times[k];
    trace[k].err = (truth[k].head<2>() - estimate[k].head<2>()).norm();
    trace[k].iter_time = step_timings[k];
    if (mixture_counts[k]) {
      trace[k].num_mixtures = static_cast<double>(*mixture_counts[k]);
    }
  }
  return report_from_trace(std::move(trace));
}

RunReport report_from_trace(std::vector<StepRecord> trace) {
  if (trace.empty()) {
    throw ShapeError("report_from_trace: empty trace");
  }
  RunReport report;
  const auto n = static_cast<double>(trace.size());
  double err_sum = 0.0;
  double time_sum = 0.0;
  double mix_sum = 0.0;
  bool has_mixtures = true;
  std::vector<double> timings;
  timings.reserve(trace.size());
  for (const auto& s : trace) {
    err_sum += s.err;
    time_sum += s.iter_time;
    timings.push_back(s.iter_time);
    if (s.num_mixtures) {
      mix_sum += *s.num_mixtures;
    } else {
      has_mixtures = false;
    }
  }
  report.terminate_rmse = trace.back().err;
  report.armse = err_sum / n;
  report.avg_iteration_time = time_sum / n;
  report.median_iteration_time = describe(std::move(timings)).median;
  if (has_mixtures) {
    report.avg_num_mixtures = mix_sum / n;
  }
  report.trace = std::move(trace);
  return report;
}

MetricStats describe(std::vector<double> values) {
  MetricStats stats;
  stats.count = values.size();
  if (values.empty()) {
    stats.mean = stats.median = stats.std = std::nan("");
    return stats;
  }
  const double n = static_cast<double>(values.size());
  stats.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) {
    ss += (v - stats.mean) * (v - stats.mean);
  }
  stats.std = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  stats.median = values.size() % 2 == 1 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
  return stats;
}

void McSummary::aggregate() {
  std::vector<double> term;
  std::vector<double> avg;
  std::vector<double> timing;
  std::vector<double> mixtures;
  bool has_mixtures = true;
  failed_runs = 0;
  for (const auto& r : runs) {
    if (r.error) {
      ++failed_runs;
      continue;
    }
    term.push_back(r.terminate_rmse);
    avg.push_back(r.armse);
    timing.push_back(r.avg_iteration_time);
    if (r.avg_num_mixtures) {
      mixtures.push_back(*r.avg_num_mixtures);
    } else {
      has_mixtures = false;
    }
  }
  terminate_rmse = describe(term);
  armse = describe(avg);
  avg_iteration_time = describe(timing);
  if (has_mixtures && !mixtures.empty()) {
    avg_num_mixtures = describe(mixtures);
  } else {
    avg_num_mixtures.reset();
  }
}

}  // namespace gmf

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmf/harness/metrics.hpp"

namespace gmf {

/// Field names follow the struct members. Non-finite values become null.
/// Timing fields all contain "iteration_time" in their key so determinism
/// checks can strip them.
nlohmann::json to_json(const RunReport& report, bool include_trace = false);
nlohmann::json to_json(const MetricStats& stats);
nlohmann::json to_json(const McSummary& summary);

/// Per-step trace as CSV: `step,t,err,iter_time,num_mixtures`. A missing
/// mixture count is an empty field.
void write_trace_csv(std::ostream& out, const std::vector<StepRecord>& trace);
void write_trace_csv(const std::string& path, const std::vector<StepRecord>& trace);
std::vector<StepRecord> read_trace_csv(std::istream& in);

/// Drops every key containing "iteration_time" and every "iter_time" key,
/// recursively.
nlohmann::json without_timing(nlohmann::json doc);

void write_json(const std::string& path, const nlohmann::json& doc);

}  // namespace gmf

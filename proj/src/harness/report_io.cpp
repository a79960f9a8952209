#include "gmf/harness/report_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "gmf/errors.hpp"
#include "gmf/format.hpp"

namespace gmf {
namespace {

nlohmann::json number(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const RunReport& report, bool include_trace) {
  nlohmann::json doc;
  doc["seed"] = report.seed;
  doc["measurement_hash"] = report.measurement_hash;
  if (report.error) {
    doc["error"] = *report.error;
    return doc;
  }
  doc["terminate_rmse"] = number(report.terminate_rmse);
  doc["armse"] = number(report.armse);
  doc["avg_iteration_time"] = number(report.avg_iteration_time);
  doc["median_iteration_time"] = number(report.median_iteration_time);
  doc["avg_num_mixtures"] = report.avg_num_mixtures ? number(*report.avg_num_mixtures) : nlohmann::json(nullptr);
  doc["steps"] = report.trace.size();
  doc["diagnostics"] = report.diagnostics;
  if (include_trace) {
    auto& rows = doc["trace"] = nlohmann::json::array();
    for (const auto& s : report.trace) {
      rows.push_back({{"step", s.step},
                      {"t", number(s.t)},
                      {"err", number(s.err)},
                      {"iter_time", number(s.iter_time)},
                      {"num_mixtures", s.num_mixtures ? number(*s.num_mixtures) : nlohmann::json(nullptr)}});
    }
  }
  return doc;
}

nlohmann::json to_json(const MetricStats& stats) {
  return {{"mean", number(stats.mean)}, {"median", number(stats.median)}, {"std", number(stats.std)},
          {"count", stats.count}};
}

nlohmann::json to_json(const McSummary& summary) {
  nlohmann::json doc;
  doc["scenario"] = summary.scenario;
  doc["filter"] = summary.filter;
  doc["base_seed"] = summary.base_seed;
  doc["seeds"] = summary.seeds;
  doc["failed_runs"] = summary.failed_runs;
  doc["aggregate"] = {{"terminate_rmse", to_json(summary.terminate_rmse)},
                      {"armse", to_json(summary.armse)},
                      {"avg_iteration_time", to_json(summary.avg_iteration_time)},
                      {"avg_num_mixtures",
                       summary.avg_num_mixtures ? to_json(*summary.avg_num_mixtures) : nlohmann::json(nullptr)}};
  auto& runs = doc["runs"] = nlohmann::json::array();
  for (const auto& r : summary.runs) {
    runs.push_back(to_json(r));
  }
  return doc;
}

void write_trace_csv(std::ostream& out, const std::vector<StepRecord>& trace) {
  out << "step,t,err,iter_time,num_mixtures\n";
  for (const auto& s : trace) {
    out << s.step << ',' << format_double(s.t) << ',' << format_double(s.err) << ',' << format_double(s.iter_time)
        << ',';
    if (s.num_mixtures) {
      out << format_double(*s.num_mixtures);
    }
    out << '\n';
  }
}

void write_trace_csv(const std::string& path, const std::vector<StepRecord>& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_trace_csv(out, trace);
}

std::vector<StepRecord> read_trace_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<StepRecord> trace;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1) {
      if (line != "step,t,err,iter_time,num_mixtures") {
        throw IngestError(line_no, "unexpected trace header");
      }
      continue;
    }
    if (line.empty()) {
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      f.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    if (f.size() != 5) {
      throw IngestError(line_no, "expected 5 fields");
    }
    StepRecord s;
    s.step = static_cast<std::size_t>(parse_double(f[0], line_no));
    s.t = parse_double(f[1], line_no);
    s.err = parse_double(f[2], line_no);
    s.iter_time = parse_double(f[3], line_no);
    if (!f[4].empty()) {
      s.num_mixtures = parse_double(f[4], line_no);
    }
    trace.push_back(s);
  }
  return trace;
}

nlohmann::json without_timing(nlohmann::json doc) {
  if (doc.is_object()) {
    nlohmann::json out = nlohmann::json::object();
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      if (it.key().find("iteration_time") != std::string::npos || it.key() == "iter_time") {
        continue;
      }
      out[it.key()] = without_timing(it.value());
    }
    return out;
  }
  if (doc.is_array()) {
    for (auto& v : doc) {
      v = without_timing(v);
    }
  }
  return doc;
}

void write_json(const std::string& path, const nlohmann::json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << doc.dump(2) << '\n';
}

}  // namespace gmf

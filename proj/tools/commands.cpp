#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "config.hpp"
#include "gmf/errors.hpp"
#include "gmf/harness/report_io.hpp"
#include "gmf/harness/runner.hpp"
#include "gmf/parallel.hpp"

namespace gmf::cli {
namespace {

namespace fs = std::filesystem;

/// Usage problems that are not tied to a config key.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig resolve(const CommandOptions& options) {
  ExperimentConfig config = load_config(options.config);
  if (options.seed) {
    config.seed = *options.seed;
  }
  if (options.runs) {
    config.runs = *options.runs;
  }
  if (options.jobs) {
    config.jobs = *options.jobs;
  }
  if (options.out) {
    config.output_dir = *options.out;
  }
  validate(config);
  return config;
}

void prepare_output(const fs::path& dir, bool overwrite) {
  if (fs::exists(dir)) {
    if (!fs::is_directory(dir)) {
      throw UsageError("output path " + dir.string() + " exists and is not a directory");
    }
    if (!fs::is_empty(dir) && !overwrite) {
      throw UsageError("output directory " + dir.string() + " is not empty; pass --overwrite to reuse it");
    }
  }
  fs::create_directories(dir);
}

std::string format_metric(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

void print_summary(std::ostream& out, const McSummary& s) {
  out << s.scenario << ' ' << s.filter << ": terminate_rmse median " << format_metric(s.terminate_rmse.median)
      << " m, armse median " << format_metric(s.armse.median) << " m, iteration "
      << format_metric(s.avg_iteration_time.mean * 1e3) << " ms";
  if (s.failed_runs > 0) {
    out << ", " << s.failed_runs << " failed";
  }
  out << '\n';
}

/// Runs `body` and maps exceptions onto exit codes.
int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const IngestError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

SnapshotOptions snapshot_writer(const fs::path& dir, std::size_t every, const std::string& stem) {
  if (every == 0) {
    return {};
  }
  fs::create_directories(dir);
  return {every, [dir, stem](std::size_t step, const GaussianMixtured& belief) {
            const auto base = dir / (stem + "_step" + std::to_string(step));
            std::ofstream csv(base.string() + ".csv", std::ios::binary);
            std::ofstream bin(base.string() + ".bin", std::ios::binary);
            if (!csv || !bin) {
              throw std::runtime_error("cannot write snapshot " + base.string());
            }
            write_mixture_csv(csv, belief);
            write_mixture_binary(bin, belief);
          }};
}

RadioModel radio_model(const ExperimentConfig& config) { return RadioModel(config.radio.params); }

std::string log_name(const RadioMission& mission, std::size_t run) {
  return "radio_" + mission.name + "_run" + std::to_string(run) + ".csv";
}

/// Mean of the per-mission metrics of one run; failed if any mission failed.
RunReport mission_average(const std::vector<const RunReport*>& reports, std::uint64_t seed) {
  RunReport avg;
  avg.seed = seed;
  bool mixtures = true;
  double mix = 0.0;
  for (const auto* r : reports) {
    if (r->error) {
      avg.error = r->error;
      return avg;
    }
    avg.terminate_rmse += r->terminate_rmse;
    avg.armse += r->armse;
    avg.avg_iteration_time += r->avg_iteration_time;
    avg.median_iteration_time += r->median_iteration_time;
    if (r->avg_num_mixtures) {
      mix += *r->avg_num_mixtures;
    } else {
      mixtures = false;
    }
  }
  const auto n = static_cast<double>(reports.size());
  avg.terminate_rmse /= n;
  avg.armse /= n;
  avg.avg_iteration_time /= n;
  avg.median_iteration_time /= n;
  if (mixtures) {
    avg.avg_num_mixtures = mix / n;
  }
  return avg;
}

}  // namespace

int cmd_bench_tricyclist(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig config = resolve(options);
    prepare_output(config.output_dir, options.overwrite);
    const TricyclistScenario scenario(config.tricyclist);
    FilterSettings settings = config.settings;
    settings.jobs = config.jobs;
    const auto traces = config.output_dir / "traces";
    fs::create_directories(traces);
    for (const auto kind : config.filters) {
      const McSummary summary = run_mc(scenario, kind, settings, config.runs, config.seed, config.jobs);
      const std::string name(to_string(kind));
      write_json((config.output_dir / ("tricyclist_" + name + "_summary.json")).string(), to_json(summary));
      for (std::size_t r = 0; r < summary.runs.size(); ++r) {
        write_trace_csv((traces / ("tricyclist_" + name + "_run" + std::to_string(r) + ".csv")).string(),
                        summary.runs[r].trace);
      }
      print_summary(out, summary);
    }
  });
}

int cmd_sim_radio(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig config = resolve(options);
    if (!config.radio.grid) {
      throw ConfigError("radio.grid", "required for sim-radio");
    }
    if (config.radio.missions.empty()) {
      throw ConfigError("radio.missions", "at least one mission is required for sim-radio");
    }
    prepare_output(config.output_dir, options.overwrite);
    const auto& missions = config.radio.missions;
    const std::size_t tasks = config.runs * missions.size();

    // Logs first: they depend only on the seed, never on the filters.
    const auto logs_dir = config.output_dir / "logs";
    fs::create_directories(logs_dir);
    std::vector<std::vector<MeasurementRecord>> logs(tasks);
    for (std::size_t r = 0; r < config.runs; ++r) {
      RngStream noise = scenario_stream(run_seed(config.seed, r));
      for (std::size_t m = 0; m < missions.size(); ++m) {
        RngStream stream = noise.substream(m);
        auto& log = logs[r * missions.size() + m];
        log = generate_radio_log(*config.radio.grid, missions[m].source, missions[m].trajectory,
                                 config.radio.params, stream);
        write_measurement_log((logs_dir / log_name(missions[m], r)).string(), log);
      }
    }
    out << "wrote " << tasks << " measurement log(s) to " << logs_dir.string() << '\n';
    if (options.log_only) {
      return;
    }

    const RadioModel model = radio_model(config);
    const bool concurrent = tasks > 1 && resolve_jobs(config.jobs) > 1;
    FilterSettings settings = config.settings;
    settings.jobs = concurrent ? 1 : config.jobs;
    const auto traces = config.output_dir / "traces";
    const auto snapshots = config.output_dir / "snapshots";
    fs::create_directories(traces);

    for (const auto kind : config.filters) {
      const std::string name(to_string(kind));
      std::vector<RunReport> reports(tasks);
      parallel_for(tasks, concurrent ? config.jobs : 1, [&](std::size_t task) {
        const std::size_t r = task / missions.size();
        const std::size_t m = task % missions.size();
        const std::uint64_t seed = run_seed(config.seed, r);
        const std::string stem = "radio_" + name + "_" + missions[m].name + "_run" + std::to_string(r);
        RunReport report;
        try {
          report = replay(logs[task], kind, settings, model, config.radio.prior_mean, config.radio.prior_cov,
                          missions[m].source, filter_stream(seed).substream(m),
                          snapshot_writer(snapshots, config.snapshot_every, stem));
          write_trace_csv((traces / (stem + ".csv")).string(), report.trace);
        } catch (const std::exception& e) {
          report = RunReport{};
          report.error = e.what();
        }
        report.seed = seed;
        reports[task] = std::move(report);
      });

      nlohmann::json doc;
      doc["scenario"] = "radio";
      doc["filter"] = name;
      doc["base_seed"] = config.seed;
      auto& per_mission = doc["missions"] = nlohmann::json::object();
      McSummary averaged;
      averaged.scenario = "radio:averaged";
      averaged.filter = name;
      averaged.base_seed = config.seed;
      for (std::size_t m = 0; m < missions.size(); ++m) {
        McSummary summary;
        summary.scenario = "radio:" + missions[m].name;
        summary.filter = name;
        summary.base_seed = config.seed;
        for (std::size_t r = 0; r < config.runs; ++r) {
          summary.seeds.push_back(run_seed(config.seed, r));
          summary.runs.push_back(reports[r * missions.size() + m]);
        }
        summary.aggregate();
        auto entry = to_json(summary);
        entry["source"] = {missions[m].source.x(), missions[m].source.y()};
        per_mission[missions[m].name] = std::move(entry);
        print_summary(out, summary);
      }
      for (std::size_t r = 0; r < config.runs; ++r) {
        std::vector<const RunReport*> row;
        for (std::size_t m = 0; m < missions.size(); ++m) {
          row.push_back(&reports[r * missions.size() + m]);
        }
        averaged.seeds.push_back(run_seed(config.seed, r));
        averaged.runs.push_back(mission_average(row, run_seed(config.seed, r)));
      }
      averaged.aggregate();
      doc["averaged"] = to_json(averaged);
      write_json((config.output_dir / ("radio_" + name + "_summary.json")).string(), doc);
    }
  });
}

int cmd_replay(const CommandOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const ExperimentConfig config = resolve(options);
    if (config.scenario != "radio") {
      throw ConfigError("scenario", "replay needs a radio config");
    }
    if (!fs::is_regular_file(options.log)) {
      throw UsageError("cannot open log " + options.log.string());
    }
    const auto records = read_measurement_log(options.log.string());
    if (records.empty()) {
      throw IngestError(1, "log has no records");
    }
    prepare_output(config.output_dir, options.overwrite);
    const RadioModel model = radio_model(config);
    const std::uint64_t seed = run_seed(config.seed, 0);
    const auto traces = config.output_dir / "traces";
    fs::create_directories(traces);
    for (const auto kind : config.filters) {
      const std::string name(to_string(kind));
      FilterSettings settings = config.settings;
      settings.jobs = config.jobs;
      RunReport report = replay(records, kind, settings, model, config.radio.prior_mean, config.radio.prior_cov,
                                config.radio.replay_source, filter_stream(seed).substream(0),
                                snapshot_writer(config.output_dir / "snapshots", config.snapshot_every,
                                                "replay_" + name));
      report.seed = seed;
      write_trace_csv((traces / ("replay_" + name + ".csv")).string(), report.trace);
      nlohmann::json doc;
      doc["filter"] = name;
      doc["log"] = options.log.filename().string();
      doc["records"] = records.size();
      doc["source_known"] = config.radio.replay_source.has_value();
      doc["report"] = to_json(report);
      write_json((config.output_dir / ("replay_" + name + "_report.json")).string(), doc);
      out << "replay " << name << ": " << report.trace.size() << " steps";
      if (config.radio.replay_source) {
        out << ", final error " << format_metric(report.terminate_rmse) << " m, armse "
            << format_metric(report.armse) << " m";
      }
      out << '\n';
    }
  });
}

}  // namespace gmf::cli

// Acceptance run: prints one PASS/FAIL line per criterion and exits non-zero
// when any criterion fails. Criteria 1, 2 and 4 drive the CLI commands with
// the shipped configs so they measure exactly what a user would run.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "gmf/filters/filter.hpp"
#include "gmf/filters/gmf.hpp"
#include "gmf/filters/unscented.hpp"
#include "gmf/format.hpp"
#include "gmf/harness/report_io.hpp"
#include "gmf/harness/runner.hpp"
#include "gmf/harness/scenario.hpp"
#include "gmf/models/linear_gaussian.hpp"
#include "gmf/models/radio.hpp"
#include "gmf/models/range_only.hpp"
#include "gmf/models/tricyclist.hpp"
#include "gmf/stats.hpp"
#include "oracles.hpp"

using namespace gmf;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = GMF_CONFIG_DIR;
constexpr std::array<const char*, 4> kFilters{"gmf", "pf", "pgm-ds", "pgm-du"};

// Pinned tolerances.
constexpr double kDsFactor = 2.0;          // criterion 1: PGM-DS median over every other filter
constexpr double kPgmTimeFactor = 0.8;     // criterion 2: proposed below 0.8 x fastest PGM
constexpr double kRingCv = 0.2;            // criterion 3
constexpr int kRingSectors = 10;           // criterion 3: of 12
constexpr double kFinalErrorFraction = 0.1;  // criterion 4: of the arena diagonal
constexpr double kKalmanStandardErrors = 3.0;  // criterion 5a
constexpr double kUtTolerance = 1e-9;          // criterion 5c
constexpr double kJacobianTolerance = 1e-5;    // criterion 5d
constexpr double kInvariantSeconds = 60.0;     // criterion 6

struct Outcome {
  bool pass = true;
  std::string detail;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gmf_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path);
  return nlohmann::json::parse(in);
}

std::string fmt(double v, int precision = 3) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

// Shared by criteria 1 and 2: one desk-scale tricyclist batch.
nlohmann::json g_tricyclist;

Outcome criterion_tricyclist_ordering() {
  const fs::path out = scratch("tricyclist");
  cli::CommandOptions options;
  options.config = kConfigs / "tricyclist_desk.json";
  options.out = out;
  std::ostringstream log;
  if (cli::cmd_bench_tricyclist(options, log, std::cerr) != cli::kOk) {
    return {false, "bench-tricyclist failed"};
  }
  for (const char* f : kFilters) {
    g_tricyclist[f] = read_json(out / (std::string("tricyclist_") + f + "_summary.json"));
  }
  fs::remove_all(out);
  std::map<std::string, double> med;
  std::string detail = "median terminate RMSE [m]:";
  for (const char* f : kFilters) {
    med[f] = g_tricyclist[f].at("aggregate").at("terminate_rmse").at("median").get<double>();
    detail += std::string(" ") + f + "=" + fmt(med[f]);
  }
  const double others = std::max({med["gmf"], med["pf"], med["pgm-du"]});
  const bool ordering = med["gmf"] < med["pf"] && med["gmf"] < med["pgm-du"];
  const bool ds_far = med["pgm-ds"] >= kDsFactor * others;
  detail += "; gmf below pf and pgm-du: " + std::string(ordering ? "yes" : "no");
  detail += "; pgm-ds >= 2x others: " + std::string(ds_far ? "yes" : "no") + " (ratio " + fmt(med["pgm-ds"] / others, 2) + ")";
  return {ordering && ds_far, detail};
}

Outcome criterion_runtime_ordering() {
  if (g_tricyclist.empty()) {
    return {false, "no tricyclist batch"};
  }
  std::map<std::string, double> t;
  std::string detail = "mean iteration time [ms]:";
  for (const char* f : kFilters) {
    t[f] = g_tricyclist[f].at("aggregate").at("avg_iteration_time").at("mean").get<double>();
    detail += std::string(" ") + f + "=" + fmt(1e3 * t[f]);
  }
  const double pgm = std::min(t["pgm-ds"], t["pgm-du"]);
  detail += "; 0.8 x min(PGM)=" + fmt(1e3 * kPgmTimeFactor * pgm);
  return {t["pf"] < t["gmf"] && t["gmf"] < kPgmTimeFactor * pgm, detail};
}

Outcome criterion_ring() {
  const double range = 10.0;
  const RangeOnlyModel model(0.25, 0.0);
  const Eigen::Vector2d robot(20.0, 15.0);
  FilterSettings settings;
  settings.num_samples = 3000;
  auto filter = make_filter(FilterKind::kGmf, settings, Vector(robot), 400.0 * Matrix::Identity(2, 2), RngStream(2024));
  Measurement m{Vector::Constant(1, range), {}};
  m.context.robot_position = robot;
  filter->step(model, 0.0, 0.0, m);
  const auto belief = filter->belief();
  double sq = 0.0;
  std::array<int, 12> sectors{};
  for (const auto& c : belief) {
    const Eigen::Vector2d rel = Eigen::Vector2d(c.mean[0], c.mean[1]) - robot;
    sq += std::pow(rel.norm() - range, 2);
    const double angle = std::atan2(rel.y(), rel.x()) + std::numbers::pi;
    ++sectors[std::min<std::size_t>(11, static_cast<std::size_t>(angle / (2 * std::numbers::pi) * 12))];
  }
  const double cv = std::sqrt(sq / static_cast<double>(belief.size())) / range;
  const int occupied = static_cast<int>(std::count_if(sectors.begin(), sectors.end(), [](int s) { return s > 0; }));
  return {cv < kRingCv && occupied >= kRingSectors,
          "range CV=" + fmt(cv, 4) + " (< 0.2), occupied sectors=" + std::to_string(occupied) + "/12 (>= 10)"};
}

Outcome criterion_radio() {
  const fs::path out = scratch("radio");
  cli::CommandOptions options;
  options.config = kConfigs / "radio_nlos.json";
  options.out = out;
  std::ostringstream log;
  if (cli::cmd_sim_radio(options, log, std::cerr) != cli::kOk) {
    return {false, "sim-radio failed"};
  }
  std::map<std::string, double> armse;
  double final_err = 0.0;
  std::string detail = "median ARMSE [m]:";
  for (const char* f : kFilters) {
    const auto doc = read_json(out / (std::string("radio_") + f + "_summary.json"));
    const auto& agg = doc.at("averaged").at("aggregate");
    armse[f] = agg.at("armse").at("median").get<double>();
    detail += std::string(" ") + f + "=" + fmt(armse[f], 2);
    if (std::string(f) == "gmf") {
      final_err = agg.at("terminate_rmse").at("median").get<double>();
    }
  }
  fs::remove_all(out);
  const auto config = cli::load_config(options.config);
  const double limit = kFinalErrorFraction * config.radio.grid->diagonal();
  const bool ordering = armse["gmf"] < armse["pgm-du"] && armse["gmf"] < armse["pf"];
  detail += "; gmf final error " + fmt(final_err, 2) + " m vs limit " + fmt(limit, 2) + " m";
  return {ordering && final_err < limit, detail};
}

// Normalized RMS gap between a filter mean and the exact Kalman mean over 50
// steps, in units of the Monte Carlo standard error sqrt(P_k / N).
double kalman_gap(FilterKind kind, std::size_t n) {
  const double a = 0.95;
  const double q = 0.2;
  const double r = 0.5;
  RngStream data(77);
  const auto trial = simulate_scalar(a, q, r, 0.0, 1.0, 50, data);
  FilterSettings settings;
  settings.num_samples = n;
  auto filter = make_filter(kind, settings, Vector::Zero(1), Matrix::Identity(1, 1), RngStream(78));
  const auto model = LinearGaussianModel::scalar(a, q, r);
  ScalarKalman kf{0.0, 1.0};
  double sq = 0.0;
  for (std::size_t k = 0; k < trial.z.size(); ++k) {
    if (k > 0) {
      kf.predict(a, q);
    }
    kf.update(trial.z[k], r);
    filter->step(model, static_cast<double>(k), k == 0 ? 0.0 : 1.0, {Vector::Constant(1, trial.z[k]), {}});
    sq += std::pow(filter->estimate()[0] - kf.mean, 2) / (kf.var / static_cast<double>(n));
  }
  return std::sqrt(sq / static_cast<double>(trial.z.size()));
}

Outcome criterion_oracles() {
  std::string detail;
  bool pass = true;

  const double gmf_gap = kalman_gap(FilterKind::kGmf, 2000);
  const double pf_gap = kalman_gap(FilterKind::kPf, 2000);
  const bool kalman = gmf_gap < kKalmanStandardErrors && pf_gap < kKalmanStandardErrors;
  pass = pass && kalman;
  detail += "(a) KF gap in standard errors gmf=" + fmt(gmf_gap, 2) + " pf=" + fmt(pf_gap, 2);

  RngStream rng(79);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 5 + trial % 60;
    Matrix pts(2, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      pts(0, j) = 4.0 * std::floor(3.0 * rng.uniform()) + rng.normal();
      pts(1, j) = rng.normal();
    }
    const double eps = 0.3 + rng.uniform();
    const int min_pts = 1 + trial % 6;
    const auto got = dbscan(pts, eps, min_pts);
    const auto want = reference_dbscan(pts, eps, min_pts);
    mismatches += (got.labels != want.labels || got.num_clusters != want.num_clusters) ? 1 : 0;
  }
  pass = pass && mismatches == 0;
  detail += "; (b) DBSCAN mismatches " + std::to_string(mismatches) + "/200";

  double ut_err = 0.0;
  for (Eigen::Index n = 1; n <= 7; ++n) {
    const Matrix l = Matrix::NullaryExpr(n, n, [&] { return rng.normal(); });
    const Matrix cov = l * l.transpose() + 0.1 * Matrix::Identity(n, n);
    const Vector mean = Vector::NullaryExpr(n, [&] { return rng.normal(); });
    const Matrix map = Matrix::NullaryExpr(3, n, [&] { return rng.normal(); });
    const Vector offset = Vector::NullaryExpr(3, [&] { return rng.normal(); });
    const auto sp = ut_sigma_points(mean, cov, UtParams{0.01, 2.0, 0.0});
    const Matrix y = (map * sp.points).colwise() + offset;
    const Vector y_mean = y * sp.mean_weights;
    const Matrix dev = y.colwise() - y_mean;
    const Matrix y_cov = dev * sp.cov_weights.asDiagonal() * dev.transpose();
    const Vector want_mean = map * mean + offset;
    const Matrix want_cov = map * cov * map.transpose();
    ut_err = std::max({ut_err, (y_mean - want_mean).norm() / (1.0 + want_mean.norm()),
                       (y_cov - want_cov).norm() / want_cov.norm()});
  }
  pass = pass && ut_err < kUtTolerance;
  detail += "; (c) UT relative moment error " + format_double(ut_err);

  double jac_err = 0.0;
  const TricyclistModel tri(TricyclistConfig::defaults());
  const RadioModel radio{RadioParams{}};
  for (int trial = 0; trial < 100; ++trial) {
    Vector x(7);
    x << 20 * rng.normal(), 20 * rng.normal(), 3 * rng.normal(), 3 * rng.normal(), 0.3 * rng.normal(),
        3 * rng.normal(), 0.3 * rng.normal();
    const double t = 80.0 * rng.uniform();
    jac_err = std::max({jac_err, relative_gap(tri.dynamics_jacobian(x, t, 0.5), fd_dynamics(tri, x, t, 0.5)),
                        relative_gap(tri.noise_gain(x, t, 0.5), fd_noise_gain(tri, x, t, 0.5)),
                        relative_gap(tri.measurement_jacobian(x, {}), fd_measurement(tri, x, {}))});
    Vector s(2);
    s << 40 * rng.uniform(), 30 * rng.uniform();
    MeasurementContext ctx;
    ctx.robot_position = {40 * rng.uniform(), 30 * rng.uniform()};
    ctx.observed = 10.0 + 30.0 * rng.uniform();
    const double d = (Eigen::Vector2d(s[0], s[1]) - ctx.robot_position).norm();
    // The linearized mode can switch at the LOS threshold; sample away from it and from the floor.
    if (std::abs(d - radio.params().los_threshold) > 1e-3 && d > 0.5) {
      jac_err = std::max(jac_err, relative_gap(radio.measurement_jacobian(s, ctx), fd_measurement(radio, s, ctx)));
    }
  }
  pass = pass && jac_err < kJacobianTolerance;
  detail += "; (d) Jacobian relative gap " + format_double(jac_err);
  return {pass, detail};
}

bool is_psd(const Matrix& cov) {
  return cov.isApprox(cov.transpose(), 1e-12) && min_eigenvalue(cov) >= -1e-9 * std::max(1.0, cov.trace());
}

bool on_simplex(const GaussianMixtured& mix) {
  double total = 0.0;
  for (const auto& c : mix) {
    if (!(c.weight >= 0.0)) {
      return false;
    }
    total += c.weight;
  }
  return std::abs(total - 1.0) < 1e-9;
}

Outcome criterion_invariants() {
  const auto start = std::chrono::steady_clock::now();
  auto cfg = TricyclistConfig::defaults();
  const TricyclistScenario scenario(cfg);
  const auto& model = scenario.model();
  RngStream noise = scenario_stream(5);
  const TrialData data = scenario.generate(noise);
  FilterSettings settings;
  settings.num_samples = 500;

  std::size_t simplex_violations = 0;
  std::size_t psd_violations = 0;
  for (const auto kind : {FilterKind::kGmf, FilterKind::kPf, FilterKind::kPgmDs, FilterKind::kPgmDu}) {
    (void)run_trial(kind, settings, model, data, filter_stream(5), {}, [&](std::size_t, const Filter& f) {
      const auto belief = f.belief();
      simplex_violations += on_simplex(belief) ? 0 : 1;
      for (const auto& c : belief) {
        psd_violations += is_psd(c.cov) ? 0 : 1;
      }
    });
  }

  // The MI bound is internal to a filter step, so the pipeline is replayed
  // from the public stages to observe the belief right after bounding.
  GmfConfig gcfg;
  gcfg.num_samples = 500;
  gcfg.initial_mean = data.prior_mean;
  gcfg.initial_cov = data.prior_cov;
  RngStream rng = filter_stream(6);
  auto mix = gmf_init(gcfg, rng);
  std::size_t mi_violations = 0;
  const auto recenter = [&](GaussianMixtured& m) {
    Matrix means(m.dim(), static_cast<Eigen::Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
      means.col(static_cast<Eigen::Index>(i)) = m[i].mean;
    }
    recenter_angles(means, m.weights(), model.angular_states());
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i].mean = means.col(static_cast<Eigen::Index>(i));
    }
  };
  for (std::size_t k = 0; k < data.measurements.size(); ++k) {
    if (data.dts[k] > 0.0) {
      mix = gmf_propagate(mix, model, data.times[k] - data.dts[k], data.dts[k], rng);
      recenter(mix);
      Matrix bound;
      mix = gmf_mi_bound(mix, gcfg, nullptr, &bound);
      for (const auto& c : mix) {
        mi_violations += psd_exceeds(c.cov, bound) ? 1 : 0;
      }
    }
    if (!active_channels(data.measurements[k].context, model.meas_dim()).empty()) {
      mix = gmf_update(mix, data.measurements[k], model, gcfg);
      recenter(mix);
      simplex_violations += on_simplex(mix) ? 0 : 1;
      mix = gmf_resample(mix, gcfg, rng);
    }
  }

  const auto gmf_batch = run_mc(scenario, FilterKind::kGmf, settings, 2, 8, 1);
  bool mixtures_constant = true;
  for (const auto& run : gmf_batch.runs) {
    mixtures_constant = mixtures_constant && run.avg_num_mixtures == static_cast<double>(settings.num_samples);
  }

  bool deterministic = true;
  for (const auto kind : {FilterKind::kGmf, FilterKind::kPf, FilterKind::kPgmDs, FilterKind::kPgmDu}) {
    auto threaded = settings;
    threaded.jobs = 4;
    const auto a = without_timing(to_json(run_mc(scenario, kind, settings, 2, 8, 1)));
    const auto b = without_timing(to_json(run_mc(scenario, kind, settings, 2, 8, 4)));
    const auto c = without_timing(to_json(run_mc(scenario, kind, threaded, 2, 8, 1)));
    deterministic = deterministic && a == b && a == c;
  }

  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool pass = simplex_violations == 0 && psd_violations == 0 && mi_violations == 0 && mixtures_constant &&
                    deterministic && seconds < kInvariantSeconds;
  return {pass, "simplex violations " + std::to_string(simplex_violations) + ", PSD violations " +
                    std::to_string(psd_violations) + ", MI-bound violations " + std::to_string(mi_violations) +
                    ", avg_num_mixtures == N_p: " + (mixtures_constant ? "yes" : "no") +
                    ", deterministic across jobs: " + (deterministic ? "yes" : "no") + ", " + fmt(seconds, 1) +
                    " s (< 60 s)"};
}

}  // namespace

int main() {
  const std::array<std::pair<const char*, std::function<Outcome()>>, 6> criteria{{
      {"tricyclist filter ordering", criterion_tricyclist_ordering},
      {"runtime ordering", criterion_runtime_ordering},
      {"ring-shaped belief", criterion_ring},
      {"synthetic radio localization", criterion_radio},
      {"oracle equivalence", criterion_oracles},
      {"invariants", criterion_invariants},
  }};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failures += outcome.pass ? 0 : 1;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): " << (outcome.pass ? "PASS" : "FAIL")
              << "  " << outcome.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>

#include "gmf/errors.hpp"

namespace gmf::cli {
namespace {

using nlohmann::json;

std::string join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

/// A JSON object together with its dotted path, for error messages.
class Section {
 public:
  Section(const json& value, std::string path) : value_(value), path_(std::move(path)) {
    if (!value_.is_object()) {
      throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }
  }

  void allow(std::initializer_list<const char*> keys) const {
    for (auto it = value_.begin(); it != value_.end(); ++it) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; })) {
        throw ConfigError(join(path_, it.key()), "unknown key");
      }
    }
  }

  [[nodiscard]] bool has(const char* key) const { return value_.contains(key); }
  [[nodiscard]] std::string key(const char* key) const { return join(path_, key); }
  [[nodiscard]] const json& at(const char* key) const { return value_.at(key); }
  [[nodiscard]] Section section(const char* key) const { return {value_.at(key), join(path_, key)}; }

  void read(const char* key, double& out) const {
    if (!has(key)) {
      return;
    }
    const auto& v = at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      throw ConfigError(this->key(key), "expected a finite number");
    }
    out = v.get<double>();
  }

  void read(const char* key, bool& out) const {
    if (!has(key)) {
      return;
    }
    if (!at(key).is_boolean()) {
      throw ConfigError(this->key(key), "expected true or false");
    }
    out = at(key).get<bool>();
  }

  void read(const char* key, std::string& out) const {
    if (!has(key)) {
      return;
    }
    if (!at(key).is_string()) {
      throw ConfigError(this->key(key), "expected a string");
    }
    out = at(key).get<std::string>();
  }

  template <typename Int>
    requires std::is_integral_v<Int>
  void read(const char* key, Int& out) const {
    if (!has(key)) {
      return;
    }
    const auto& v = at(key);
    if (!v.is_number_integer()) {
      throw ConfigError(this->key(key), "expected an integer");
    }
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<Int>::max())) {
        throw ConfigError(this->key(key), "out of range");
      }
      out = static_cast<Int>(u);
      return;
    }
    const auto s = v.get<std::int64_t>();
    if (s < static_cast<std::int64_t>(std::numeric_limits<Int>::min()) ||
        (s > 0 && static_cast<std::uint64_t>(s) > static_cast<std::uint64_t>(std::numeric_limits<Int>::max()))) {
      throw ConfigError(this->key(key), "out of range");
    }
    out = static_cast<Int>(s);
  }

  /// Fixed-length (size > 0) or any-length (size == 0) numeric array.
  [[nodiscard]] Vector vector(const char* key, Eigen::Index size) const {
    const auto& v = at(key);
    if (!v.is_array() || (size > 0 && static_cast<Eigen::Index>(v.size()) != size)) {
      throw ConfigError(this->key(key), size > 0 ? "expected an array of " + std::to_string(size) + " numbers"
                                                 : "expected an array of numbers");
    }
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        throw ConfigError(this->key(key), "entry " + std::to_string(i) + " is not a finite number");
      }
      out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
  }

  [[nodiscard]] Eigen::Vector2d point(const char* key) const { return vector(key, 2); }

  [[nodiscard]] std::vector<Section> array(const char* key) const {
    const auto& v = at(key);
    if (!v.is_array()) {
      throw ConfigError(this->key(key), "expected an array");
    }
    std::vector<Section> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.emplace_back(v[i], this->key(key) + "[" + std::to_string(i) + "]");
    }
    return out;
  }

 private:
  const json& value_;
  std::string path_;
};

void require_positive(const Section& s, const char* key, double value) {
  if (!(value > 0.0)) {
    throw ConfigError(s.key(key), "must be positive");
  }
}

std::vector<FilterKind> parse_filters(const Section& root) {
  const auto& v = root.at("filters");
  if (!v.is_array() || v.empty()) {
    throw ConfigError("filters", "expected a non-empty array of filter names");
  }
  std::vector<FilterKind> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto kind = v[i].is_string() ? parse_filter_kind(v[i].get<std::string>()) : std::nullopt;
    if (!kind) {
      throw ConfigError("filters[" + std::to_string(i) + "]", "expected one of gmf, pf, pgm-ds, pgm-du");
    }
    if (std::find(out.begin(), out.end(), *kind) != out.end()) {
      throw ConfigError("filters[" + std::to_string(i) + "]", "listed twice");
    }
    out.push_back(*kind);
  }
  return out;
}

void parse_filter_settings(const Section& root, FilterSettings& s) {
  root.read("num_samples", s.num_samples);
  if (root.has("gmf")) {
    const auto g = root.section("gmf");
    g.allow({"bandwidth_exponent", "mi_bounding", "joseph_form"});
    g.read("bandwidth_exponent", s.bandwidth_exponent);
    g.read("mi_bounding", s.mi_bounding);
    g.read("joseph_form", s.joseph_form);
    if (!(s.bandwidth_exponent < 0.0)) {
      throw ConfigError(g.key("bandwidth_exponent"), "must be negative");
    }
  }
  if (root.has("pf")) {
    const auto p = root.section("pf");
    p.allow({"ess_threshold"});
    p.read("ess_threshold", s.pf_ess_threshold);
    if (!(s.pf_ess_threshold > 0.0 && s.pf_ess_threshold <= 1.0)) {
      throw ConfigError(p.key("ess_threshold"), "must lie in (0, 1]");
    }
  }
  if (root.has("pgm")) {
    const auto p = root.section("pgm");
    p.allow({"min_pts", "eps", "covariance_update"});
    p.read("min_pts", s.min_pts);
    p.read("eps", s.eps);
    p.read("covariance_update", s.pgm_covariance_update);
    if (s.min_pts < 1) {
      throw ConfigError(p.key("min_pts"), "must be at least 1");
    }
    require_positive(p, "eps", s.eps);
  }
  if (root.has("ut")) {
    const auto u = root.section("ut");
    u.allow({"alpha", "beta", "kappa"});
    u.read("alpha", s.ut.alpha);
    u.read("beta", s.ut.beta);
    u.read("kappa", s.ut.kappa);
    require_positive(u, "alpha", s.ut.alpha);
  }
}

void parse_tricyclist(const Section& t, TricyclistConfig& c) {
  t.allow({"wheelbase", "friends", "controls", "schedule", "process_noise_diag", "measurement_noise_diag", "dt",
           "steps", "initial_mean", "initial_cov_diag"});
  t.read("wheelbase", c.wheelbase);
  require_positive(t, "wheelbase", c.wheelbase);
  if (t.has("friends")) {
    const auto friends = t.array("friends");
    if (friends.size() != 2) {
      throw ConfigError(t.key("friends"), "expected exactly 2 merry-go-rounds");
    }
    for (std::size_t j = 0; j < 2; ++j) {
      friends[j].allow({"center", "radius"});
      c.friends[j].center = friends[j].point("center");
      friends[j].read("radius", c.friends[j].radius);
      require_positive(friends[j], "radius", c.friends[j].radius);
    }
  }
  if (t.has("controls")) {
    c.controls.clear();
    for (const auto& seg : t.array("controls")) {
      seg.allow({"duration", "speed", "steering"});
      ControlSegment s;
      seg.read("duration", s.duration);
      seg.read("speed", s.input.speed);
      seg.read("steering", s.input.steering);
      require_positive(seg, "duration", s.duration);
      c.controls.push_back(s);
    }
  }
  if (t.has("schedule")) {
    const auto schedule = t.array("schedule");
    if (schedule.size() != 2) {
      throw ConfigError(t.key("schedule"), "expected exactly 2 channel schedules");
    }
    for (std::size_t j = 0; j < 2; ++j) {
      schedule[j].allow({"period", "on", "offset"});
      schedule[j].read("period", c.schedule[j].period);
      schedule[j].read("on", c.schedule[j].on);
      schedule[j].read("offset", c.schedule[j].offset);
      if (c.schedule[j].on < 0) {
        throw ConfigError(schedule[j].key("on"), "must not be negative");
      }
    }
  }
  if (t.has("process_noise_diag")) {
    c.process_noise_diag = t.vector("process_noise_diag", 5);
  }
  if (t.has("measurement_noise_diag")) {
    c.measurement_noise_diag = t.vector("measurement_noise_diag", 2);
  }
  if ((c.process_noise_diag.array() < 0.0).any()) {
    throw ConfigError(t.key("process_noise_diag"), "variances must not be negative");
  }
  if (!(c.measurement_noise_diag.array() > 0.0).all()) {
    throw ConfigError(t.key("measurement_noise_diag"), "variances must be positive");
  }
  t.read("dt", c.dt);
  require_positive(t, "dt", c.dt);
  t.read("steps", c.steps);
  if (c.steps < 1) {
    throw ConfigError(t.key("steps"), "must be at least 1");
  }
  if (t.has("initial_mean")) {
    c.initial_mean = t.vector("initial_mean", TricyclistState::kDim);
  }
  if (t.has("initial_cov_diag")) {
    c.initial_cov_diag = t.vector("initial_cov_diag", TricyclistState::kDim);
  }
  if (!(c.initial_cov_diag.array() > 0.0).all()) {
    throw ConfigError(t.key("initial_cov_diag"), "variances must be positive");
  }
}

void parse_log_linear(const Section& s, LogLinearParams& p) {
  s.allow({"p1", "p2"});
  s.read("p1", p.p1);
  s.read("p2", p.p2);
}

std::pair<double, double> parse_pair(const Section& s, const char* key) {
  const Vector v = s.vector(key, 2);
  if (!(v.array() > 0.0).all()) {
    throw ConfigError(s.key(key), "probabilities must be positive");
  }
  return {v[0], v[1]};
}

void parse_radio_params(const Section& s, RadioParams& p) {
  s.allow({"los", "nlos", "los_threshold", "within", "beyond", "r_min", "r_max", "snr_low", "snr_high",
           "process_noise", "d_floor"});
  if (s.has("los")) {
    parse_log_linear(s.section("los"), p.los);
  }
  if (s.has("nlos")) {
    parse_log_linear(s.section("nlos"), p.nlos);
  }
  s.read("los_threshold", p.los_threshold);
  require_positive(s, "los_threshold", p.los_threshold);
  if (s.has("within")) {
    p.within = parse_pair(s, "within");
  }
  if (s.has("beyond")) {
    p.beyond = parse_pair(s, "beyond");
  }
  s.read("r_min", p.r_min);
  s.read("r_max", p.r_max);
  require_positive(s, "r_min", p.r_min);
  if (p.r_max < p.r_min) {
    throw ConfigError(s.key("r_max"), "must not be below r_min");
  }
  s.read("snr_low", p.snr_low);
  s.read("snr_high", p.snr_high);
  if (!(p.snr_low < p.snr_high)) {
    throw ConfigError(s.key("snr_high"), "must exceed snr_low");
  }
  s.read("process_noise", p.process_noise);
  if (p.process_noise < 0.0) {
    throw ConfigError(s.key("process_noise"), "must not be negative");
  }
  s.read("d_floor", p.d_floor);
  require_positive(s, "d_floor", p.d_floor);
}

void parse_radio(const Section& r, const std::filesystem::path& base_dir, RadioSetup& radio) {
  r.allow({"grid", "params", "prior", "missions", "replay_source"});
  if (r.has("grid")) {
    const auto g = r.section("grid");
    g.allow({"file", "cell_size", "origin"});
    std::string file;
    double cell_size = 1.0;
    g.read("file", file);
    g.read("cell_size", cell_size);
    require_positive(g, "cell_size", cell_size);
    if (file.empty()) {
      throw ConfigError(g.key("file"), "required");
    }
    const Eigen::Vector2d origin = g.has("origin") ? g.point("origin") : Eigen::Vector2d::Zero();
    const auto path = base_dir / file;
    if (!std::filesystem::is_regular_file(path)) {
      throw ConfigError(g.key("file"), "no such file: " + path.string());
    }
    try {
      radio.grid = OccupancyGrid::load(path.string(), cell_size, origin);
    } catch (const std::exception& e) {
      throw ConfigError(g.key("file"), e.what());
    }
  }
  if (r.has("params")) {
    parse_radio_params(r.section("params"), radio.params);
  }
  if (!r.has("prior")) {
    throw ConfigError(r.key("prior"), "required");
  }
  const auto prior = r.section("prior");
  prior.allow({"mean", "cov_diag"});
  if (!prior.has("mean") || !prior.has("cov_diag")) {
    throw ConfigError(prior.key(prior.has("mean") ? "cov_diag" : "mean"), "required");
  }
  radio.prior_mean = prior.vector("mean", 2);
  const Vector cov = prior.vector("cov_diag", 2);
  if (!(cov.array() > 0.0).all()) {
    throw ConfigError(prior.key("cov_diag"), "variances must be positive");
  }
  radio.prior_cov = cov.asDiagonal();
  if (r.has("missions")) {
    for (const auto& m : r.array("missions")) {
      m.allow({"name", "source", "waypoints", "speed", "rate", "snr_noise_std"});
      RadioMission mission;
      m.read("name", mission.name);
      if (mission.name.empty() ||
          mission.name.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
              std::string::npos) {
        throw ConfigError(m.key("name"), "must be non-empty letters, digits, '_' or '-'");
      }
      for (const auto& other : radio.missions) {
        if (other.name == mission.name) {
          throw ConfigError(m.key("name"), "duplicate mission name");
        }
      }
      if (!m.has("source")) {
        throw ConfigError(m.key("source"), "required");
      }
      mission.source = m.point("source");
      if (!m.has("waypoints") || !m.at("waypoints").is_array() || m.at("waypoints").empty()) {
        throw ConfigError(m.key("waypoints"), "expected a non-empty array of [x, y] points");
      }
      for (std::size_t i = 0; i < m.at("waypoints").size(); ++i) {
        const auto& p = m.at("waypoints")[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
          throw ConfigError(m.key("waypoints") + "[" + std::to_string(i) + "]", "expected [x, y]");
        }
        mission.trajectory.waypoints.emplace_back(p[0].get<double>(), p[1].get<double>());
      }
      m.read("speed", mission.trajectory.speed);
      m.read("rate", mission.trajectory.rate);
      m.read("snr_noise_std", mission.trajectory.snr_noise_std);
      require_positive(m, "speed", mission.trajectory.speed);
      require_positive(m, "rate", mission.trajectory.rate);
      if (mission.trajectory.snr_noise_std < 0.0) {
        throw ConfigError(m.key("snr_noise_std"), "must not be negative");
      }
      if (radio.grid) {
        if (!radio.grid->contains(mission.source)) {
          throw ConfigError(m.key("source"), "outside the grid");
        }
        for (std::size_t i = 0; i < mission.trajectory.waypoints.size(); ++i) {
          if (!radio.grid->contains(mission.trajectory.waypoints[i])) {
            throw ConfigError(m.key("waypoints") + "[" + std::to_string(i) + "]", "outside the grid");
          }
        }
      }
      radio.missions.push_back(std::move(mission));
    }
  }
  if (r.has("replay_source")) {
    radio.replay_source = r.point("replay_source");
  } else if (!radio.missions.empty()) {
    radio.replay_source = radio.missions.front().source;
  }
}

}  // namespace

ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  const Section root(doc, "");
  root.allow({"scenario", "filters", "num_samples", "runs", "seed", "jobs", "output_dir", "snapshot_every", "gmf",
              "pf", "pgm", "ut", "tricyclist", "radio"});
  ExperimentConfig c;
  root.read("scenario", c.scenario);
  if (c.scenario != "tricyclist" && c.scenario != "radio") {
    throw ConfigError("scenario", "expected \"tricyclist\" or \"radio\"");
  }
  if (root.has("filters")) {
    c.filters = parse_filters(root);
  }
  parse_filter_settings(root, c.settings);
  root.read("runs", c.runs);
  root.read("seed", c.seed);
  root.read("jobs", c.jobs);
  std::string out;
  root.read("output_dir", out);
  if (root.has("output_dir")) {
    if (out.empty()) {
      throw ConfigError("output_dir", "must not be empty");
    }
    c.output_dir = base_dir / out;
  } else {
    c.output_dir = base_dir / c.output_dir;
  }
  root.read("snapshot_every", c.snapshot_every);
  if (root.has("tricyclist")) {
    parse_tricyclist(root.section("tricyclist"), c.tricyclist);
  }
  if (root.has("radio")) {
    parse_radio(root.section("radio"), base_dir, c.radio);
  } else if (c.scenario == "radio") {
    throw ConfigError("radio", "required when scenario is \"radio\"");
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "cannot open " + path.string());
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.parent_path());
}

void validate(const ExperimentConfig& c) {
  if (c.settings.num_samples < 2) {
    throw ConfigError("num_samples", "must be at least 2");
  }
  if (c.runs < 1) {
    throw ConfigError("runs", "must be at least 1");
  }
  if (c.jobs < 0) {
    throw ConfigError("jobs", "must not be negative");
  }
}

}  // namespace gmf::cli

#include "gmf/harness/scenario.hpp"

#include <cstring>
#include <limits>

#include "gmf/errors.hpp"
#include "gmf/stats.hpp"

namespace gmf {
namespace {

class Fnv1a {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ = (state_ ^ p[i]) * 0x100000001b3ULL;
    }
  }
  void value(double v) { bytes(&v, sizeof v); }
  [[nodiscard]] std::uint64_t digest() const { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::uint64_t measurement_hash(const std::vector<Measurement>& measurements) {
  Fnv1a h;
  for (const auto& m : measurements) {
    h.value(m.context.t);
    h.value(m.context.robot_position.x());
    h.value(m.context.robot_position.y());
    for (Eigen::Index i = 0; i < m.z.size(); ++i) {
      h.value(m.z[i]);
    }
    for (const bool a : m.context.available) {
      const unsigned char b = a ? 1 : 0;
      h.bytes(&b, 1);
    }
  }
  return h.digest();
}

TricyclistScenario::TricyclistScenario(TricyclistConfig config) : model_(std::move(config)) {}

TrialData TricyclistScenario::generate(RngStream& rng) const {
  const auto& cfg = model_.config();
  if (cfg.steps < 1) {
    throw ConfigError("tricyclist.steps", "must be at least 1");
  }
  TrialData data;
  data.prior_mean = cfg.initial_mean;
  data.prior_cov = cfg.initial_cov_diag.asDiagonal();
  const Matrix r_sqrt = cfg.measurement_noise_diag.cwiseSqrt().asDiagonal();

  Vector x = mvn_sample(data.prior_mean, data.prior_cov, rng);
  for (int k = 1; k <= cfg.steps; ++k) {
    const double t0 = (k - 1) * cfg.dt;
    x = model_.dynamics(x, t0, cfg.dt, model_.sample_process_noise(cfg.dt, rng));

    Measurement m;
    m.context.t = t0 + cfg.dt;
    m.context.available = cfg.availability(k);
    Vector noise(2);
    noise << rng.normal(), rng.normal();
    m.z = model_.measure(x, m.context) + r_sqrt * noise;
    for (Eigen::Index j = 0; j < m.z.size(); ++j) {
      m.z[j] = wrap_angle(m.z[j]);
    }
    data.times.push_back(m.context.t);
    data.dts.push_back(cfg.dt);
    data.measurements.push_back(std::move(m));
    data.truth.push_back(x);
  }
  return data;
}

TrialData radio_trial(const std::vector<MeasurementRecord>& records, const Vector& prior_mean,
                      const Matrix& prior_cov, const std::optional<Eigen::Vector2d>& truth) {
  if (records.empty()) {
    throw DegenerateInputError("radio_trial: the log has no records");
  }
  TrialData data;
  data.prior_mean = prior_mean;
  data.prior_cov = prior_cov;
  const Vector source = truth ? Vector(*truth) : Vector::Constant(2, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < records.size(); ++k) {
    if (k > 0 && !(records[k].t > records[k - 1].t)) {
      throw IngestError(k + 2, "timestamp does not increase");
    }
    data.times.push_back(records[k].t);
    data.dts.push_back(k == 0 ? 0.0 : records[k].t - records[k - 1].t);
    data.measurements.push_back(records[k].to_measurement());
    data.truth.push_back(source);
  }
  return data;
}

RadioScenario::RadioScenario(OccupancyGrid grid, RadioMission mission, RadioParams params, Vector prior_mean,
                             Matrix prior_cov)
    : grid_(std::move(grid)),
      mission_(std::move(mission)),
      model_(params),
      prior_mean_(std::move(prior_mean)),
      prior_cov_(std::move(prior_cov)) {}

TrialData RadioScenario::generate(RngStream& rng) const {
  const auto records = generate_radio_log(grid_, mission_.source, mission_.trajectory, model_.params(), rng);
  return radio_trial(records, prior_mean_, prior_cov_, mission_.source);
}

}  // namespace gmf

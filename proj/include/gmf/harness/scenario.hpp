#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gmf/harness/radio_log.hpp"
#include "gmf/models/occupancy_grid.hpp"
#include "gmf/models/radio.hpp"
#include "gmf/models/scenario_model.hpp"
#include "gmf/models/tricyclist.hpp"
#include "gmf/rng.hpp"

namespace gmf {

/// Everything one filter run consumes: step k propagates from times[k] - dts[k]
/// by dts[k] (skipped when dts[k] is 0), then updates with measurements[k].
struct TrialData {
  std::vector<double> times;
  std::vector<double> dts;
  std::vector<Measurement> measurements;
  std::vector<Vector> truth;
  Vector prior_mean;
  Matrix prior_cov;
};

/// FNV-1a over the bytes of every measurement value, time, availability flag
/// and robot position. Two runs received the same data iff the hashes match.
std::uint64_t measurement_hash(const std::vector<Measurement>& measurements);

class Scenario {
 public:
  virtual ~Scenario() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual const ScenarioModel& model() const = 0;
  /// Draws a ground-truth trajectory and its measurements from `rng`.
  [[nodiscard]] virtual TrialData generate(RngStream& rng) const = 0;
};

/// Blind tricyclist: the truth starts from a draw of the prior and follows the
/// model dynamics with sampled process noise.
class TricyclistScenario final : public Scenario {
 public:
  explicit TricyclistScenario(TricyclistConfig config);
  [[nodiscard]] std::string name() const override { return "tricyclist"; }
  [[nodiscard]] const ScenarioModel& model() const override { return model_; }
  [[nodiscard]] TrialData generate(RngStream& rng) const override;

 private:
  TricyclistModel model_;
};

/// A static radio source observed along a robot path.
struct RadioMission {
  std::string name = "mission";
  Eigen::Vector2d source = Eigen::Vector2d::Zero();
  RadioTrajectory trajectory;
};

/// Turns a measurement log into filter input. `truth`, when given, is the
/// fixed source position; otherwise the truth trace is filled with NaN.
TrialData radio_trial(const std::vector<MeasurementRecord>& records, const Vector& prior_mean,
                      const Matrix& prior_cov, const std::optional<Eigen::Vector2d>& truth);

/// Synthetic radio localization: each trial generates a fresh log.
class RadioScenario final : public Scenario {
 public:
  RadioScenario(OccupancyGrid grid, RadioMission mission, RadioParams params, Vector prior_mean, Matrix prior_cov);
  [[nodiscard]] std::string name() const override { return "radio:" + mission_.name; }
  [[nodiscard]] const ScenarioModel& model() const override { return model_; }
  [[nodiscard]] TrialData generate(RngStream& rng) const override;

 private:
  OccupancyGrid grid_;
  RadioMission mission_;
  RadioModel model_;
  Vector prior_mean_;
  Matrix prior_cov_;
};

}  // namespace gmf

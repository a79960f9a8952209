#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gmf/models/occupancy_grid.hpp"
#include "gmf/models/radio.hpp"
#include "gmf/models/scenario_model.hpp"
#include "gmf/rng.hpp"

namespace gmf {

/// One row of a measurement log: robot position and the SNR it observed.
struct MeasurementRecord {
  double t = 0.0;        // s
  double robot_x = 0.0;  // m
  double robot_y = 0.0;  // m
  double snr = 0.0;      // dB

  [[nodiscard]] Eigen::Vector2d robot() const { return {robot_x, robot_y}; }
  [[nodiscard]] Measurement to_measurement() const;
  friend bool operator==(const MeasurementRecord&, const MeasurementRecord&) = default;
};

/// Robot path and sensing settings for synthetic log generation.
struct RadioTrajectory {
  std::vector<Eigen::Vector2d> waypoints;
  double speed = 1.0;      // m/s along the path
  double rate = 1.0;       // Hz
  double snr_noise_std = 2.0;  // dB
};

/// Samples the robot pose along the waypoint polyline at `rate`, decides LOS
/// with grid_los and draws the SNR from the matching log-linear mode plus
/// Gaussian noise. The last waypoint is always emitted.
std::vector<MeasurementRecord> generate_radio_log(const OccupancyGrid& grid, const Eigen::Vector2d& source,
                                                  const RadioTrajectory& trajectory, const RadioParams& params,
                                                  RngStream& rng);

/// CSV with header `t,robot_x,robot_y,snr`; values round-trip exactly.
void write_measurement_log(std::ostream& out, const std::vector<MeasurementRecord>& records);
void write_measurement_log(const std::string& path, const std::vector<MeasurementRecord>& records);

/// Parses a log and checks that timestamps strictly increase and every field
/// is finite. Errors are IngestError carrying the 1-based line number.
std::vector<MeasurementRecord> read_measurement_log(std::istream& in);
std::vector<MeasurementRecord> read_measurement_log(const std::string& path);

}  // namespace gmf

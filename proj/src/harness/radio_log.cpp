#include "gmf/harness/radio_log.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "gmf/errors.hpp"
#include "gmf/format.hpp"

namespace gmf {

Measurement MeasurementRecord::to_measurement() const {
  Measurement m;
  m.z = Vector::Constant(1, snr);
  m.context.t = t;
  m.context.robot_position = robot();
  m.context.observed = snr;
  return m;
}

std::vector<MeasurementRecord> generate_radio_log(const OccupancyGrid& grid, const Eigen::Vector2d& source,
                                                  const RadioTrajectory& trajectory, const RadioParams& params,
                                                  RngStream& rng) {
  if (trajectory.waypoints.empty()) {
    throw DomainError("generate_radio_log: at least one waypoint is required");
  }
  if (!(trajectory.speed > 0.0) || !(trajectory.rate > 0.0) || !(trajectory.snr_noise_std >= 0.0)) {
    throw DomainError("generate_radio_log: speed and rate must be positive, noise non-negative");
  }
  if (!grid.contains(source)) {
    throw BoundsError("generate_radio_log: source lies outside the grid");
  }
  for (const auto& w : trajectory.waypoints) {
    if (!grid.contains(w)) {
      throw BoundsError("generate_radio_log: waypoint lies outside the grid");
    }
  }

  // Robot poses at every sample time along the polyline.
  const double step = trajectory.speed / trajectory.rate;
  std::vector<Eigen::Vector2d> poses{trajectory.waypoints.front()};
  double carry = 0.0;  // path length already travelled past the last sample
  for (std::size_t i = 1; i < trajectory.waypoints.size(); ++i) {
    const Eigen::Vector2d a = trajectory.waypoints[i - 1];
    const Eigen::Vector2d b = trajectory.waypoints[i];
    const double length = (b - a).norm();
    double s = step - carry;
    while (s <= length) {
      poses.push_back(a + (b - a) * (s / length));
      s += step;
    }
    carry = length - (s - step);
  }
  if ((poses.back() - trajectory.waypoints.back()).norm() > 1e-9 * step) {
    poses.push_back(trajectory.waypoints.back());
  }

  SnrContext ctx{Eigen::Vector2d::Zero(), 0.0, params};
  std::vector<MeasurementRecord> records;
  records.reserve(poses.size());
  for (std::size_t k = 0; k < poses.size(); ++k) {
    ctx.robot_position = poses[k];
    const auto mode = grid_los(grid, poses[k], source) ? PropagationMode::kLos : PropagationMode::kNlos;
    const double clean = snr_predict(source, ctx, mode);
    const double snr = trajectory.snr_noise_std > 0.0 ? clean + trajectory.snr_noise_std * rng.normal() : clean;
    records.push_back({static_cast<double>(k) / trajectory.rate, poses[k].x(), poses[k].y(), snr});
  }
  return records;
}

void write_measurement_log(std::ostream& out, const std::vector<MeasurementRecord>& records) {
  out << "t,robot_x,robot_y,snr\n";
  for (const auto& r : records) {
    out << format_double(r.t) << ',' << format_double(r.robot_x) << ',' << format_double(r.robot_y) << ','
        << format_double(r.snr) << '\n';
  }
}

void write_measurement_log(const std::string& path, const std::vector<MeasurementRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  write_measurement_log(out, records);
  if (!out) {
    throw std::runtime_error("failed writing " + path);
  }
}

std::vector<MeasurementRecord> read_measurement_log(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<MeasurementRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty()) {
      continue;
    }
    if (!header_seen) {
      if (line != "t,robot_x,robot_y,snr") {
        throw IngestError(line_no, "expected header 't,robot_x,robot_y,snr'");
      }
      header_seen = true;
      continue;
    }
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) {
        break;
      }
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 4) {
      throw IngestError(line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    MeasurementRecord r{parse_double(fields[0], line_no), parse_double(fields[1], line_no),
                        parse_double(fields[2], line_no), parse_double(fields[3], line_no)};
    if (!std::isfinite(r.t) || !std::isfinite(r.robot_x) || !std::isfinite(r.robot_y) || !std::isfinite(r.snr)) {
      throw IngestError(line_no, "non-finite field");
    }
    if (!records.empty() && !(r.t > records.back().t)) {
      throw IngestError(line_no, "timestamp does not increase");
    }
    records.push_back(r);
  }
  if (!header_seen) {
    throw IngestError(line_no == 0 ? 1 : line_no, "missing header");
  }
  return records;
}

std::vector<MeasurementRecord> read_measurement_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IngestError(0, "cannot open " + path);
  }
  return read_measurement_log(in);
}

}  // namespace gmf

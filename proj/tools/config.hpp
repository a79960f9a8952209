#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmf/filters/filter.hpp"
#include "gmf/harness/scenario.hpp"
#include "gmf/models/occupancy_grid.hpp"
#include "gmf/models/radio.hpp"
#include "gmf/models/tricyclist.hpp"

namespace gmf::cli {

struct RadioSetup {
  std::optional<OccupancyGrid> grid;
  RadioParams params;
  Vector prior_mean;
  Matrix prior_cov;
  std::vector<RadioMission> missions;
  /// True source for `replay`; defaults to the first mission's source.
  std::optional<Eigen::Vector2d> replay_source;
};

/// One experiment, as read from a JSON config file. Keys missing from the
/// file keep the defaults below. Relative file paths in the config resolve
/// against the config file's directory.
struct ExperimentConfig {
  std::string scenario = "tricyclist";
  std::vector<FilterKind> filters{FilterKind::kGmf, FilterKind::kPf, FilterKind::kPgmDs, FilterKind::kPgmDu};
  FilterSettings settings;
  std::size_t runs = 1;
  std::uint64_t seed = 1;
  /// 0 means every available core.
  int jobs = 0;
  std::filesystem::path output_dir = "out";
  /// Belief snapshot cadence in steps for radio runs; 0 disables snapshots.
  std::size_t snapshot_every = 0;
  TricyclistConfig tricyclist = TricyclistConfig::defaults();
  RadioSetup radio;
};

/// Parses and validates a config document. `base_dir` anchors relative paths.
/// Throws ConfigError naming the offending key.
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads `path` and parses it. A missing or unreadable file, or invalid JSON,
/// is a ConfigError on the key "config".
ExperimentConfig load_config(const std::filesystem::path& path);

/// Checks the cross-key constraints that flags can also violate.
void validate(const ExperimentConfig& config);

}  // namespace gmf::cli

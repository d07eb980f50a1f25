#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "stopslam/core/pose2.hpp"
#include "stopslam/explore/explorer.hpp"
#include "stopslam/slam/slam_state.hpp"

namespace stopslam::harness {

/// Everything one experiment needs. Loaded from a flat `key = value` file; see README for
/// the key list.
struct ExperimentConfig {
  std::filesystem::path world;
  std::uint64_t seed = 1;
  /// Trial i runs with seed + i.
  int trials = 1;
  int step_cap = 60;
  std::vector<std::string> criteria{"task:2:3", "temporal:600", "coverage:90", "frontier"};
  /// Label of the criterion that halts the run; empty means all of them.
  std::string master;
  /// Coverage and map error need the world ground truth; turning this off makes coverage
  /// criteria unavailable.
  bool ground_truth = true;
  std::optional<Pose2> start;
  std::filesystem::path output_dir = "out";
  slam::SlamConfig slam;
  explore::ExplorerConfig explorer;

  /// Throws ConfigError (or CriterionUnavailableError) on invalid settings.
  void validate() const;
};

/// Parses `key = value` lines; '#' starts a comment. Unknown keys and bad values throw
/// ParseError with the line number. A relative world path is resolved against `base_dir`.
ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// The settings as `key = value` lines, readable by parse_config.
std::string describe_config(const ExperimentConfig& config);

}  // namespace stopslam::harness

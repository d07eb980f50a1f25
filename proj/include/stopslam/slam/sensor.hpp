#pragma once

#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "stopslam/core/pose2.hpp"
#include "stopslam/slam/occupancy_grid.hpp"
#include "stopslam/slam/world.hpp"

namespace stopslam::slam {

/// Planar range finder: 180 deg field of view, 5 m range, 1500 beams by default.
struct SensorModel {
  double fov = std::numbers::pi;
  double max_range = 5.0;
  int beams = 1500;
  double range_noise = 0.01;
  double hit_log_odds = 0.85;
  double miss_log_odds = -0.7;

  /// Throws ConfigError unless fov in (0, 2pi], beams >= 1, range > 0 and noise >= 0.
  void validate() const;
  /// Bearing of beam k relative to the robot heading; beams are centred in equal sectors.
  double bearing(int k) const;
};

struct Scan {
  std::vector<double> ranges;
  /// 1 when the beam ended on an obstacle, 0 when it ran out to max range.
  std::vector<std::uint8_t> hit;

  friend bool operator==(const Scan&, const Scan&) = default;
};

/// Casts every beam through the ground truth from `pose`. Hit ranges get additive Gaussian
/// noise and are clamped to [0, max_range]. Throws SimulationFault when `pose` is inside an
/// occupied cell.
Scan simulate_scan(const WorldModel& world, const Pose2& pose, const SensorModel& sensor, std::mt19937_64& rng);

/// Fuses a scan taken at `pose` into the map: along each beam, cells before the endpoint get
/// one miss update and the endpoint cell a hit update (a miss when the beam did not hit).
/// Each cell is updated at most once per scan; a hit overrides misses from other beams.
/// Returns the number of cells that changed from unknown to known.
std::size_t integrate_scan(OccupancyGrid& map, const Pose2& pose, const Scan& scan, const SensorModel& sensor);

}  // namespace stopslam::slam

#include "stopslam/slam/sensor.hpp"

#include <algorithm>
#include <cmath>

#include "stopslam/core/errors.hpp"

namespace stopslam::slam {

void SensorModel::validate() const {
  if (!(fov > 0.0) || fov > 2.0 * std::numbers::pi + 1e-12) throw ConfigError("sensor fov must lie in (0, 2pi]");
  if (beams < 1) throw ConfigError("sensor needs at least one beam");
  if (!(max_range > 0.0)) throw ConfigError("sensor range must be positive");
  if (!(range_noise >= 0.0)) throw ConfigError("sensor range noise must be non-negative");
  if (!(hit_log_odds > 0.0) || !(miss_log_odds < 0.0)) throw ConfigError("hit log-odds must be > 0 and miss < 0");
}

double SensorModel::bearing(int k) const { return -0.5 * fov + fov * (k + 0.5) / beams; }

Scan simulate_scan(const WorldModel& world, const Pose2& pose, const SensorModel& sensor, std::mt19937_64& rng) {
  const Eigen::Vector2d origin(pose.x(), pose.y());
  if (world.occupied_at(origin)) throw SimulationFault("sensor origin lies inside an occupied cell");
  std::normal_distribution<double> noise(0.0, 1.0);
  Scan scan;
  scan.ranges.resize(static_cast<std::size_t>(sensor.beams));
  scan.hit.resize(static_cast<std::size_t>(sensor.beams));
  for (int k = 0; k < sensor.beams; ++k) {
    const double angle = pose.theta() + sensor.bearing(k);
    const Eigen::Vector2d end = origin + sensor.max_range * Eigen::Vector2d(std::cos(angle), std::sin(angle));
    double range = sensor.max_range;
    bool hit = false;
    trace_segment(world.geometry(), origin, end, [&](Cell c, double t) {
      if (world.occupied(c)) {
        range = t;
        hit = true;
        return false;
      }
      return true;
    });
    if (hit && sensor.range_noise > 0.0) range = std::clamp(range + sensor.range_noise * noise(rng), 0.0, sensor.max_range);
    scan.ranges[static_cast<std::size_t>(k)] = range;
    scan.hit[static_cast<std::size_t>(k)] = hit ? 1 : 0;
  }
  return scan;
}

std::size_t integrate_scan(OccupancyGrid& map, const Pose2& pose, const Scan& scan, const SensorModel& sensor) {
  enum : std::uint8_t { kUntouched = 0, kMiss = 1, kHit = 2 };
  const GridGeometry& geometry = map.geometry();
  std::vector<std::uint8_t> mark(geometry.cell_count(), kUntouched);
  std::vector<std::size_t> touched;
  touched.reserve(4096);

  const Eigen::Vector2d origin(pose.x(), pose.y());
  const std::size_t beams = std::min(scan.ranges.size(), static_cast<std::size_t>(sensor.beams));
  for (std::size_t k = 0; k < beams; ++k) {
    const double angle = pose.theta() + sensor.bearing(static_cast<int>(k));
    const bool hit = scan.hit[k] != 0;
    // A hit range lands on the obstacle's boundary; nudge it inside so the endpoint cell is the obstacle.
    const double range = scan.ranges[k] + (hit ? 1e-6 : 0.0);
    const Eigen::Vector2d end = origin + range * Eigen::Vector2d(std::cos(angle), std::sin(angle));
    const Cell end_cell = geometry.cell_of(end);
    trace_segment(geometry, origin, end, [&](Cell c, double) {
      const std::size_t idx = geometry.index(c);
      if (hit && c == end_cell) {
        if (mark[idx] == kUntouched) touched.push_back(idx);
        mark[idx] = kHit;
        return false;
      }
      if (mark[idx] == kUntouched) {
        mark[idx] = kMiss;
        touched.push_back(idx);
      }
      return true;
    });
  }

  std::size_t newly_known = 0;
  for (std::size_t idx : touched) {
    const bool was_known = map.known(idx);
    map.update(idx, mark[idx] == kHit ? sensor.hit_log_odds : sensor.miss_log_odds);
    if (!was_known && map.known(idx)) ++newly_known;
  }
  return newly_known;
}

}  // namespace stopslam::slam

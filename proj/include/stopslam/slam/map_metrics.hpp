#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "stopslam/core/pose2.hpp"
#include "stopslam/slam/occupancy_grid.hpp"
#include "stopslam/slam/world.hpp"

namespace stopslam::slam {

struct MapError {
  double rmse = 0.0;
  /// Maximum nearest-obstacle distance; reported as the run's mRMSE.
  double max_error = 0.0;
};

/// Ground-truth lookups shared by the per-step map metrics of one run.
class MapReference {
 public:
  /// `start` selects the reachable region: free cells 4-connected to it, plus the occupied
  /// cells 8-adjacent to that region. Throws ConfigError when `start` is not free.
  MapReference(const WorldModel& world, const Pose2& start);

  const GridGeometry& geometry() const { return geometry_; }
  /// Distance from each cell centre to the nearest ground-truth occupied cell centre, metres.
  const std::vector<double>& obstacle_distance() const { return obstacle_distance_; }
  const std::vector<unsigned char>& explorable() const { return explorable_; }
  std::size_t explorable_count() const { return explorable_count_; }
  double explorable_area() const { return static_cast<double>(explorable_count_) * geometry_.cell_area(); }

 private:
  GridGeometry geometry_;
  std::vector<double> obstacle_distance_;
  std::vector<unsigned char> explorable_;
  std::size_t explorable_count_ = 0;
};

/// For every known-occupied map cell, the distance from its centre to the nearest
/// ground-truth occupied cell centre; RMS and maximum of those distances. Empty when the map
/// has no known occupied cell. The map must share the world's geometry (ConfigError otherwise).
std::optional<MapError> map_error(const OccupancyGrid& map, const MapReference& reference);
std::optional<MapError> map_error(const OccupancyGrid& map, const WorldModel& world);

double known_area(const OccupancyGrid& map);

/// Known explorable cells over all explorable cells, in percent.
double coverage(const OccupancyGrid& map, const MapReference& reference);

}  // namespace stopslam::slam

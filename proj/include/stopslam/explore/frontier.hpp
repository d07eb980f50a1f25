#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "stopslam/slam/occupancy_grid.hpp"

namespace stopslam::explore {

struct FrontierCluster {
  /// Grid indices, ascending.
  std::vector<std::size_t> cells;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();

  std::size_t size() const { return cells.size(); }
};

/// Known-free cell with at least one unknown 4-neighbour.
bool is_frontier(const slam::OccupancyGrid& map, std::size_t index);

/// Maximal 8-connected groups of frontier cells with at least `min_cluster_size` cells,
/// largest first; ties by lower centroid x, then y.
std::vector<FrontierCluster> detect_frontiers(const slam::OccupancyGrid& map, std::size_t min_cluster_size = 5);

}  // namespace stopslam::explore

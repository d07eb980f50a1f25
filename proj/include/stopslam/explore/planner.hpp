#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "stopslam/core/pose2.hpp"
#include "stopslam/slam/occupancy_grid.hpp"

namespace stopslam::explore {

struct PlannerConfig {
  /// Cells whose centre is within this distance of a known obstacle's edge are blocked.
  double clearance = 0.15;
  /// Cells closer than this to a known obstacle cost extra.
  double inflation_radius = 0.35;
  /// Extra step cost factor inside the inflated band.
  double inflation_penalty = 10.0;
};

/// Per-cell traversal cost for one map snapshot: blocked for occupied or unknown cells and
/// for free cells inside the clearance.
class CostMap {
 public:
  CostMap(const slam::OccupancyGrid& map, const PlannerConfig& config = {});

  const slam::GridGeometry& geometry() const { return geometry_; }
  double cost(std::size_t index) const { return cost_[index]; }
  bool traversable(std::size_t index) const { return cost_[index] < kBlocked; }
  bool inflated(std::size_t index) const { return cost_[index] > 1.0 && traversable(index); }

  static constexpr double kBlocked = 1e30;

 private:
  slam::GridGeometry geometry_;
  std::vector<double> cost_;
};

struct Path {
  std::vector<Pose2> poses;
  double length = 0.0;
};

/// A* over traversable cells with 8-connectivity and the octile heuristic. Poses are cell
/// centres (the goal pose is the goal point itself), headed along the path. Returns nullopt
/// when the goal is unreachable. Throws DomainError when `start` is not in a known-free cell.
std::optional<Path> plan_path(const CostMap& costmap, const Pose2& start, const Eigen::Vector2d& goal);
std::optional<Path> plan_path(const slam::OccupancyGrid& map, const Pose2& start, const Eigen::Vector2d& goal,
                              const PlannerConfig& config = {});

}  // namespace stopslam::explore

#include "stopslam/explore/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "stopslam/core/errors.hpp"
#include "stopslam/slam/world.hpp"

namespace stopslam::explore {

using slam::Cell;
using slam::CellState;

CostMap::CostMap(const slam::OccupancyGrid& map, const PlannerConfig& config)
    : geometry_(map.geometry()), cost_(geometry_.cell_count(), kBlocked) {
  const std::size_t total = geometry_.cell_count();
  std::vector<unsigned char> obstacle(total, 0);
  for (std::size_t i = 0; i < total; ++i) obstacle[i] = map.state(i) == CellState::occupied ? 1 : 0;
  const auto distance = slam::distance_transform(geometry_.width, geometry_.height, obstacle);
  // Distances are between cell centres; the obstacle's edge is half a cell nearer.
  const double res = geometry_.resolution;
  for (std::size_t i = 0; i < total; ++i) {
    if (map.state(i) != CellState::free) continue;
    const double clearance = (distance[i] - 0.5) * res;
    if (clearance < config.clearance) continue;
    cost_[i] = clearance < config.inflation_radius ? 1.0 + config.inflation_penalty : 1.0;
  }
}

namespace {

struct OpenEntry {
  double f;
  std::size_t index;
  bool operator>(const OpenEntry& other) const {
    return f != other.f ? f > other.f : index > other.index;
  }
};

double octile(Cell a, Cell b) {
  const double dx = std::abs(a.x - b.x);
  const double dy = std::abs(a.y - b.y);
  return std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy);
}

}  // namespace

std::optional<Path> plan_path(const CostMap& costmap, const Pose2& start, const Eigen::Vector2d& goal) {
  const auto& g = costmap.geometry();
  const Eigen::Vector2d start_point(start.x(), start.y());
  const Cell s = g.cell_of(start_point);
  if (!g.contains(s) || !costmap.traversable(g.index(s))) {
    throw DomainError("planner start is not in known free space");
  }
  const Cell t = g.cell_of(goal);
  if (!g.contains(t) || !costmap.traversable(g.index(t))) return std::nullopt;

  Path path;
  if (s == t) {
    path.poses.push_back(start);
    return path;
  }

  const std::size_t total = g.cell_count();
  std::vector<double> best(total, CostMap::kBlocked);
  std::vector<std::size_t> parent(total, total);
  std::vector<unsigned char> closed(total, 0);
  std::priority_queue<OpenEntry, std::vector<OpenEntry>, std::greater<>> open;
  const std::size_t start_idx = g.index(s);
  const std::size_t goal_idx = g.index(t);
  best[start_idx] = 0.0;
  open.push({octile(s, t), start_idx});

  bool found = false;
  while (!open.empty()) {
    const OpenEntry top = open.top();
    open.pop();
    if (closed[top.index]) continue;
    closed[top.index] = 1;
    if (top.index == goal_idx) {
      found = true;
      break;
    }
    const Cell c = g.cell_at(top.index);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        const Cell nb{c.x + dx, c.y + dy};
        if (!g.contains(nb)) continue;
        const std::size_t n = g.index(nb);
        if (closed[n] || !costmap.traversable(n)) continue;
        // No corner cutting past blocked cells.
        if (dx != 0 && dy != 0 &&
            (!costmap.traversable(g.index({c.x + dx, c.y})) || !costmap.traversable(g.index({c.x, c.y + dy})))) {
          continue;
        }
        const double step = (dx != 0 && dy != 0) ? std::sqrt(2.0) : 1.0;
        const double candidate = best[top.index] + step * costmap.cost(n);
        if (candidate < best[n]) {
          best[n] = candidate;
          parent[n] = top.index;
          open.push({candidate + octile(nb, t), n});
        }
      }
    }
  }
  if (!found) return std::nullopt;

  std::vector<Eigen::Vector2d> points;
  for (std::size_t at = parent[goal_idx]; at != start_idx; at = parent[at]) points.push_back(g.center(g.cell_at(at)));
  points.push_back(start_point);
  std::reverse(points.begin(), points.end());
  points.push_back(goal);

  path.poses.reserve(points.size());
  double heading = start.theta();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i + 1 < points.size()) {
      const Eigen::Vector2d d = points[i + 1] - points[i];
      if (d.norm() > 0.0) heading = std::atan2(d.y(), d.x());
      path.length += d.norm();
    }
    path.poses.emplace_back(points[i].x(), points[i].y(), heading);
  }
  return path;
}

std::optional<Path> plan_path(const slam::OccupancyGrid& map, const Pose2& start, const Eigen::Vector2d& goal,
                              const PlannerConfig& config) {
  return plan_path(CostMap(map, config), start, goal);
}

}  // namespace stopslam::explore

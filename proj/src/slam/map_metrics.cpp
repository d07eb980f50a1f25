#include "stopslam/slam/map_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "stopslam/core/errors.hpp"

namespace stopslam::slam {

MapReference::MapReference(const WorldModel& world, const Pose2& start)
    : geometry_(world.geometry()), obstacle_distance_(world.obstacle_distance()), explorable_(geometry_.cell_count(), 0) {
  const Cell seed = geometry_.cell_of({start.x(), start.y()});
  if (world.occupied(seed)) throw ConfigError("start pose is not in free space");

  std::vector<unsigned char> reached(geometry_.cell_count(), 0);
  std::deque<Cell> queue{seed};
  reached[geometry_.index(seed)] = 1;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    for (const Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
      const Cell nb{c.x + d.x, c.y + d.y};
      if (!geometry_.contains(nb) || world.occupied(nb)) continue;
      const std::size_t idx = geometry_.index(nb);
      if (reached[idx]) continue;
      reached[idx] = 1;
      queue.push_back(nb);
    }
  }
  for (std::size_t i = 0; i < reached.size(); ++i) {
    if (!reached[i]) continue;
    explorable_[i] = 1;
    const Cell c = geometry_.cell_at(i);
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const Cell nb{c.x + dx, c.y + dy};
        if (geometry_.contains(nb) && world.occupied(nb)) explorable_[geometry_.index(nb)] = 1;
      }
    }
  }
  explorable_count_ = static_cast<std::size_t>(std::count(explorable_.begin(), explorable_.end(), 1));
}

namespace {

std::optional<MapError> nearest_obstacle_error(const OccupancyGrid& map, const std::vector<double>& dist) {
  double sum_sq = 0.0;
  double worst = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (map.state(i) != CellState::occupied) continue;
    sum_sq += dist[i] * dist[i];
    worst = std::max(worst, dist[i]);
    ++count;
  }
  if (count == 0) return std::nullopt;
  return MapError{std::sqrt(sum_sq / static_cast<double>(count)), worst};
}

}  // namespace

std::optional<MapError> map_error(const OccupancyGrid& map, const MapReference& reference) {
  if (!(map.geometry() == reference.geometry())) throw ConfigError("map and world geometries differ");
  return nearest_obstacle_error(map, reference.obstacle_distance());
}

std::optional<MapError> map_error(const OccupancyGrid& map, const WorldModel& world) {
  if (!(map.geometry() == world.geometry())) throw ConfigError("map and world geometries differ");
  return nearest_obstacle_error(map, world.obstacle_distance());
}

double known_area(const OccupancyGrid& map) { return map.known_area(); }

double coverage(const OccupancyGrid& map, const MapReference& reference) {
  if (!(map.geometry() == reference.geometry())) throw ConfigError("map and world geometries differ");
  if (reference.explorable_count() == 0) return 0.0;
  std::size_t known = 0;
  const auto& mask = reference.explorable();
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && map.known(i)) ++known;
  }
  return 100.0 * static_cast<double>(known) / static_cast<double>(reference.explorable_count());
}

}  // namespace stopslam::slam

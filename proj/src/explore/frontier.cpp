#include "stopslam/explore/frontier.hpp"

#include <algorithm>
#include <deque>

namespace stopslam::explore {

using slam::Cell;
using slam::CellState;

bool is_frontier(const slam::OccupancyGrid& map, std::size_t index) {
  if (map.state(index) != CellState::free) return false;
  const Cell c = map.geometry().cell_at(index);
  for (const Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
    const Cell nb{c.x + d.x, c.y + d.y};
    if (map.geometry().contains(nb) && map.state(nb) == CellState::unknown) return true;
  }
  return false;
}

std::vector<FrontierCluster> detect_frontiers(const slam::OccupancyGrid& map, std::size_t min_cluster_size) {
  const auto& geometry = map.geometry();
  const std::size_t total = geometry.cell_count();
  std::vector<unsigned char> frontier(total, 0);
  for (std::size_t i = 0; i < total; ++i) frontier[i] = is_frontier(map, i) ? 1 : 0;

  std::vector<FrontierCluster> clusters;
  std::vector<unsigned char> seen(total, 0);
  for (std::size_t start = 0; start < total; ++start) {
    if (!frontier[start] || seen[start]) continue;
    FrontierCluster cluster;
    std::deque<std::size_t> queue{start};
    seen[start] = 1;
    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      cluster.cells.push_back(idx);
      const Cell c = geometry.cell_at(idx);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const Cell nb{c.x + dx, c.y + dy};
          if ((dx == 0 && dy == 0) || !geometry.contains(nb)) continue;
          const std::size_t n = geometry.index(nb);
          if (frontier[n] && !seen[n]) {
            seen[n] = 1;
            queue.push_back(n);
          }
        }
      }
    }
    if (cluster.size() < min_cluster_size) continue;
    std::sort(cluster.cells.begin(), cluster.cells.end());
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (std::size_t idx : cluster.cells) sum += geometry.center(geometry.cell_at(idx));
    cluster.centroid = sum / static_cast<double>(cluster.size());
    clusters.push_back(std::move(cluster));
  }
  std::stable_sort(clusters.begin(), clusters.end(), [](const FrontierCluster& a, const FrontierCluster& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    if (a.centroid.x() != b.centroid.x()) return a.centroid.x() < b.centroid.x();
    return a.centroid.y() < b.centroid.y();
  });
  return clusters;
}

}  // namespace stopslam::explore

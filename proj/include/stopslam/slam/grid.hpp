#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include <Eigen/Core>

namespace stopslam::slam {

struct Cell {
  int x = 0;
  int y = 0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

/// Axis-aligned raster: cell (0,0) has its lower-left corner at `origin`.
struct GridGeometry {
  int width = 0;
  int height = 0;
  double resolution = 0.05;
  Eigen::Vector2d origin = Eigen::Vector2d::Zero();

  std::size_t cell_count() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
  bool contains(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }
  std::size_t index(Cell c) const {
    return static_cast<std::size_t>(c.y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(c.x);
  }
  Cell cell_at(std::size_t index) const {
    return {static_cast<int>(index % static_cast<std::size_t>(width)), static_cast<int>(index / static_cast<std::size_t>(width))};
  }
  /// Unclamped cell containing a point.
  Cell cell_of(const Eigen::Vector2d& p) const {
    return {static_cast<int>(std::floor((p.x() - origin.x()) / resolution)),
            static_cast<int>(std::floor((p.y() - origin.y()) / resolution))};
  }
  Eigen::Vector2d center(Cell c) const {
    return {origin.x() + (c.x + 0.5) * resolution, origin.y() + (c.y + 0.5) * resolution};
  }
  double cell_area() const { return resolution * resolution; }

  friend bool operator==(const GridGeometry&, const GridGeometry&) = default;
};

/// Visits the cells crossed by the segment from `from` to `to` in order (Amanatides-Woo
/// traversal). The visitor receives the cell and the ray parameter in metres at which the
/// segment enters it, and returns false to stop. Cells outside the grid end the walk.
template <typename Visitor>
void trace_segment(const GridGeometry& grid, const Eigen::Vector2d& from, const Eigen::Vector2d& to, Visitor&& visit) {
  const Eigen::Vector2d delta = to - from;
  const double length = delta.norm();
  Cell cell = grid.cell_of(from);
  const Cell last = grid.cell_of(to);
  if (!grid.contains(cell)) return;
  if (!visit(cell, 0.0)) return;
  if (length == 0.0 || cell == last) return;

  const Eigen::Vector2d dir = delta / length;
  const int step_x = dir.x() > 0 ? 1 : (dir.x() < 0 ? -1 : 0);
  const int step_y = dir.y() > 0 ? 1 : (dir.y() < 0 ? -1 : 0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const double res = grid.resolution;
  auto boundary = [&](int c, int step, double origin) { return origin + (c + (step > 0 ? 1 : 0)) * res; };
  double t_max_x = step_x != 0 ? (boundary(cell.x, step_x, grid.origin.x()) - from.x()) / dir.x() : kInf;
  double t_max_y = step_y != 0 ? (boundary(cell.y, step_y, grid.origin.y()) - from.y()) / dir.y() : kInf;
  const double t_delta_x = step_x != 0 ? res / std::abs(dir.x()) : kInf;
  const double t_delta_y = step_y != 0 ? res / std::abs(dir.y()) : kInf;

  while (true) {
    double t_enter = 0.0;
    if (t_max_x < t_max_y) {
      t_enter = t_max_x;
      cell.x += step_x;
      t_max_x += t_delta_x;
    } else {
      t_enter = t_max_y;
      cell.y += step_y;
      t_max_y += t_delta_y;
    }
    if (t_enter > length || !grid.contains(cell)) return;
    if (!visit(cell, t_enter)) return;
    if (cell == last) return;
  }
}

}  // namespace stopslam::slam

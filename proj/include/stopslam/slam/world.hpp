#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "stopslam/core/pose2.hpp"
#include "stopslam/slam/grid.hpp"

namespace stopslam::slam {

/// Ground-truth environment: a closed boolean occupancy raster.
///
/// File format: first line `resolution <metres>`, then one text row per grid row, top row
/// first, `#` occupied and `.` free. All rows must have equal width and every border cell
/// must be occupied.
class WorldModel {
 public:
  WorldModel(GridGeometry geometry, std::vector<unsigned char> cells);

  static WorldModel parse(std::istream& in);
  static WorldModel load(const std::filesystem::path& path);

  const GridGeometry& geometry() const { return geometry_; }
  Pose2 origin() const { return {geometry_.origin.x(), geometry_.origin.y(), 0.0}; }
  bool occupied(Cell c) const { return !geometry_.contains(c) || occupied_[geometry_.index(c)] != 0; }
  bool occupied_at(const Eigen::Vector2d& p) const { return occupied(geometry_.cell_of(p)); }
  /// True when any occupied cell centre lies within `radius` of `p` (or p's own cell is occupied).
  bool collides(const Eigen::Vector2d& p, double radius) const;

  /// Free cell with the largest clearance from obstacles (lowest index on ties), heading 0.
  Pose2 default_start() const;
  /// Distance in metres from each cell centre to the nearest occupied cell centre.
  std::vector<double> obstacle_distance() const;

 private:
  GridGeometry geometry_;
  std::vector<unsigned char> occupied_;
};

/// Exact Euclidean distance transform (in cells) of a binary raster: for every cell, the
/// distance to the nearest cell whose `seed` flag is set. Cells are +inf when no seed exists.
std::vector<double> distance_transform(int width, int height, const std::vector<unsigned char>& seed);

}  // namespace stopslam::slam

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "stopslam/slam/grid.hpp"

namespace stopslam::slam {

enum class CellState : std::uint8_t { unknown, free, occupied };

struct OccupancyParams {
  /// Cells with |log-odds| above this are known: P(occ) outside [0.35, 0.65].
  double known_threshold = std::log(0.65 / 0.35);
  double max_log_odds = 10.0;
};

/// Log-odds occupancy map.
class OccupancyGrid {
 public:
  OccupancyGrid(GridGeometry geometry, OccupancyParams params = {});

  const GridGeometry& geometry() const { return geometry_; }
  const OccupancyParams& params() const { return params_; }

  double log_odds(Cell c) const { return log_odds_[geometry_.index(c)]; }
  double log_odds(std::size_t index) const { return log_odds_[index]; }
  /// Adds `delta` and clamps to [-max, +max].
  void update(std::size_t index, double delta);

  CellState state(std::size_t index) const;
  CellState state(Cell c) const { return geometry_.contains(c) ? state(geometry_.index(c)) : CellState::unknown; }
  bool known(std::size_t index) const { return state(index) != CellState::unknown; }

  std::size_t known_cell_count() const;
  /// Known cells (free or occupied) times the cell area, in m^2.
  double known_area() const { return static_cast<double>(known_cell_count()) * geometry_.cell_area(); }

  void clear();

  friend bool operator==(const OccupancyGrid& a, const OccupancyGrid& b) {
    return a.geometry_ == b.geometry_ && a.log_odds_ == b.log_odds_;
  }

 private:
  GridGeometry geometry_;
  OccupancyParams params_;
  std::vector<double> log_odds_;
};

}  // namespace stopslam::slam

#include "stopslam/slam/occupancy_grid.hpp"

#include <algorithm>

#include "stopslam/core/errors.hpp"

namespace stopslam::slam {

OccupancyGrid::OccupancyGrid(GridGeometry geometry, OccupancyParams params)
    : geometry_(geometry), params_(params), log_odds_(geometry.cell_count(), 0.0) {
  if (!(params_.known_threshold >= 0.0) || !(params_.max_log_odds > params_.known_threshold)) {
    throw ConfigError("occupancy thresholds must satisfy 0 <= known_threshold < max_log_odds");
  }
}

void OccupancyGrid::update(std::size_t index, double delta) {
  double& l = log_odds_[index];
  l = std::clamp(l + delta, -params_.max_log_odds, params_.max_log_odds);
}

CellState OccupancyGrid::state(std::size_t index) const {
  const double l = log_odds_[index];
  if (l > params_.known_threshold) return CellState::occupied;
  if (l < -params_.known_threshold) return CellState::free;
  return CellState::unknown;
}

std::size_t OccupancyGrid::known_cell_count() const {
  const double tau = params_.known_threshold;
  return static_cast<std::size_t>(
      std::count_if(log_odds_.begin(), log_odds_.end(), [tau](double l) { return l > tau || l < -tau; }));
}

void OccupancyGrid::clear() { std::fill(log_odds_.begin(), log_odds_.end(), 0.0); }

}  // namespace stopslam::slam

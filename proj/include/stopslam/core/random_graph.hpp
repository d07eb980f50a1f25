#pragma once

#include <cstddef>
#include <random>

#include "stopslam/core/pose_graph.hpp"

namespace stopslam {

struct RandomGraphOptions {
  std::size_t nodes = 10;
  /// Extra edges beyond the spanning chain, drawn uniformly in [min_extra, max_extra].
  std::size_t min_extra_edges = 0;
  std::size_t max_extra_edges = 0;
  double min_weight = 1.0;
  double max_weight = 1.0;
  /// Every edge gets weight * I_3 when true; otherwise a random SPD matrix whose
  /// D-optimality equals the drawn weight.
  bool isotropic = true;
};

/// Connected pose graph shaped like a trajectory: node i joins an odometry edge from i-1,
/// extra edges join random non-adjacent pairs and are marked as loop closures. Node poses
/// follow a random walk and edge measurements are consistent with them.
PoseGraph random_connected_graph(const RandomGraphOptions& options, std::mt19937_64& rng);

}  // namespace stopslam

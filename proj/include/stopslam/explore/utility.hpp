#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "stopslam/core/pose_graph.hpp"
#include "stopslam/explore/frontier.hpp"
#include "stopslam/explore/planner.hpp"
#include "stopslam/slam/occupancy_grid.hpp"
#include "stopslam/slam/sensor.hpp"
#include "stopslam/slam/slam_state.hpp"

namespace stopslam::explore {

struct UtilityConfig {
  /// Weight of the normalized area term against the normalized graph term.
  double alpha = 1.0;
  std::size_t max_candidates = 10;
  std::size_t min_cluster_size = 5;
};

struct UtilityTerms {
  /// dopt_graph of the predicted graph.
  double graph = 0.0;
  /// Expected newly visible unknown area at the goal, m^2.
  double area = 0.0;
};

struct CandidateAction {
  std::size_t cluster_index = 0;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  Path path;
  PoseGraph predicted_graph;
  UtilityTerms terms;
  /// terms.graph + alpha * terms.area
  double utility = 0.0;
  /// Sum of min-max normalized terms over the evaluated set; the selection key.
  double score = 0.0;
};

/// Current graph extended along `path` under maximum-likelihood measurements: a node every
/// `node_min_translation` metres joined by nominal odometry edges, plus a loop closure (scan
/// match information) from a hallucinated node to the nearest existing node that the
/// closure detector would accept there.
PoseGraph hallucinate_graph(const PoseGraph& graph, const Path& path, const slam::SlamConfig& config);

/// Unknown map cells a scan from `viewpoint` would cross, treating unknown as free and
/// stopping at known obstacles, times the cell area.
double expected_visible_area(const slam::OccupancyGrid& map, const Pose2& viewpoint, const slam::SensorModel& sensor);

double utility(const UtilityTerms& terms, double alpha);

/// Min-max normalizes each term over the set (0 when a term is constant) and sums them with
/// weight `alpha` on the area term.
std::vector<double> normalized_scores(std::span<const UtilityTerms> terms, double alpha);

/// Index of the first maximum.
std::size_t argmax_first(std::span<const double> values);

/// Frontier cell closest to the cluster centroid (lowest index on ties).
Eigen::Vector2d cluster_goal(const slam::GridGeometry& geometry, const FrontierCluster& cluster);

/// Plans from `start` to each of the first `max_candidates` clusters, hallucinates its graph
/// and scores it. Unreachable clusters are dropped; the rest keep cluster order.
std::vector<CandidateAction> evaluate_candidates(const CostMap& costmap, const Pose2& start,
                                                 const slam::SlamState& state,
                                                 std::span<const FrontierCluster> clusters,
                                                 const UtilityConfig& config);

}  // namespace stopslam::explore

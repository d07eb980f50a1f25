#include "stopslam/explore/utility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stopslam/core/errors.hpp"
#include "stopslam/toed/dopt.hpp"

namespace stopslam::explore {

using slam::Cell;
using slam::CellState;

namespace {

// Pose at arc length `s` along the polyline, headed along the segment containing it.
Pose2 point_at(const Path& path, double s) {
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < path.poses.size(); ++i) {
    const Pose2& a = path.poses[i];
    const Pose2& b = path.poses[i + 1];
    const double seg = a.distance_to(b);
    if (seg > 0.0 && walked + seg >= s) {
      const double f = (s - walked) / seg;
      return {a.x() + f * (b.x() - a.x()), a.y() + f * (b.y() - a.y()), std::atan2(b.y() - a.y(), b.x() - a.x())};
    }
    walked += seg;
  }
  return path.poses.back();
}

}  // namespace

PoseGraph hallucinate_graph(const PoseGraph& graph, const Path& path, const slam::SlamConfig& config) {
  PoseGraph predicted = graph;
  if (path.poses.size() < 2 || !(path.length > 0.0) || graph.node_count() == 0) return predicted;
  const double spacing = config.node_min_translation > 0.0 ? config.node_min_translation : path.length;
  const auto count = static_cast<std::size_t>(std::floor(path.length / spacing + 1e-9));
  const InfoMatrix3 odometry = config.motion.odometry_info();
  const InfoMatrix3 closure = config.loop.info();
  const std::size_t real_nodes = graph.node_count();
  const int step = graph.nodes().back().step;
  std::optional<NodeId> last_closure;

  for (std::size_t k = 1; k <= count; ++k) {
    const Pose2 pose = point_at(path, static_cast<double>(k) * spacing);
    const NodeId prev = predicted.node_count() - 1;
    const NodeId id = predicted.add_node(pose, step);
    predicted.add_edge({prev, id, Pose2::between(predicted.node(prev).pose, pose), odometry, EdgeKind::odometry});

    if (last_closure && id < *last_closure + config.loop.min_interval) continue;
    std::optional<NodeId> best;
    double best_distance = 0.0;
    for (NodeId j = 0; j < real_nodes && j + config.loop.gap_min <= id; ++j) {
      const Pose2& old = graph.node(j).pose;
      const double d = pose.distance_to(old);
      if (d > config.loop.radius || std::abs(normalize_angle(pose.theta() - old.theta())) > config.loop.yaw_gate) {
        continue;
      }
      if (!best || d < best_distance) {
        best = j;
        best_distance = d;
      }
    }
    if (best) {
      predicted.add_edge({*best, id, Pose2::between(graph.node(*best).pose, pose), closure, EdgeKind::loop_closure});
      last_closure = id;
    }
  }
  return predicted;
}

double expected_visible_area(const slam::OccupancyGrid& map, const Pose2& viewpoint, const slam::SensorModel& sensor) {
  const auto& geometry = map.geometry();
  std::vector<unsigned char> counted(geometry.cell_count(), 0);
  std::size_t unknown = 0;
  const Eigen::Vector2d origin(viewpoint.x(), viewpoint.y());
  for (int k = 0; k < sensor.beams; ++k) {
    const double angle = viewpoint.theta() + sensor.bearing(k);
    const Eigen::Vector2d end = origin + sensor.max_range * Eigen::Vector2d(std::cos(angle), std::sin(angle));
    slam::trace_segment(geometry, origin, end, [&](Cell c, double) {
      const std::size_t idx = geometry.index(c);
      const CellState s = map.state(idx);
      if (s == CellState::occupied) return false;
      if (s == CellState::unknown && !counted[idx]) {
        counted[idx] = 1;
        ++unknown;
      }
      return true;
    });
  }
  return static_cast<double>(unknown) * geometry.cell_area();
}

double utility(const UtilityTerms& terms, double alpha) { return terms.graph + alpha * terms.area; }

std::vector<double> normalized_scores(std::span<const UtilityTerms> terms, double alpha) {
  std::vector<double> scores(terms.size(), 0.0);
  if (terms.empty()) return scores;
  auto [gmin, gmax] = std::minmax_element(terms.begin(), terms.end(),
                                          [](const UtilityTerms& a, const UtilityTerms& b) { return a.graph < b.graph; });
  auto [amin, amax] = std::minmax_element(terms.begin(), terms.end(),
                                          [](const UtilityTerms& a, const UtilityTerms& b) { return a.area < b.area; });
  const double g_lo = gmin->graph, g_span = gmax->graph - gmin->graph;
  const double a_lo = amin->area, a_span = amax->area - amin->area;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double g = g_span > 0.0 ? (terms[i].graph - g_lo) / g_span : 0.0;
    const double a = a_span > 0.0 ? (terms[i].area - a_lo) / a_span : 0.0;
    scores[i] = g + alpha * a;
  }
  return scores;
}

std::size_t argmax_first(std::span<const double> values) {
  if (values.empty()) throw ConfigError("argmax of an empty set");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Eigen::Vector2d cluster_goal(const slam::GridGeometry& geometry, const FrontierCluster& cluster) {
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d goal = cluster.centroid;
  for (std::size_t idx : cluster.cells) {
    const Eigen::Vector2d p = geometry.center(geometry.cell_at(idx));
    const double d = (p - cluster.centroid).squaredNorm();
    if (d < best) {
      best = d;
      goal = p;
    }
  }
  return goal;
}

std::vector<CandidateAction> evaluate_candidates(const CostMap& costmap, const Pose2& start,
                                                 const slam::SlamState& state,
                                                 std::span<const FrontierCluster> clusters,
                                                 const UtilityConfig& utility_config) {
  std::vector<CandidateAction> candidates;
  const std::size_t limit = std::min(clusters.size(), utility_config.max_candidates);
  candidates.reserve(limit);
  for (std::size_t i = 0; i < limit; ++i) {
    CandidateAction c;
    c.cluster_index = i;
    c.goal = cluster_goal(state.map().geometry(), clusters[i]);
    auto path = plan_path(costmap, start, c.goal);
    if (!path) continue;
    c.path = std::move(*path);
    c.predicted_graph = hallucinate_graph(state.graph(), c.path, state.config());
    Pose2 viewpoint = c.path.poses.back();
    if (c.path.poses.size() == 1) {
      const Eigen::Vector2d d = c.goal - Eigen::Vector2d(start.x(), start.y());
      viewpoint = Pose2(c.goal.x(), c.goal.y(), d.norm() > 0.0 ? std::atan2(d.y(), d.x()) : start.theta());
    }
    c.terms.graph = c.predicted_graph.node_count() < 2 ? 0.0 : toed::dopt_graph(c.predicted_graph);
    c.terms.area = expected_visible_area(state.map(), viewpoint, state.config().sensor);
    c.utility = utility(c.terms, utility_config.alpha);
    candidates.push_back(std::move(c));
  }
  std::vector<UtilityTerms> terms;
  for (const auto& c : candidates) terms.push_back(c.terms);
  const auto scores = normalized_scores(terms, utility_config.alpha);
  for (std::size_t i = 0; i < candidates.size(); ++i) candidates[i].score = scores[i];
  return candidates;
}

}  // namespace stopslam::explore

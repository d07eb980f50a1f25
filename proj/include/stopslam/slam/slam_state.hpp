#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "stopslam/core/pose_graph.hpp"
#include "stopslam/slam/occupancy_grid.hpp"
#include "stopslam/slam/optimizer.hpp"
#include "stopslam/slam/sensor.hpp"
#include "stopslam/slam/world.hpp"

namespace stopslam::slam {

struct VelocityCommand {
  double v = 0.0;      ///< m/s
  double omega = 0.0;  ///< rad/s
};

struct MotionModel {
  double v_max = 0.2;
  double omega_max = 0.8;
  /// Covariance of the noise added to each odometry edge measurement (x, y, theta).
  Eigen::Matrix3d odometry_covariance = Eigen::Vector3d(0.01 * 0.01, 0.01 * 0.01, 0.005 * 0.005).asDiagonal();

  void validate() const;
  /// Information matrix attached to odometry edges.
  InfoMatrix3 odometry_info() const { return InfoMatrix3::from_covariance(odometry_covariance); }
};

/// Exact unicycle kinematics over `dt` seconds.
Pose2 integrate_unicycle(const Pose2& pose, const VelocityCommand& command, double dt);

struct LoopClosureConfig {
  double radius = 1.0;
  double yaw_gate = 0.8;
  /// Minimum id gap between the current node and a closure candidate.
  std::size_t gap_min = 10;
  /// Minimum number of nodes between two accepted closures.
  std::size_t min_interval = 10;
  /// Scan-match noise, standard deviations (x, y, theta); information is diag(1/sigma^2).
  Eigen::Vector3d sigma = {0.05, 0.05, 0.025};

  InfoMatrix3 info() const {
    return InfoMatrix3::diagonal(1.0 / (sigma.x() * sigma.x()), 1.0 / (sigma.y() * sigma.y()),
                                 1.0 / (sigma.z() * sigma.z()));
  }
};

struct SlamConfig {
  SensorModel sensor;
  MotionModel motion;
  OccupancyParams occupancy;
  LoopClosureConfig loop;
  OptimizerOptions optimizer;
  /// A new graph node is created after this much translation or rotation since the last one.
  double node_min_translation = 0.3;
  double node_min_rotation = 0.3;
  /// Radius of the robot body used for collision checks against the ground truth.
  double body_radius = 0.1;
};

struct NewNode {
  PoseNode node;
  GraphEdge odometry;
};

struct TickOutcome {
  bool blocked = false;
  std::optional<NodeId> new_node;
  std::optional<GraphEdge> loop_closure;
  std::optional<OptimizationReport> optimization;
};

/// Simulated graph-SLAM: ground-truth robot, noisy odometry graph, keyframe scans, and the
/// occupancy map rebuilt from the scans at the current node estimates.
///
/// Node 0 is anchored at the start pose, so map and world share one frame.
class SlamState {
 public:
  /// Creates node 0 at `start` and integrates its first scan. Throws ConfigError when the
  /// start collides with the world.
  SlamState(std::shared_ptr<const WorldModel> world, SlamConfig config, const Pose2& start, std::uint64_t seed);

  /// Advances the true robot by exact unicycle kinematics. Commands beyond the motion limits
  /// are clamped with a warning. Motion that would collide with the world is refused. Once
  /// the accumulated motion passes the decimation thresholds, a node and an odometry edge
  /// (true relative motion plus Gaussian noise) are appended.
  std::optional<NewNode> step_odometry(VelocityCommand command, double dt, bool* blocked = nullptr);

  /// Scans from the true pose of the newest node and fuses the scan at its estimated pose.
  /// Returns the scan, which is stored for map rebuilds.
  const Scan& raycast_and_update();

  /// Nearest earlier node (id gap >= gap_min) within `radius` of the newest node's true pose
  /// and within `yaw_gate` in heading; ties go to the lower id. The edge measures the true
  /// relative pose plus scan-match noise. Does not modify the graph.
  std::optional<GraphEdge> detect_loop_closure(double radius, double yaw_gate);

  /// Adds a loop-closure edge and optimizes the graph; the map is rebuilt on next access.
  OptimizationReport close_loop(const GraphEdge& edge);

  /// One control tick: odometry, and at new nodes the scan, closure check, and optimization.
  TickOutcome tick(VelocityCommand command, double dt);

  /// Clears the map and replays every stored scan from the current node estimates.
  void rebuild_map() const;

  const PoseGraph& graph() const { return graph_; }
  /// Replays the scans first when a loop closure has moved the nodes since the last read.
  const OccupancyGrid& map() const;
  const WorldModel& world() const { return *world_; }
  const SlamConfig& config() const { return config_; }
  const Pose2& true_pose() const { return true_pose_; }
  const std::vector<Pose2>& true_node_poses() const { return true_node_poses_; }
  const std::vector<Scan>& scans() const { return scans_; }
  /// Newest node estimate composed with the motion since that node.
  Pose2 estimated_pose() const;
  std::size_t optimisation_count() const { return optimisation_count_; }
  /// Active-SLAM step index stamped on nodes created from now on.
  void set_active_step(int step) { active_step_ = step; }
  double sim_time() const { return static_cast<double>(sim_time_us_) / 1e6; }

 private:
  std::shared_ptr<const WorldModel> world_;
  SlamConfig config_;
  PoseGraph graph_;
  // Rebuilt lazily: several closures between two reads cost one replay.
  mutable OccupancyGrid map_;
  mutable bool map_stale_ = false;
  Pose2 true_pose_;
  Pose2 true_at_last_node_;
  std::vector<Pose2> true_node_poses_;
  std::vector<Scan> scans_;
  std::mt19937_64 rng_;
  std::size_t optimisation_count_ = 0;
  std::optional<NodeId> last_closure_node_;
  std::int64_t sim_time_us_ = 0;  // integer microseconds, no drift over long runs
  int active_step_ = 0;
};

}  // namespace stopslam::slam

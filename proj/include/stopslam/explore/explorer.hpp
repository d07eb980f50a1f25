#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "stopslam/explore/planner.hpp"
#include "stopslam/explore/utility.hpp"
#include "stopslam/slam/slam_state.hpp"

namespace stopslam::explore {

struct ExplorerConfig {
  UtilityConfig utility;
  PlannerConfig planner;
  /// Control period, s.
  double dt = 0.1;
  double goal_tolerance = 0.25;
  /// Pure-pursuit lookahead distance, m.
  double lookahead = 0.3;
  /// Turn in place while the lookahead bearing exceeds this, rad.
  double rotate_threshold = 0.6;
  /// A goal is abandoned after this many ticks without getting `progress_epsilon` closer.
  int stuck_ticks = 80;
  double progress_epsilon = 0.05;
  /// Replan from the current estimate every this many ticks.
  int replan_ticks = 30;
  /// Hard limit on ticks spent on one goal.
  int max_goal_ticks = 1500;
  /// Ticks spent reversing after a refused motion.
  int recovery_ticks = 5;
  /// Goals within this distance of an abandoned or reached goal are skipped.
  double blacklist_radius = 0.5;
  /// Goals tried per step before the step is reported abandoned.
  std::size_t max_attempts = 3;
  /// How far the planner start may be moved to reach known free space, m.
  double start_snap_radius = 0.3;

  void validate() const;
};

enum class StepResult { reached, abandoned, exhausted };

const char* to_string(StepResult result);

struct CandidateLog {
  std::size_t cluster_index = 0;
  std::size_t cluster_size = 0;
  Eigen::Vector2d goal = Eigen::Vector2d::Zero();
  double path_length = 0.0;
  UtilityTerms terms;
  double utility = 0.0;
  double score = 0.0;
};

struct StepOutcome {
  int step = 0;
  StepResult result = StepResult::exhausted;
  std::vector<CandidateLog> candidates;
  /// Index into `candidates` of the goal driven last.
  std::optional<std::size_t> selected;
  std::size_t attempts = 0;
  int ticks = 0;
  std::size_t loop_closures = 0;
};

/// Nearest traversable cell centre within `radius` of `point`, scanning rings outward.
std::optional<Eigen::Vector2d> nearest_traversable(const CostMap& costmap, const Eigen::Vector2d& point,
                                                   double radius);

/// Pure-pursuit command toward the path point `lookahead` metres ahead of the progress index.
slam::VelocityCommand pursue(const Pose2& pose, const Path& path, std::size_t& progress, const ExplorerConfig& config,
                             const slam::MotionModel& motion);

/// Owns the SLAM simulation and runs one active-SLAM step per call: detect frontiers,
/// evaluate candidates, drive to the best one.
class Explorer {
 public:
  Explorer(std::shared_ptr<const slam::WorldModel> world, slam::SlamConfig slam_config, ExplorerConfig config,
           const Pose2& start, std::uint64_t seed);

  /// Drives to the highest-scoring reachable frontier. An abandoned goal is blacklisted and
  /// the next best is tried. Without any reachable frontier the robot turns once in place
  /// and the step is reported exhausted.
  StepOutcome select_and_execute();

  const slam::SlamState& slam() const { return slam_; }
  const ExplorerConfig& config() const { return config_; }
  int steps() const { return step_; }
  const std::vector<Eigen::Vector2d>& blacklist() const { return blacklist_; }

 private:
  bool blacklisted(const Eigen::Vector2d& goal) const;
  /// Returns true when the goal was reached; the path may be replaced on replans.
  bool drive(const Eigen::Vector2d& goal, Path path, StepOutcome& outcome);
  void turn_in_place(StepOutcome& outcome);
  /// Returns true when the motion was refused by a collision.
  bool tick(const slam::VelocityCommand& command, StepOutcome& outcome);

  slam::SlamState slam_;
  ExplorerConfig config_;
  std::vector<Eigen::Vector2d> blacklist_;
  int step_ = 0;
};

}  // namespace stopslam::explore

#include "stopslam/explore/explorer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "stopslam/core/errors.hpp"

namespace stopslam::explore {

void ExplorerConfig::validate() const {
  if (!(dt > 0.0) || !(goal_tolerance > 0.0) || !(lookahead > 0.0)) {
    throw ConfigError("explorer dt, goal tolerance and lookahead must be positive");
  }
  if (stuck_ticks < 1 || replan_ticks < 1 || max_goal_ticks < 1 || max_attempts < 1) {
    throw ConfigError("explorer tick limits and attempts must be at least 1");
  }
  if (utility.alpha < 0.0 || utility.max_candidates < 1) throw ConfigError("bad utility settings");
}

const char* to_string(StepResult result) {
  switch (result) {
    case StepResult::reached: return "reached";
    case StepResult::abandoned: return "abandoned";
    case StepResult::exhausted: return "exhausted";
  }
  return "?";
}

std::optional<Eigen::Vector2d> nearest_traversable(const CostMap& costmap, const Eigen::Vector2d& point,
                                                   double radius) {
  const auto& g = costmap.geometry();
  const slam::Cell c = g.cell_of(point);
  if (g.contains(c) && costmap.traversable(g.index(c))) return g.center(c);
  const int rings = static_cast<int>(std::ceil(radius / g.resolution));
  std::optional<Eigen::Vector2d> best;
  double best_d = radius;
  for (int dy = -rings; dy <= rings; ++dy) {
    for (int dx = -rings; dx <= rings; ++dx) {
      const slam::Cell n{c.x + dx, c.y + dy};
      if (!g.contains(n) || !costmap.traversable(g.index(n))) continue;
      const double d = (g.center(n) - point).norm();
      if (d <= best_d) {
        if (best && d == best_d) continue;
        best = g.center(n);
        best_d = d;
      }
    }
  }
  return best;
}

slam::VelocityCommand pursue(const Pose2& pose, const Path& path, std::size_t& progress, const ExplorerConfig& config,
                             const slam::MotionModel& motion) {
  const Eigen::Vector2d here(pose.x(), pose.y());
  auto point = [&](std::size_t i) { return Eigen::Vector2d(path.poses[i].x(), path.poses[i].y()); };
  // Advance past waypoints already behind the robot.
  while (progress + 1 < path.poses.size() && (point(progress) - here).norm() < config.lookahead) ++progress;
  const Eigen::Vector2d target = point(progress);
  const Eigen::Vector2d d = target - here;
  const double distance = d.norm();
  if (distance < 1e-9) return {};
  const double alpha = normalize_angle(std::atan2(d.y(), d.x()) - pose.theta());
  if (std::abs(alpha) > config.rotate_threshold) return {0.0, std::copysign(motion.omega_max, alpha)};
  const double v = motion.v_max;
  const double omega = std::clamp(2.0 * v * std::sin(alpha) / distance, -motion.omega_max, motion.omega_max);
  return {v, omega};
}

Explorer::Explorer(std::shared_ptr<const slam::WorldModel> world, slam::SlamConfig slam_config, ExplorerConfig config,
                   const Pose2& start, std::uint64_t seed)
    : slam_(std::move(world), std::move(slam_config), start, seed), config_(std::move(config)) {
  config_.validate();
}

bool Explorer::blacklisted(const Eigen::Vector2d& goal) const {
  return std::any_of(blacklist_.begin(), blacklist_.end(),
                     [&](const Eigen::Vector2d& b) { return (b - goal).norm() < config_.blacklist_radius; });
}

bool Explorer::tick(const slam::VelocityCommand& command, StepOutcome& outcome) {
  const auto result = slam_.tick(command, config_.dt);
  ++outcome.ticks;
  if (result.loop_closure) ++outcome.loop_closures;
  return result.blocked;
}

void Explorer::turn_in_place(StepOutcome& outcome) {
  const double omega = slam_.config().motion.omega_max;
  const int ticks = static_cast<int>(std::ceil(2.0 * std::numbers::pi / (omega * config_.dt) - 1e-9));
  for (int i = 0; i < ticks; ++i) tick({0.0, omega}, outcome);
}

bool Explorer::drive(const Eigen::Vector2d& goal, Path path, StepOutcome& outcome) {
  std::size_t progress = 0;
  double best_distance = std::numeric_limits<double>::infinity();
  int since_progress = 0;
  for (int t = 0; t < config_.max_goal_ticks; ++t) {
    const Pose2 pose = slam_.estimated_pose();
    const double remaining = (Eigen::Vector2d(pose.x(), pose.y()) - goal).norm();
    if (remaining <= config_.goal_tolerance) return true;
    if (remaining < best_distance - config_.progress_epsilon) {
      best_distance = remaining;
      since_progress = 0;
    } else if (++since_progress >= config_.stuck_ticks) {
      return false;
    }
    if (t > 0 && t % config_.replan_ticks == 0) {
      const CostMap costmap(slam_.map(), config_.planner);
      if (auto from = nearest_traversable(costmap, {pose.x(), pose.y()}, config_.start_snap_radius)) {
        const Pose2 start(from->x(), from->y(), pose.theta());
        auto replanned = plan_path(costmap, start, goal);
        if (!replanned) return false;
        path = std::move(*replanned);
        progress = 0;
      }
    }
    if (tick(pursue(pose, path, progress, config_, slam_.config().motion), outcome)) {
      // Bumped into something the map does not show where the estimate thinks: back off and
      // replan on the next tick.
      for (int r = 0; r < config_.recovery_ticks; ++r) tick({-0.5 * slam_.config().motion.v_max, 0.0}, outcome);
      t += config_.recovery_ticks;
      t = (t / config_.replan_ticks + 1) * config_.replan_ticks - 1;
    }
  }
  return false;
}

StepOutcome Explorer::select_and_execute() {
  StepOutcome outcome;
  outcome.step = ++step_;
  slam_.set_active_step(step_);

  const auto clusters = detect_frontiers(slam_.map(), config_.utility.min_cluster_size);
  std::vector<FrontierCluster> open;
  for (const auto& c : clusters) {
    if (!blacklisted(cluster_goal(slam_.map().geometry(), c))) open.push_back(c);
  }

  // Plan from the nearest known-free cell when the estimate sits just outside free space.
  const CostMap costmap(slam_.map(), config_.planner);
  const Pose2 pose = slam_.estimated_pose();
  const auto from = nearest_traversable(costmap, {pose.x(), pose.y()}, config_.start_snap_radius);
  std::vector<CandidateAction> candidates;
  if (from && !open.empty()) {
    candidates = evaluate_candidates(costmap, Pose2(from->x(), from->y(), pose.theta()), slam_, open,
                                     config_.utility);
  }
  for (const auto& c : candidates) {
    outcome.candidates.push_back({c.cluster_index, open[c.cluster_index].size(), c.goal, c.path.length, c.terms,
                                  c.utility, c.score});
  }

  if (candidates.empty()) {
    turn_in_place(outcome);
    outcome.result = from || open.empty() ? StepResult::exhausted : StepResult::abandoned;
    return outcome;
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].score > candidates[b].score; });

  outcome.result = StepResult::abandoned;
  for (std::size_t k = 0; k < order.size() && k < config_.max_attempts; ++k) {
    const auto& c = candidates[order[k]];
    if (k > 0 && blacklisted(c.goal)) continue;
    outcome.selected = order[k];
    ++outcome.attempts;
    Path path = c.path;
    if (k > 0) {
      // The robot has moved since evaluation.
      const CostMap now(slam_.map(), config_.planner);
      const Pose2 p = slam_.estimated_pose();
      const auto snap = nearest_traversable(now, {p.x(), p.y()}, config_.start_snap_radius);
      if (!snap) break;
      auto replanned = plan_path(now, Pose2(snap->x(), snap->y(), p.theta()), c.goal);
      if (!replanned) {
        blacklist_.push_back(c.goal);
        continue;
      }
      path = std::move(*replanned);
    }
    const bool reached = drive(c.goal, std::move(path), outcome);
    blacklist_.push_back(c.goal);
    if (reached) {
      outcome.result = StepResult::reached;
      break;
    }
  }
  return outcome;
}

}  // namespace stopslam::explore

#include "stopslam/slam/slam_state.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include <Eigen/Cholesky>

#include "stopslam/core/errors.hpp"

namespace stopslam::slam {

namespace {

// Axes with variance at or below this are treated as noiseless.
constexpr double kNoiselessVariance = 1e-20;

Pose2 add_noise(const Pose2& p, const Eigen::Matrix3d& covariance, std::mt19937_64& rng) {
  if (covariance.cwiseAbs().maxCoeff() <= kNoiselessVariance) return p;
  std::normal_distribution<double> unit(0.0, 1.0);
  const Eigen::Vector3d z(unit(rng), unit(rng), unit(rng));
  Eigen::LLT<Eigen::Matrix3d> llt(covariance);
  const Eigen::Vector3d n = llt.matrixL() * z;
  return {p.x() + n.x(), p.y() + n.y(), p.theta() + n.z()};
}

}  // namespace

void MotionModel::validate() const {
  if (!(v_max > 0.0) || !(omega_max > 0.0)) throw ConfigError("velocity limits must be positive");
  Eigen::LDLT<Eigen::Matrix3d> ldlt(odometry_covariance);
  if (!odometry_covariance.isApprox(odometry_covariance.transpose()) || ldlt.info() != Eigen::Success ||
      !ldlt.isPositive()) {
    throw ConfigError("odometry noise covariance must be symmetric positive semidefinite");
  }
}

Pose2 integrate_unicycle(const Pose2& pose, const VelocityCommand& command, double dt) {
  const double th = pose.theta();
  const double dth = command.omega * dt;
  if (std::abs(command.omega) < 1e-12) {
    return {pose.x() + command.v * dt * std::cos(th), pose.y() + command.v * dt * std::sin(th), th};
  }
  const double r = command.v / command.omega;
  return {pose.x() + r * (std::sin(th + dth) - std::sin(th)), pose.y() - r * (std::cos(th + dth) - std::cos(th)),
          th + dth};
}

SlamState::SlamState(std::shared_ptr<const WorldModel> world, SlamConfig config, const Pose2& start, std::uint64_t seed)
    : world_(std::move(world)),
      config_(std::move(config)),
      map_(world_->geometry(), config_.occupancy),
      true_pose_(start),
      true_at_last_node_(start),
      rng_(seed) {
  config_.sensor.validate();
  config_.motion.validate();
  if (world_->collides({start.x(), start.y()}, config_.body_radius)) throw ConfigError("start pose collides with the world");
  graph_.add_node(start, 0);
  true_node_poses_.push_back(start);
  raycast_and_update();
}

Pose2 SlamState::estimated_pose() const {
  return graph_.nodes().back().pose * Pose2::between(true_at_last_node_, true_pose_);
}

std::optional<NewNode> SlamState::step_odometry(VelocityCommand command, double dt, bool* blocked) {
  const auto& motion = config_.motion;
  if (std::abs(command.v) > motion.v_max || std::abs(command.omega) > motion.omega_max) {
    std::clog << "warning: velocity command (" << command.v << ", " << command.omega << ") clamped to limits\n";
    command.v = std::clamp(command.v, -motion.v_max, motion.v_max);
    command.omega = std::clamp(command.omega, -motion.omega_max, motion.omega_max);
  }
  sim_time_us_ += std::llround(dt * 1e6);
  const Pose2 next = integrate_unicycle(true_pose_, command, dt);
  const bool refused = world_->collides({next.x(), next.y()}, config_.body_radius);
  if (blocked != nullptr) *blocked = refused;
  if (!refused) true_pose_ = next;

  const Pose2 relative = Pose2::between(true_at_last_node_, true_pose_);
  const bool moved_enough = std::hypot(relative.x(), relative.y()) >= config_.node_min_translation ||
                            std::abs(relative.theta()) >= config_.node_min_rotation;
  if (!moved_enough) return std::nullopt;

  const Pose2 measurement = add_noise(relative, motion.odometry_covariance, rng_);
  const NodeId prev = graph_.node_count() - 1;
  const Pose2 estimate = graph_.node(prev).pose * measurement;
  const NodeId id = graph_.add_node(estimate, active_step_);
  GraphEdge edge{prev, id, measurement, motion.odometry_info(), EdgeKind::odometry};
  graph_.add_edge(edge);
  true_node_poses_.push_back(true_pose_);
  true_at_last_node_ = true_pose_;
  return NewNode{graph_.node(id), edge};
}

const Scan& SlamState::raycast_and_update() {
  const NodeId id = graph_.node_count() - 1;
  scans_.push_back(simulate_scan(*world_, true_node_poses_[id], config_.sensor, rng_));
  if (!map_stale_) integrate_scan(map_, graph_.node(id).pose, scans_.back(), config_.sensor);
  return scans_.back();
}

std::optional<GraphEdge> SlamState::detect_loop_closure(double radius, double yaw_gate) {
  const std::size_t n = graph_.node_count();
  if (n < 2) return std::nullopt;
  const NodeId current = n - 1;
  const Pose2& here = true_node_poses_[current];
  std::optional<NodeId> best;
  double best_distance = 0.0;
  for (NodeId k = 0; k + config_.loop.gap_min <= current; ++k) {
    const Pose2& there = true_node_poses_[k];
    const double d = here.distance_to(there);
    if (d > radius || std::abs(normalize_angle(here.theta() - there.theta())) > yaw_gate) continue;
    if (!best || d < best_distance) {
      best = k;
      best_distance = d;
    }
  }
  if (!best) return std::nullopt;
  const Pose2 truth = Pose2::between(true_node_poses_[*best], here);
  const Eigen::Vector3d s = config_.loop.sigma;
  const Eigen::Matrix3d covariance = s.cwiseProduct(s).asDiagonal();
  return GraphEdge{*best, current, add_noise(truth, covariance, rng_), config_.loop.info(), EdgeKind::loop_closure};
}

OptimizationReport SlamState::close_loop(const GraphEdge& edge) {
  graph_.add_edge(edge);
  last_closure_node_ = edge.to_id;
  OptimizationReport report = optimize(graph_, config_.optimizer);
  ++optimisation_count_;
  map_stale_ = true;
  return report;
}

TickOutcome SlamState::tick(VelocityCommand command, double dt) {
  TickOutcome outcome;
  const auto node = step_odometry(command, dt, &outcome.blocked);
  if (!node) return outcome;
  outcome.new_node = node->node.id;
  raycast_and_update();
  const bool spaced = !last_closure_node_ || node->node.id >= *last_closure_node_ + config_.loop.min_interval;
  if (!spaced) return outcome;
  if (auto closure = detect_loop_closure(config_.loop.radius, config_.loop.yaw_gate)) {
    outcome.optimization = close_loop(*closure);
    outcome.loop_closure = closure;
  }
  return outcome;
}

const OccupancyGrid& SlamState::map() const {
  if (map_stale_) rebuild_map();
  return map_;
}

void SlamState::rebuild_map() const {
  map_stale_ = false;
  map_.clear();
  for (std::size_t i = 0; i < scans_.size(); ++i) integrate_scan(map_, graph_.node(i).pose, scans_[i], config_.sensor);
}

}  // namespace stopslam::slam

#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "stopslam/core/pose2.hpp"

namespace stopslam {

/// Symmetric positive semidefinite 3x3 information matrix of a relative-pose measurement.
class InfoMatrix3 {
 public:
  /// Zero information.
  InfoMatrix3() : m_(Eigen::Matrix3d::Zero()) {}

  /// Throws DomainError unless `m` is finite, symmetric (1e-12 relative) and PSD
  /// (eigenvalues >= -1e-12 * trace).
  explicit InfoMatrix3(const Eigen::Matrix3d& m);

  static InfoMatrix3 diagonal(double xx, double yy, double tt);
  static InfoMatrix3 isotropic(double gamma) { return diagonal(gamma, gamma, gamma); }
  /// Inverse of a positive-definite covariance.
  static InfoMatrix3 from_covariance(const Eigen::Matrix3d& covariance);

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  friend bool operator==(const InfoMatrix3& a, const InfoMatrix3& b) { return a.m_ == b.m_; }

 private:
  Eigen::Matrix3d m_;
};

using NodeId = std::size_t;

struct PoseNode {
  NodeId id = 0;
  Pose2 pose;
  int step = 0;

  friend bool operator==(const PoseNode&, const PoseNode&) = default;
};

enum class EdgeKind { odometry, loop_closure };

struct GraphEdge {
  NodeId from_id = 0;
  NodeId to_id = 0;
  /// Pose of `to` in the frame of `from`.
  Pose2 measurement;
  InfoMatrix3 info;
  EdgeKind kind = EdgeKind::odometry;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// SE(2) pose graph. Node ids are contiguous from 0; node 0 is the anchor.
/// Nodes and edges are append-only; node poses may be overwritten by an optimizer.
class PoseGraph {
 public:
  PoseGraph() = default;

  /// Appends a node and returns its id.
  NodeId add_node(const Pose2& pose, int step = 0);

  /// Throws ConfigError on unknown ids, self loops, or non-consecutive odometry edges.
  void add_edge(const GraphEdge& edge);

  void set_pose(NodeId id, const Pose2& pose);

  const std::vector<PoseNode>& nodes() const { return nodes_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const PoseNode& node(NodeId id) const { return nodes_.at(id); }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::size_t loop_closure_count() const;

  /// Every node reachable from node 0 over the union of all edges.
  bool is_connected() const;

  friend bool operator==(const PoseGraph&, const PoseGraph&) = default;

 private:
  std::vector<PoseNode> nodes_;
  std::vector<GraphEdge> edges_;
};

/// 2|E|/n.
double average_node_degree(const PoseGraph& graph);

}  // namespace stopslam

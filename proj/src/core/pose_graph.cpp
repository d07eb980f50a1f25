#include "stopslam/core/pose_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "stopslam/core/errors.hpp"

namespace stopslam {

InfoMatrix3::InfoMatrix3(const Eigen::Matrix3d& m) : m_(m) {
  if (!m.allFinite()) throw DomainError("information matrix has non-finite entries");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw DomainError("information matrix is not symmetric");
  }
  m_ = 0.5 * (m + m.transpose());
  const Eigen::Vector3d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m_, Eigen::EigenvaluesOnly).eigenvalues();
  if (eig.minCoeff() < -1e-12 * std::abs(m_.trace())) {
    throw DomainError("information matrix is not positive semidefinite");
  }
}

InfoMatrix3 InfoMatrix3::diagonal(double xx, double yy, double tt) {
  return InfoMatrix3(Eigen::Vector3d(xx, yy, tt).asDiagonal().toDenseMatrix());
}

InfoMatrix3 InfoMatrix3::from_covariance(const Eigen::Matrix3d& covariance) {
  Eigen::LLT<Eigen::Matrix3d> llt(covariance);
  if (llt.info() != Eigen::Success) throw DomainError("covariance is not positive definite");
  Eigen::Matrix3d info = llt.solve(Eigen::Matrix3d::Identity());
  info = 0.5 * (info + info.transpose()).eval();
  return InfoMatrix3(info);
}

NodeId PoseGraph::add_node(const Pose2& pose, int step) {
  const NodeId id = nodes_.size();
  nodes_.push_back({id, pose, step});
  return id;
}

void PoseGraph::add_edge(const GraphEdge& edge) {
  if (edge.from_id >= nodes_.size() || edge.to_id >= nodes_.size()) {
    throw ConfigError("edge " + std::to_string(edge.from_id) + "->" + std::to_string(edge.to_id) +
                      " references a missing node");
  }
  if (edge.from_id == edge.to_id) throw ConfigError("self-loop edge on node " + std::to_string(edge.from_id));
  if (edge.kind == EdgeKind::odometry && edge.to_id != edge.from_id + 1) {
    throw ConfigError("odometry edge must join consecutive nodes, got " + std::to_string(edge.from_id) + "->" +
                      std::to_string(edge.to_id));
  }
  edges_.push_back(edge);
}

void PoseGraph::set_pose(NodeId id, const Pose2& pose) { nodes_.at(id).pose = pose; }

std::size_t PoseGraph::loop_closure_count() const {
  return static_cast<std::size_t>(
      std::count_if(edges_.begin(), edges_.end(), [](const GraphEdge& e) { return e.kind == EdgeKind::loop_closure; }));
}

bool PoseGraph::is_connected() const {
  if (nodes_.empty()) return true;
  std::vector<std::size_t> parent(nodes_.size());
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t components = nodes_.size();
  for (const auto& e : edges_) {
    const auto a = find(e.from_id);
    const auto b = find(e.to_id);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components == 1;
}

double average_node_degree(const PoseGraph& graph) {
  if (graph.node_count() == 0) return 0.0;
  return 2.0 * static_cast<double>(graph.edge_count()) / static_cast<double>(graph.node_count());
}

}  // namespace stopslam

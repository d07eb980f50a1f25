#include "stopslam/slam/optimizer.hpp"

#include <array>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "stopslam/core/errors.hpp"

namespace stopslam::slam {

namespace {

Eigen::Matrix2d rotation(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return (Eigen::Matrix2d() << c, -s, s, c).finished();
}

Eigen::Vector3d residual(const Pose2& xi, const Pose2& xj, const Pose2& z) {
  const Eigen::Matrix2d ri = rotation(xi.theta());
  const Eigen::Matrix2d rz = rotation(z.theta());
  const Eigen::Vector2d dt(xj.x() - xi.x(), xj.y() - xi.y());
  const Eigen::Vector2d et = rz.transpose() * (ri.transpose() * dt - Eigen::Vector2d(z.x(), z.y()));
  return {et.x(), et.y(), normalize_angle(xj.theta() - xi.theta() - z.theta())};
}

double total_chi2(const std::vector<Pose2>& poses, const PoseGraph& graph) {
  double sum = 0.0;
  for (const auto& e : graph.edges()) {
    const Eigen::Vector3d r = residual(poses[e.from_id], poses[e.to_id], e.measurement);
    sum += r.dot(e.info.matrix() * r);
  }
  return sum;
}

std::vector<Pose2> current_poses(const PoseGraph& graph) {
  std::vector<Pose2> poses;
  poses.reserve(graph.node_count());
  for (const auto& n : graph.nodes()) poses.push_back(n.pose);
  return poses;
}

std::vector<Pose2> apply(const std::vector<Pose2>& poses, const Eigen::VectorXd& dx, double scale) {
  std::vector<Pose2> out = poses;
  for (std::size_t k = 1; k < out.size(); ++k) {
    const auto b = static_cast<Eigen::Index>(3 * (k - 1));
    out[k] = Pose2(poses[k].x() + scale * dx[b], poses[k].y() + scale * dx[b + 1], poses[k].theta() + scale * dx[b + 2]);
  }
  return out;
}

}  // namespace

double chi2(const PoseGraph& graph) { return total_chi2(current_poses(graph), graph); }

OptimizationReport optimize(PoseGraph& graph, const OptimizerOptions& options) {
  OptimizationReport report;
  std::vector<Pose2> poses = current_poses(graph);
  double current = total_chi2(poses, graph);
  report.initial_chi2 = current;
  report.chi2_history.push_back(current);
  const std::size_t n = graph.node_count();
  if (n < 2) {
    report.final_chi2 = current;
    report.converged = true;
    return report;
  }
  const auto dim = static_cast<Eigen::Index>(3 * (n - 1));
  const auto block = [](NodeId id) { return static_cast<Eigen::Index>(3 * (id - 1)); };

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(graph.edge_count() * 36 + static_cast<std::size_t>(dim));
    Eigen::VectorXd gradient = Eigen::VectorXd::Zero(dim);
    for (const auto& e : graph.edges()) {
      const Pose2& xi = poses[e.from_id];
      const Pose2& xj = poses[e.to_id];
      const Eigen::Vector3d r = residual(xi, xj, e.measurement);
      const Eigen::Matrix2d ri = rotation(xi.theta());
      const Eigen::Matrix2d rz = rotation(e.measurement.theta());
      const Eigen::Matrix2d dri = (Eigen::Matrix2d() << -std::sin(xi.theta()), -std::cos(xi.theta()),
                                   std::cos(xi.theta()), -std::sin(xi.theta()))
                                      .finished();
      const Eigen::Vector2d dt(xj.x() - xi.x(), xj.y() - xi.y());

      Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
      Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
      a.topLeftCorner<2, 2>() = -rz.transpose() * ri.transpose();
      a.topRightCorner<2, 1>() = rz.transpose() * dri.transpose() * dt;
      a(2, 2) = -1.0;
      b.topLeftCorner<2, 2>() = rz.transpose() * ri.transpose();
      b(2, 2) = 1.0;

      const Eigen::Matrix3d& omega = e.info.matrix();
      const std::array<std::pair<NodeId, Eigen::Matrix3d>, 2> jac{{{e.from_id, a}, {e.to_id, b}}};
      for (const auto& [id_r, j_r] : jac) {
        if (id_r == 0) continue;
        gradient.segment<3>(block(id_r)) += j_r.transpose() * omega * r;
        for (const auto& [id_c, j_c] : jac) {
          if (id_c == 0) continue;
          const Eigen::Matrix3d h = j_r.transpose() * omega * j_c;
          for (int rr = 0; rr < 3; ++rr) {
            for (int cc = 0; cc < 3; ++cc) triplets.emplace_back(block(id_r) + rr, block(id_c) + cc, h(rr, cc));
          }
        }
      }
    }
    Eigen::SparseMatrix<double> hessian(dim, dim);
    hessian.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(hessian);
    if (solver.info() != Eigen::Success) throw DisconnectedGraphError("pose-graph normal equations are singular");
    const Eigen::VectorXd dx = solver.solve(-gradient);
    if (solver.info() != Eigen::Success || !dx.allFinite()) {
      throw DisconnectedGraphError("pose-graph normal equations are singular");
    }

    report.iterations = iter + 1;
    double scale = 1.0;
    bool accepted = false;
    for (int halving = 0; halving <= 10; ++halving, scale *= 0.5) {
      std::vector<Pose2> trial = apply(poses, dx, scale);
      const double value = total_chi2(trial, graph);
      if (value <= current) {
        poses = std::move(trial);
        current = value;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // No descent along the Gauss-Newton direction: this is a stationary point up to round-off.
      report.converged = dx.norm() < std::sqrt(options.update_tolerance);
      break;
    }
    report.chi2_history.push_back(current);
    if (scale * dx.norm() < options.update_tolerance) {
      report.converged = true;
      break;
    }
  }
  for (std::size_t k = 1; k < n; ++k) graph.set_pose(k, poses[k]);
  report.final_chi2 = current;
  return report;
}

}  // namespace stopslam::slam

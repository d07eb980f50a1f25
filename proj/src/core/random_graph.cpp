#include "stopslam/core/random_graph.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "stopslam/core/errors.hpp"

namespace stopslam {

namespace {

InfoMatrix3 random_info(double gamma, bool isotropic, std::mt19937_64& rng) {
  if (isotropic) return InfoMatrix3::isotropic(gamma);
  std::uniform_real_distribution<double> spread(0.25, 4.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  const double a = spread(rng);
  const double b = spread(rng);
  // Eigenvalues gamma * (a, b, 1/(ab)) have geometric mean gamma.
  const Eigen::Vector3d eig(gamma * a, gamma * b, gamma / (a * b));
  const Eigen::Matrix3d q =
      (Eigen::AngleAxisd(angle(rng), Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(angle(rng), Eigen::Vector3d::UnitX()))
          .toRotationMatrix();
  Eigen::Matrix3d m = q * eig.asDiagonal() * q.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  return InfoMatrix3(m);
}

}  // namespace

PoseGraph random_connected_graph(const RandomGraphOptions& options, std::mt19937_64& rng) {
  if (options.nodes < 1) throw ConfigError("random graph needs at least one node");
  if (options.min_extra_edges > options.max_extra_edges || options.min_weight > options.max_weight ||
      options.min_weight < 0.0) {
    throw ConfigError("random graph options out of order");
  }
  std::uniform_real_distribution<double> step(-1.0, 1.0);
  std::uniform_real_distribution<double> weight(options.min_weight, options.max_weight);

  PoseGraph graph;
  Pose2 pose;
  graph.add_node(pose);
  for (std::size_t i = 1; i < options.nodes; ++i) {
    const Pose2 delta(0.5 + 0.5 * step(rng), 0.3 * step(rng), 0.5 * step(rng));
    pose = pose * delta;
    graph.add_node(pose, static_cast<int>(i));
    graph.add_edge({i - 1, i, delta, random_info(weight(rng), options.isotropic, rng), EdgeKind::odometry});
  }

  const std::size_t n = options.nodes;
  if (n < 3) return graph;
  std::uniform_int_distribution<std::size_t> extra_count(options.min_extra_edges, options.max_extra_edges);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t extra = extra_count(rng);
  for (std::size_t k = 0; k < extra; ++k) {
    std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    while (a == b || (a > b ? a - b : b - a) == 1) {
      a = pick(rng);
      b = pick(rng);
    }
    if (a > b) std::swap(a, b);
    const Pose2 measurement = Pose2::between(graph.node(a).pose, graph.node(b).pose);
    graph.add_edge({a, b, measurement, random_info(weight(rng), options.isotropic, rng), EdgeKind::loop_closure});
  }
  return graph;
}

}  // namespace stopslam

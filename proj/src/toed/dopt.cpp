#include "stopslam/toed/dopt.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "stopslam/core/errors.hpp"
#include "stopslam/core/laplacian.hpp"

namespace stopslam::toed {

namespace {

constexpr double kClampRatio = 1e-12;

}  // namespace

Spectrum compute_spectrum(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DomainError("matrix is not square");
  if (m.size() == 0) throw DomainError("matrix is empty");
  if (!m.allFinite()) throw DomainError("matrix has non-finite entries");
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) throw DomainError("matrix is not symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw DomainError("eigen decomposition failed");
  const Eigen::VectorXd& values = solver.eigenvalues();

  Spectrum out;
  out.eigenvalues.assign(values.data(), values.data() + values.size());
  const double lambda_max = std::max(out.eigenvalues.back(), 0.0);
  for (double& lambda : out.eigenvalues) {
    if (lambda < -kClampRatio * lambda_max) throw DomainError("matrix is not positive semidefinite");
    if (lambda < 0.0) lambda = 0.0;
  }
  return out;
}

double dopt_spectrum(const Spectrum& spectrum) {
  if (spectrum.eigenvalues.empty()) throw DomainError("empty spectrum");
  const double lambda_max = spectrum.eigenvalues.back();
  if (!(lambda_max > 0.0)) return 0.0;
  double sum_log = 0.0;
  for (double lambda : spectrum.eigenvalues) {
    if (lambda <= kClampRatio * lambda_max) return 0.0;
    sum_log += std::log(lambda);
  }
  return std::exp(sum_log / static_cast<double>(spectrum.dimension()));
}

double dopt_matrix(const Eigen::MatrixXd& m) { return dopt_spectrum(compute_spectrum(m)); }

double edge_weight(const InfoMatrix3& info) { return dopt_matrix(info.matrix()); }

std::vector<double> edge_weights(const PoseGraph& graph) {
  std::vector<double> weights;
  weights.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) weights.push_back(edge_weight(e.info));
  return weights;
}

double dopt_graph(const PoseGraph& graph) {
  const std::size_t n = graph.node_count();
  if (n < 2) throw ConfigError("graph D-optimality needs at least two nodes");
  const auto weights = edge_weights(graph);
  const WeightedLaplacian laplacian = build_weighted_laplacian(graph, weights);
  const double log_t = log_weighted_spanning_trees(laplacian);
  return std::exp((std::log(static_cast<double>(n)) + log_t) / static_cast<double>(n));
}

Eigen::MatrixXd assemble_fim(const PoseGraph& graph) {
  const std::size_t n = graph.node_count();
  if (n < 2) throw ConfigError("system FIM needs at least two nodes");
  const auto dim = static_cast<Eigen::Index>(3 * (n - 1));
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(dim, dim);
  // Node k > 0 owns block row/column 3(k-1); the anchor has none.
  const auto block = [](NodeId id) { return static_cast<Eigen::Index>(3 * (id - 1)); };
  for (const auto& e : graph.edges()) {
    const Eigen::Matrix3d& phi = e.info.matrix();
    const bool a_free = e.from_id != 0;
    const bool b_free = e.to_id != 0;
    if (a_free) y.block<3, 3>(block(e.from_id), block(e.from_id)) += phi;
    if (b_free) y.block<3, 3>(block(e.to_id), block(e.to_id)) += phi;
    if (a_free && b_free) {
      y.block<3, 3>(block(e.from_id), block(e.to_id)) -= phi;
      y.block<3, 3>(block(e.to_id), block(e.from_id)) -= phi;
    }
  }
  return y;
}

double dopt_exact(const PoseGraph& graph) {
  if (!graph.is_connected()) throw DisconnectedGraphError("system FIM of a disconnected graph is singular");
  return dopt_matrix(assemble_fim(graph));
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      fmt::print(out, "{:.17g}", m(r, c));
    }
    out << '\n';
  }
}

}  // namespace stopslam::toed

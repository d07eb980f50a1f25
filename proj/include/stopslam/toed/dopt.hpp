#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "stopslam/core/pose_graph.hpp"

namespace stopslam::toed {

/// Eigenvalues of a symmetric PSD matrix, ascending, with round-off negatives
/// (above -1e-12 * lambda_max) clamped to zero.
struct Spectrum {
  std::vector<double> eigenvalues;

  std::size_t dimension() const { return eigenvalues.size(); }
};

/// Throws DomainError on non-finite entries, asymmetry beyond 1e-9 relative, or an
/// eigenvalue below -1e-12 * lambda_max.
Spectrum compute_spectrum(const Eigen::MatrixXd& m);

/// Geometric mean of the eigenvalues, exp((1/d) * sum log lambda_k). Exactly 0 when any
/// eigenvalue is at or below 1e-12 * lambda_max.
double dopt_matrix(const Eigen::MatrixXd& m);
double dopt_spectrum(const Spectrum& spectrum);

/// D-optimality of a single edge's information matrix.
double edge_weight(const InfoMatrix3& info);
std::vector<double> edge_weights(const PoseGraph& graph);

/// (n * t)^(1/n) where t is the spanning-tree count of the graph weighted by edge_weight,
/// evaluated in the log domain. Throws DisconnectedGraphError.
double dopt_graph(const PoseGraph& graph);

/// Anchored system information matrix of size 3(n-1): each edge (a, b) adds +Phi to blocks
/// (a,a), (b,b) and -Phi to (a,b), (b,a), relative-pose Jacobians taken as +/- identity,
/// node 0's block removed.
Eigen::MatrixXd assemble_fim(const PoseGraph& graph);

/// dopt_matrix(assemble_fim(graph)). Throws DisconnectedGraphError when the FIM is singular.
double dopt_exact(const PoseGraph& graph);

/// Row-major, comma-separated dump for debugging.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);

}  // namespace stopslam::toed

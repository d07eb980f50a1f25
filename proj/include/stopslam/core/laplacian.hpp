#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "stopslam/core/pose_graph.hpp"

namespace stopslam {

/// Endpoints of an undirected edge.
struct EdgeEnds {
  std::size_t a = 0;
  std::size_t b = 0;
};

std::vector<EdgeEnds> edge_ends(const PoseGraph& graph);

/// n x n weighted graph Laplacian: weighted degrees on the diagonal, minus the summed
/// weight between each node pair off the diagonal.
class WeightedLaplacian {
 public:
  WeightedLaplacian(std::size_t n, std::span<const EdgeEnds> ends, std::span<const double> weights);

  std::size_t size() const { return n_; }
  const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix_); }

  /// The (n-1) x (n-1) principal submatrix with row and column `removed` deleted.
  Eigen::SparseMatrix<double> reduced(std::size_t removed = 0) const;

  /// True when the positive-weight edges connect every node.
  bool positively_connected() const { return connected_; }

 private:
  std::size_t n_;
  Eigen::SparseMatrix<double> matrix_;
  bool connected_ = false;
};

/// Throws ConfigError when weights.size() != edge count and DomainError on negative or
/// non-finite weights. Parallel edges are summed.
WeightedLaplacian build_weighted_laplacian(const PoseGraph& graph, std::span<const double> weights);

/// Natural log of the weighted spanning-tree count: log det of the reduced Laplacian,
/// evaluated as twice the sum of the log Cholesky pivots. Any cofactor gives the same value;
/// `anchor` selects which one. Throws DisconnectedGraphError when the reduced Laplacian
/// is not positive definite, and ConfigError when fewer than two nodes.
double log_weighted_spanning_trees(const WeightedLaplacian& laplacian, std::size_t anchor = 0);

/// Sum over all spanning trees of the product of their edge weights, by enumerating every
/// (n-1)-edge subset. Used as an independent check of the log-determinant route.
/// Throws EnumerationLimitError for n > 10.
double brute_force_spanning_trees(std::size_t n, std::span<const EdgeEnds> ends, std::span<const double> weights);
double brute_force_spanning_trees(const PoseGraph& graph, std::span<const double> weights);

}  // namespace stopslam

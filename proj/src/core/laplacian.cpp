#include "stopslam/core/laplacian.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/SparseCholesky>

#include "stopslam/core/errors.hpp"

namespace stopslam {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), components_(n) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t v) {
    while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
    return v;
  }

  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    --components_;
    return true;
  }

  std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::size_t components_;
};

}  // namespace

std::vector<EdgeEnds> edge_ends(const PoseGraph& graph) {
  std::vector<EdgeEnds> ends;
  ends.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) ends.push_back({e.from_id, e.to_id});
  return ends;
}

WeightedLaplacian::WeightedLaplacian(std::size_t n, std::span<const EdgeEnds> ends, std::span<const double> weights)
    : n_(n), matrix_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) {
  if (weights.size() != ends.size()) {
    throw ConfigError("weight count " + std::to_string(weights.size()) + " does not match edge count " +
                      std::to_string(ends.size()));
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(4 * ends.size());
  DisjointSets sets(n);
  for (std::size_t j = 0; j < ends.size(); ++j) {
    const double w = weights[j];
    if (!std::isfinite(w) || w < 0.0) throw DomainError("edge weight " + std::to_string(j) + " is negative or not finite");
    const auto [a, b] = ends[j];
    if (a >= n || b >= n || a == b) throw ConfigError("edge " + std::to_string(j) + " has invalid endpoints");
    const auto ia = static_cast<Eigen::Index>(a);
    const auto ib = static_cast<Eigen::Index>(b);
    triplets.emplace_back(ia, ia, w);
    triplets.emplace_back(ib, ib, w);
    triplets.emplace_back(ia, ib, -w);
    triplets.emplace_back(ib, ia, -w);
    if (w > 0.0) sets.unite(a, b);
  }
  matrix_.setFromTriplets(triplets.begin(), triplets.end());
  matrix_.makeCompressed();
  connected_ = n > 0 && sets.components() == 1;
}

Eigen::SparseMatrix<double> WeightedLaplacian::reduced(std::size_t removed) const {
  if (removed >= n_) throw ConfigError("reduced Laplacian: row " + std::to_string(removed) + " out of range");
  const auto shift = [removed](Eigen::Index i) { return i > static_cast<Eigen::Index>(removed) ? i - 1 : i; };
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(matrix_.nonZeros()));
  for (Eigen::Index col = 0; col < matrix_.outerSize(); ++col) {
    if (col == static_cast<Eigen::Index>(removed)) continue;
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix_, col); it; ++it) {
      if (it.row() == static_cast<Eigen::Index>(removed)) continue;
      triplets.emplace_back(shift(it.row()), shift(col), it.value());
    }
  }
  const auto m = static_cast<Eigen::Index>(n_ - 1);
  Eigen::SparseMatrix<double> out(m, m);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

WeightedLaplacian build_weighted_laplacian(const PoseGraph& graph, std::span<const double> weights) {
  const auto ends = edge_ends(graph);
  return WeightedLaplacian(graph.node_count(), ends, weights);
}

double log_weighted_spanning_trees(const WeightedLaplacian& laplacian, std::size_t anchor) {
  if (laplacian.size() < 2) throw ConfigError("spanning-tree count needs at least two nodes");
  if (!laplacian.positively_connected()) {
    throw DisconnectedGraphError("graph is disconnected over its positive-weight edges");
  }
  const Eigen::SparseMatrix<double> reduced = laplacian.reduced(anchor);
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(reduced);
  if (llt.info() != Eigen::Success) throw DisconnectedGraphError("reduced Laplacian is not positive definite");
  const Eigen::VectorXd pivots = Eigen::VectorXd(llt.matrixL().nestedExpression().diagonal());
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < pivots.size(); ++i) {
    if (!(pivots[i] > 0.0)) throw DisconnectedGraphError("reduced Laplacian is not positive definite");
    log_det += 2.0 * std::log(pivots[i]);
  }
  return log_det;
}

double brute_force_spanning_trees(std::size_t n, std::span<const EdgeEnds> ends, std::span<const double> weights) {
  if (n > 10) throw EnumerationLimitError("brute-force spanning-tree enumeration refused for n = " + std::to_string(n));
  if (weights.size() != ends.size()) throw ConfigError("weight count does not match edge count");
  if (n <= 1) return 1.0;
  const std::size_t m = ends.size();
  const std::size_t k = n - 1;
  if (m < k) return 0.0;

  // Walk every k-subset of edge indices in lexicographic order.
  std::vector<std::size_t> pick(k);
  std::iota(pick.begin(), pick.end(), std::size_t{0});
  double total = 0.0;
  while (true) {
    DisjointSets sets(n);
    double product = 1.0;
    bool tree = true;
    for (std::size_t idx : pick) {
      if (!sets.unite(ends[idx].a, ends[idx].b)) {
        tree = false;
        break;
      }
      product *= weights[idx];
    }
    if (tree) total += product;

    std::size_t i = k;
    while (i > 0 && pick[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
  }
  return total;
}

double brute_force_spanning_trees(const PoseGraph& graph, std::span<const double> weights) {
  const auto ends = edge_ends(graph);
  return brute_force_spanning_trees(graph.node_count(), ends, weights);
}

}  // namespace stopslam

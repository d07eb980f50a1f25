#pragma once

#include <vector>

#include "stopslam/core/pose_graph.hpp"

namespace stopslam::slam {

struct OptimizerOptions {
  int max_iterations = 50;
  /// Stop once the norm of the accepted update falls below this.
  double update_tolerance = 1e-6;
};

struct OptimizationReport {
  int iterations = 0;
  double initial_chi2 = 0.0;
  double final_chi2 = 0.0;
  /// chi2 after each accepted iteration, starting with the initial value.
  std::vector<double> chi2_history;
  bool converged = false;
};

/// Sum over edges of r^T Phi r, r the angle-wrapped SE(2) relative-pose residual.
double chi2(const PoseGraph& graph);

/// Gauss-Newton over all node poses except the anchor (node 0). Steps that would raise chi2
/// are halved up to ten times and otherwise rejected, so chi2 never increases. When the
/// iteration budget runs out the report is flagged unconverged and the best iterate is kept.
/// Throws DisconnectedGraphError when the normal equations are singular.
OptimizationReport optimize(PoseGraph& graph, const OptimizerOptions& options = {});

}  // namespace stopslam::slam

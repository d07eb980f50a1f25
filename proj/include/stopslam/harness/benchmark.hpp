#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace stopslam::harness {

struct BenchmarkRow {
  std::size_t n = 0;
  /// Side of the anchored FIM, 3(n-1).
  std::size_t fim_dim = 0;
  double median_graph_s = 0.0;
  double median_exact_s = 0.0;
  /// median_exact_s / median_graph_s
  double speedup = 0.0;
};

/// Times dopt_graph against dopt_exact on `repetitions` random connected isotropic graphs per
/// size. Throws ConfigError for sizes below 2 or zero repetitions.
std::vector<BenchmarkRow> benchmark_dopt(const std::vector<std::size_t>& sizes, int repetitions,
                                         std::uint64_t seed = 1);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace stopslam::harness

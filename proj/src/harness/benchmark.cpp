#include "stopslam/harness/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <random>

#include <fmt/format.h>

#include "stopslam/core/errors.hpp"
#include "stopslam/core/random_graph.hpp"
#include "stopslam/toed/dopt.hpp"

namespace stopslam::harness {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Keeps the optimizer from dropping the timed call.
volatile double sink = 0.0;

}  // namespace

std::vector<BenchmarkRow> benchmark_dopt(const std::vector<std::size_t>& sizes, int repetitions, std::uint64_t seed) {
  if (repetitions < 1) throw ConfigError("benchmark needs at least one repetition");
  std::mt19937_64 rng(seed);
  std::vector<BenchmarkRow> rows;
  for (std::size_t n : sizes) {
    if (n < 2) throw ConfigError("benchmark sizes must be >= 2");
    RandomGraphOptions opts;
    opts.nodes = n;
    opts.min_extra_edges = n / 2;
    opts.max_extra_edges = n;
    opts.min_weight = 0.1;
    opts.max_weight = 10.0;
    opts.isotropic = true;
    std::vector<double> fast, exact;
    for (int r = 0; r < repetitions; ++r) {
      const PoseGraph g = random_connected_graph(opts, rng);
      fast.push_back(seconds([&] { sink = toed::dopt_graph(g); }));
      exact.push_back(seconds([&] { sink = toed::dopt_exact(g); }));
    }
    BenchmarkRow row;
    row.n = n;
    row.fim_dim = 3 * (n - 1);
    row.median_graph_s = median(fast);
    row.median_exact_s = median(exact);
    row.speedup = row.median_graph_s > 0.0 ? row.median_exact_s / row.median_graph_s : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out = "n,fim_dim,median_dopt_graph_s,median_dopt_exact_s,speedup\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.6g},{:.6g},{:.4g}\n", r.n, r.fim_dim, r.median_graph_s, r.median_exact_s, r.speedup);
  }
  return out;
}

}  // namespace stopslam::harness

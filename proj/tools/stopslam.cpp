// Command-line front end: explore, bench-dopt, replay, graph-tool.
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "stopslam/core/errors.hpp"
#include "stopslam/core/graph_io.hpp"
#include "stopslam/harness/benchmark.hpp"
#include "stopslam/harness/config.hpp"
#include "stopslam/harness/experiment.hpp"
#include "stopslam/toed/dopt.hpp"

using namespace stopslam;

namespace {

int run_explore(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::string> out,
                std::optional<int> trials, bool quiet) {
  auto config = harness::load_config(config_path);
  if (seed) config.seed = *seed;
  if (out) config.output_dir = *out;
  if (trials) config.trials = *trials;
  const auto result = harness::run_experiment(config, true, quiet ? nullptr : &std::clog);
  std::cout << harness::summary_csv(result.summary, std::to_string(config.seed));
  std::cout << "# outputs in " << config.output_dir.string() << "\n";
  return 0;
}

int run_replay(const std::string& trace_path, const std::string& criterion) {
  std::ifstream in(trace_path);
  if (!in) throw ConfigError("cannot open trace " + trace_path);
  const auto r = harness::replay_trace(in, criterion);
  std::cout << "step," << r.criterion << ":decision\n";
  for (std::size_t i = 0; i < r.decisions.size(); ++i) {
    std::cout << i + 1 << "," << stopping::to_string(r.decisions[i]) << "\n";
  }
  if (r.triggered_at) {
    std::cout << "# " << r.criterion << " triggered at step " << *r.triggered_at << "\n";
  } else {
    std::cout << "# " << r.criterion << " never triggered\n";
  }
  return 0;
}

int run_graph_dopt(const std::string& path, const std::string& fim_csv) {
  const PoseGraph g = import_pose_graph(path);
  const double exact = toed::dopt_exact(g);
  const double approx = toed::dopt_graph(g);
  std::cout << fmt::format("nodes {}\nedges {}\nloop_closures {}\ndopt_exact {:.12g}\ndopt_graph {:.12g}\n",
                           g.node_count(), g.edge_count(), g.loop_closure_count(), exact, approx);
  if (!fim_csv.empty()) {
    std::ofstream out(fim_csv);
    if (!out) throw ConfigError("cannot write " + fim_csv);
    toed::write_matrix_csv(out, toed::assemble_fim(g));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stopping criteria for active graph SLAM"};
  app.require_subcommand(1);

  auto* explore = app.add_subcommand("explore", "run an exploration experiment");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> trials;
  bool quiet = false;
  explore->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  explore->add_option("--seed", seed, "base seed (overrides the config)");
  explore->add_option("--out", out, "output directory (overrides the config)");
  explore->add_option("--trials", trials, "number of trials (overrides the config)");
  explore->add_flag("--quiet", quiet, "no per-step progress on stderr");

  auto* bench = app.add_subcommand("bench-dopt", "time dopt_graph against dopt_exact");
  std::vector<std::size_t> sizes{10, 100, 1000};
  int reps = 5;
  std::uint64_t bench_seed = 1;
  bench->add_option("--sizes", sizes, "graph sizes")->delimiter(',');
  bench->add_option("--reps", reps, "repetitions per size");
  bench->add_option("--seed", bench_seed, "graph generator seed");

  auto* replay = app.add_subcommand("replay", "re-evaluate a stopping criterion on a trace CSV");
  std::string trace_path, criterion = "task:2:3";
  replay->add_option("--trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("--criterion", criterion, "criterion label, e.g. task:2:3");

  auto* graph_tool = app.add_subcommand("graph-tool", "pose-graph utilities");
  graph_tool->require_subcommand(1);
  auto* dopt = graph_tool->add_subcommand("dopt", "print exact and spanning-tree D-optimality");
  std::string graph_path, fim_csv;
  dopt->add_option("graph", graph_path, "pose-graph file")->required()->check(CLI::ExistingFile);
  dopt->add_option("--fim-csv", fim_csv, "also write the anchored FIM as CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*explore) return run_explore(config_path, seed, out, trials, quiet);
    if (*bench) {
      std::cout << harness::benchmark_csv(harness::benchmark_dopt(sizes, reps, bench_seed));
      return 0;
    }
    if (*replay) return run_replay(trace_path, criterion);
    if (*dopt) return run_graph_dopt(graph_path, fim_csv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

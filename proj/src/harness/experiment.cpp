#include "stopslam/harness/experiment.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "stopslam/core/errors.hpp"
#include "stopslam/core/graph_io.hpp"
#include "stopslam/slam/map_metrics.hpp"
#include "stopslam/toed/dopt.hpp"

namespace stopslam::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) { return std::isnan(v) ? std::string() : fmt::format("{}", v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

SummaryRow snapshot(const std::string& label, const TraceRow& row, double dopt) {
  return {label,         true,           row.sample.wall_time, row.sample.A, row.sample.coverage, row.mrmse,
          double(row.n), row.d,          double(row.opt),      dopt};
}

}  // namespace

std::string label_slug(const std::string& label) {
  std::string s = label;
  for (char& c : s) {
    if (c == ':' || c == '/' || c == ' ') c = '_';
  }
  return s;
}

TrialResult run_trial(const ExperimentConfig& config, std::uint64_t seed, std::ostream* progress) {
  config.validate();
  auto world = std::make_shared<const slam::WorldModel>(slam::WorldModel::load(config.world));
  const Pose2 start = config.start.value_or(world->default_start());
  if (world->collides({start.x(), start.y()}, config.slam.body_radius)) {
    throw ConfigError(fmt::format("start ({}, {}) collides with the world", start.x(), start.y()));
  }
  std::optional<slam::MapReference> reference;
  if (config.ground_truth) reference.emplace(*world, start);

  std::vector<stopping::Criterion> criteria;
  for (const auto& label : config.criteria) criteria.push_back(stopping::Criterion::parse(label));
  std::optional<std::size_t> master;
  if (!config.master.empty()) {
    const auto m = stopping::Criterion::parse(config.master).label();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      if (criteria[i].label() == m) master = i;
    }
  }

  TrialResult result;
  result.seed = seed;
  for (const auto& c : criteria) result.labels.push_back(c.label());
  result.summary.resize(criteria.size());
  for (std::size_t i = 0; i < criteria.size(); ++i) result.summary[i].criterion = criteria[i].label();

  explore::Explorer explorer(world, config.slam, config.explorer, start, seed);
  stopping::MetricSample prev{};  // nothing known before the first step
  for (int k = 0; k < config.step_cap; ++k) {
    auto outcome = explorer.select_and_execute();
    const auto& state = explorer.slam();
    TraceRow row;
    row.sample.step = outcome.step;
    row.sample.wall_time = state.sim_time();
    // a lone start node carries no information yet
    row.sample.U = state.graph().node_count() < 2 ? 0.0 : toed::dopt_graph(state.graph());
    row.sample.A = state.map().known_area();
    row.sample.coverage = reference ? slam::coverage(state.map(), *reference) : kNaN;
    row.sample.frontier_exhausted = outcome.result == explore::StepResult::exhausted;
    row.deltas = stopping::step_deltas(prev, row.sample);
    row.decisions = stopping::evaluate_all(criteria, prev, row.sample);
    const auto err = reference ? slam::map_error(state.map(), *reference) : std::nullopt;
    row.mrmse = err ? err->max_error : kNaN;
    row.n = state.graph().node_count();
    row.d = average_node_degree(state.graph());
    row.opt = state.optimisation_count();
    for (std::size_t i = 0; i < criteria.size(); ++i) {
      if (criteria[i].triggered_at() == row.sample.step) {
        result.summary[i] = snapshot(criteria[i].label(), row, row.sample.U);
        result.trigger_graphs[criteria[i].label()] = state.graph();
      }
    }
    if (progress) {
      *progress << fmt::format("seed {} step {:3d} {:9s} t={:7.1f}s A={:6.1f}m2 cov={:5.1f}% U={:.1f} n={} opt={}\n",
                               seed, row.sample.step, explore::to_string(outcome.result), row.sample.wall_time,
                               row.sample.A, row.sample.coverage, row.sample.U, row.n, row.opt);
    }
    result.trace.push_back(std::move(row));
    result.steps.push_back(std::move(outcome));
    prev = result.trace.back().sample;

    const bool all = std::all_of(criteria.begin(), criteria.end(), [](const auto& c) { return c.triggered_at(); });
    if (master ? criteria[*master].triggered_at().has_value() : all) break;
  }
  result.final_graph = explorer.slam().graph();
  return result;
}

std::vector<SummaryRow> aggregate(const std::vector<TrialResult>& trials) {
  std::vector<SummaryRow> mean;
  if (trials.empty()) return mean;
  for (std::size_t i = 0; i < trials.front().summary.size(); ++i) {
    SummaryRow m;
    m.criterion = trials.front().summary[i].criterion;
    m.triggered = std::all_of(trials.begin(), trials.end(), [&](const auto& t) { return t.summary[i].triggered; });
    if (m.triggered) {
      const double k = static_cast<double>(trials.size());
      for (const auto& t : trials) {
        const auto& r = t.summary[i];
        m.time_s += r.time_s / k;
        m.area_m2 += r.area_m2 / k;
        m.coverage_pct += r.coverage_pct / k;
        m.mrmse_m += r.mrmse_m / k;
        m.n += r.n / k;
        m.d += r.d / k;
        m.opt += r.opt / k;
        m.dopt += r.dopt / k;
      }
    }
    mean.push_back(m);
  }
  return mean;
}

std::string trace_csv(const TrialResult& trial) {
  std::string out = fmt::format("# seed={}\nstep,wall_time,U,A,coverage,dU_pct,dA_pct,gamma", trial.seed);
  for (const auto& l : trial.labels) out += "," + l + ":decision";
  out += ",frontier_exhausted,mrmse,n,d,opt\n";
  for (const auto& r : trial.trace) {
    out += fmt::format("{},{},{},{},{},{},{},{}", r.sample.step, r.sample.wall_time, r.sample.U, r.sample.A,
                       num(r.sample.coverage), r.deltas.dU, r.deltas.dA, r.deltas.gamma);
    for (auto d : r.decisions) out += std::string(",") + stopping::to_string(d);
    out += fmt::format(",{},{},{},{},{}\n", r.sample.frontier_exhausted ? 1 : 0, num(r.mrmse), r.n, r.d, r.opt);
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& seeds) {
  std::string out = fmt::format("# seed={}\ncriterion,time_s,area_m2,coverage_pct,mrmse_m,n,d,opt,dopt\n", seeds);
  for (const auto& r : rows) {
    if (!r.triggered) {
      out += r.criterion + ",∞,,,,,,,\n";
      continue;
    }
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", r.criterion, r.time_s, r.area_m2, num(r.coverage_pct),
                       num(r.mrmse_m), r.n, r.d, r.opt, r.dopt);
  }
  return out;
}

std::string fig2_csv(const TrialResult& trial) {
  std::string out = fmt::format("# seed={}\nstep,dU_pct,dA_pct\n", trial.seed);
  for (const auto& r : trial.trace) out += fmt::format("{},{},{}\n", r.sample.step, r.deltas.dU, r.deltas.dA);
  return out;
}

std::string decisions_csv(const TrialResult& trial) {
  std::string out = fmt::format(
      "# seed={}\nstep,result,candidates,candidate,cluster,cluster_size,goal_x,goal_y,path_length,graph_term,area_term,"
      "utility,score,selected\n",
      trial.seed);
  for (const auto& s : trial.steps) {
    if (s.candidates.empty()) {
      out += fmt::format("{},{},0,,,,,,,,,,,\n", s.step, explore::to_string(s.result));
      continue;
    }
    for (std::size_t i = 0; i < s.candidates.size(); ++i) {
      const auto& c = s.candidates[i];
      out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.step, explore::to_string(s.result),
                         s.candidates.size(), i, c.cluster_index, c.cluster_size, c.goal.x(), c.goal.y(),
                         c.path_length, c.terms.graph, c.terms.area, c.utility, c.score,
                         s.selected == i ? 1 : 0);
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files, std::ostream* progress) {
  config.validate();
  ExperimentResult result;
  std::string seeds;
  for (int i = 0; i < config.trials; ++i) {
    const std::uint64_t seed = config.seed + static_cast<std::uint64_t>(i);
    result.trials.push_back(run_trial(config, seed, progress));
    seeds += (i ? ";" : "") + std::to_string(seed);
  }
  result.summary = aggregate(result.trials);
  if (!write_files) return result;

  const auto& dir = config.output_dir;
  std::filesystem::create_directories(dir);
  for (const auto& t : result.trials) {
    const std::string s = std::to_string(t.seed);
    write_text(dir / ("trace_seed" + s + ".csv"), trace_csv(t));
    write_text(dir / ("summary_seed" + s + ".csv"), summary_csv(t.summary, s));
    write_text(dir / ("fig2_seed" + s + ".csv"), fig2_csv(t));
    write_text(dir / ("decisions_seed" + s + ".csv"), decisions_csv(t));
    for (const auto& [label, graph] : t.trigger_graphs) {
      std::ostringstream g;
      g << "# seed=" << s << " criterion=" << label << "\n";
      write_pose_graph(g, graph);
      write_text(dir / ("graph_" + label_slug(label) + "_seed" + s + ".g2o"), g.str());
    }
  }
  write_text(dir / "summary.csv", summary_csv(result.summary, seeds));
  write_text(dir / "config_used.cfg", describe_config(config));
  return result;
}

ReplayResult replay_trace(std::istream& trace, const std::string& criterion) {
  ReplayResult result;
  auto c = stopping::Criterion::parse(criterion);
  result.criterion = c.label();
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string cell;
    while (std::getline(in, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ParseError(lineno, "trace has no column " + name);
  };
  std::size_t i_step = 0, i_time = 0, i_u = 0, i_a = 0, i_cov = 0, i_ex = 0;
  stopping::MetricSample prev{};
  while (std::getline(trace, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (header.empty()) {
      header = split(line);
      i_step = column("step");
      i_time = column("wall_time");
      i_u = column("U");
      i_a = column("A");
      i_cov = column("coverage");
      i_ex = column("frontier_exhausted");
      continue;
    }
    const auto cells = split(line);
    if (cells.size() != header.size()) throw ParseError(lineno, "wrong number of fields");
    stopping::MetricSample s;
    try {
      s.step = std::stoi(cells[i_step]);
      s.wall_time = std::stod(cells[i_time]);
      s.U = std::stod(cells[i_u]);
      s.A = std::stod(cells[i_a]);
      s.coverage = cells[i_cov].empty() ? kNaN : std::stod(cells[i_cov]);
      s.frontier_exhausted = cells[i_ex] == "1";
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad number in trace row");
    }
    result.decisions.push_back(c.update(prev, s));
    prev = s;
  }
  if (header.empty()) throw ParseError(lineno, "empty trace");
  result.triggered_at = c.triggered_at();
  return result;
}

}  // namespace stopslam::harness

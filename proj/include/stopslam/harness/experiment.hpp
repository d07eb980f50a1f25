#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stopslam/core/pose_graph.hpp"
#include "stopslam/explore/explorer.hpp"
#include "stopslam/harness/config.hpp"
#include "stopslam/stopping/criteria.hpp"

namespace stopslam::harness {

/// One active-SLAM step of a trial.
struct TraceRow {
  stopping::MetricSample sample;
  stopping::StepDeltas deltas;
  std::vector<stopping::Decision> decisions;
  /// Maximum map error, m; NaN without ground truth or without mapped obstacles.
  double mrmse = 0.0;
  std::size_t n = 0;
  double d = 0.0;
  std::size_t opt = 0;
};

/// Metrics when a criterion first stopped, or `triggered == false`.
struct SummaryRow {
  std::string criterion;
  bool triggered = false;
  double time_s = 0.0;
  double area_m2 = 0.0;
  double coverage_pct = 0.0;
  double mrmse_m = 0.0;
  double n = 0.0;
  double d = 0.0;
  double opt = 0.0;
  double dopt = 0.0;
};

struct TrialResult {
  std::uint64_t seed = 0;
  std::vector<std::string> labels;
  std::vector<TraceRow> trace;
  std::vector<SummaryRow> summary;
  std::vector<explore::StepOutcome> steps;
  /// Pose graph at each criterion's first trigger.
  std::map<std::string, PoseGraph> trigger_graphs;
  PoseGraph final_graph;
};

struct ExperimentResult {
  std::vector<TrialResult> trials;
  /// Mean over trials; a criterion counts as triggered only when it triggered in every trial.
  std::vector<SummaryRow> summary;
};

/// Runs one seeded trial: steps until the step cap, the master criterion, or (without a
/// master) every criterion has triggered. Configuration problems (bad world, colliding start)
/// are raised before the first step.
TrialResult run_trial(const ExperimentConfig& config, std::uint64_t seed, std::ostream* progress = nullptr);

/// Runs `trials` trials with seeds seed, seed+1, ... and, when `write_files`, writes per-trial
/// trace/summary/fig2/decision CSVs, pose graphs at each trigger, and the mean summary.csv
/// into the output directory.
ExperimentResult run_experiment(const ExperimentConfig& config, bool write_files = true,
                                std::ostream* progress = nullptr);

std::vector<SummaryRow> aggregate(const std::vector<TrialResult>& trials);

std::string trace_csv(const TrialResult& trial);
std::string summary_csv(const std::vector<SummaryRow>& rows, const std::string& seeds);
/// step,dU_pct,dA_pct per active-SLAM step.
std::string fig2_csv(const TrialResult& trial);
/// One row per evaluated candidate per step.
std::string decisions_csv(const TrialResult& trial);

/// File-name-safe version of a criterion label ("task:2:3" -> "task_2_3").
std::string label_slug(const std::string& label);

struct ReplayResult {
  std::string criterion;
  std::optional<int> triggered_at;
  std::vector<stopping::Decision> decisions;
};

/// Re-evaluates a criterion on the metric stream stored in a trace CSV.
ReplayResult replay_trace(std::istream& trace, const std::string& criterion);

}  // namespace stopslam::harness

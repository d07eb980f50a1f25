#pragma once

#include <cstddef>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stopslam::stopping {

/// Metrics after one active-SLAM step.
struct MetricSample {
  int step = 0;
  /// Simulated seconds since the start.
  double wall_time = 0.0;
  /// dopt_graph of the current graph.
  double U = 0.0;
  /// Known area, m^2.
  double A = 0.0;
  /// Percent of the explorable area known; needs ground truth.
  double coverage = 0.0;
  bool frontier_exhausted = false;
};

enum class Decision { keep_going, stop };

const char* to_string(Decision d);

/// 100 (curr - prev) / |prev|, clamped to +-1000. A zero `prev` (|prev| < 1e-12) gives 0 when
/// `curr` is also zero and +100 otherwise. NaN input throws DomainError.
double delta_pct(double prev, double curr);

/// dU + |dA|: a map that shrinks after a loop closure still counts as change.
double gamma(double dU_pct, double dA_pct);

struct StepDeltas {
  double dU = 0.0;
  double dA = 0.0;
  double gamma = 0.0;
};

StepDeltas step_deltas(const MetricSample& prev, const MetricSample& sample);

enum class CriterionKind { task_driven, temporal, coverage, frontier_absence };

class Criterion {
 public:
  /// Stops once `window` consecutive steps all have gamma below `threshold_pct`.
  static Criterion task_driven(double threshold_pct = 2.0, std::size_t window = 3);
  static Criterion temporal(double budget_s);
  /// Needs ground truth (privileged).
  static Criterion coverage(double target_pct);
  static Criterion frontier_absence();
  /// "task:<threshold>:<window>", "temporal:<seconds>", "coverage:<percent>" or "frontier".
  /// Throws ConfigError on anything else.
  static Criterion parse(std::string_view label);

  CriterionKind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  bool privileged() const { return kind_ == CriterionKind::coverage; }
  double threshold() const { return threshold_; }
  std::size_t window_size() const { return window_size_; }

  /// Feeds one sample (`prev` is the sample before it) and returns this step's decision.
  /// The first stop fixes triggered_at.
  Decision update(const MetricSample& prev, const MetricSample& sample);
  /// Task-driven rule on a precomputed gamma.
  Decision push_gamma(int step, double gamma_value);

  const std::deque<double>& window() const { return window_; }
  std::optional<int> triggered_at() const { return triggered_at_; }

 private:
  Criterion(CriterionKind kind, std::string label, double threshold, std::size_t window);
  Decision record(int step, bool stop);

  CriterionKind kind_;
  std::string label_;
  double threshold_;
  std::size_t window_size_;
  std::deque<double> window_;
  std::optional<int> triggered_at_;
};

/// Throws CriterionUnavailableError when a privileged criterion is configured without ground
/// truth, ConfigError when the list is empty or a label repeats.
void validate_criteria(std::span<const Criterion> criteria, bool ground_truth_available);

/// Updates every criterion on the same sample.
std::vector<Decision> evaluate_all(std::span<Criterion> criteria, const MetricSample& prev,
                                   const MetricSample& sample);

/// Step of the first task-driven stop on a gamma stream (steps numbered from 1), if any.
std::optional<int> first_trigger(std::span<const double> gammas, double threshold_pct, std::size_t window);

}  // namespace stopslam::stopping

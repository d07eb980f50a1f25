#include "stopslam/stopping/criteria.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "stopslam/core/errors.hpp"

namespace stopslam::stopping {

namespace {

constexpr double kZero = 1e-12;
constexpr double kSaturation = 1000.0;

double parse_number(std::string_view text, std::string_view label) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
    throw ConfigError(fmt::format("bad number '{}' in criterion '{}'", text, label));
  }
  return value;
}

std::string number_label(double v) { return fmt::format("{}", v); }

}  // namespace

const char* to_string(Decision d) { return d == Decision::stop ? "stop" : "continue"; }

double delta_pct(double prev, double curr) {
  if (std::isnan(prev) || std::isnan(curr)) throw DomainError("delta_pct of NaN");
  if (!std::isfinite(prev)) throw DomainError("delta_pct needs a finite previous value");
  if (std::abs(prev) < kZero) return std::abs(curr) < kZero ? 0.0 : 100.0;
  return std::clamp(100.0 * (curr - prev) / std::abs(prev), -kSaturation, kSaturation);
}

double gamma(double dU_pct, double dA_pct) { return dU_pct + std::abs(dA_pct); }

StepDeltas step_deltas(const MetricSample& prev, const MetricSample& sample) {
  StepDeltas d;
  d.dU = delta_pct(prev.U, sample.U);
  d.dA = delta_pct(prev.A, sample.A);
  d.gamma = gamma(d.dU, d.dA);
  return d;
}

Criterion::Criterion(CriterionKind kind, std::string label, double threshold, std::size_t window)
    : kind_(kind), label_(std::move(label)), threshold_(threshold), window_size_(window) {}

Criterion Criterion::task_driven(double threshold_pct, std::size_t window) {
  if (window < 1) throw ConfigError("task-driven window must be at least 1");
  if (!std::isfinite(threshold_pct)) throw ConfigError("task-driven threshold must be finite");
  return {CriterionKind::task_driven, fmt::format("task:{}:{}", number_label(threshold_pct), window), threshold_pct,
          window};
}

Criterion Criterion::temporal(double budget_s) {
  if (!(budget_s >= 0.0) || !std::isfinite(budget_s)) throw ConfigError("time budget must be finite and >= 0");
  return {CriterionKind::temporal, "temporal:" + number_label(budget_s), budget_s, 0};
}

Criterion Criterion::coverage(double target_pct) {
  if (!(target_pct >= 0.0 && target_pct <= 100.0)) throw ConfigError("coverage target must be in [0, 100]");
  return {CriterionKind::coverage, "coverage:" + number_label(target_pct), target_pct, 0};
}

Criterion Criterion::frontier_absence() { return {CriterionKind::frontier_absence, "frontier", 0.0, 0}; }

Criterion Criterion::parse(std::string_view label) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = label.find(':', start);
    parts.push_back(label.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  const auto& head = parts[0];
  if (head == "task" && parts.size() == 3) {
    const double w = parse_number(parts[2], label);
    if (w < 1 || w != std::floor(w)) throw ConfigError(fmt::format("bad window in criterion '{}'", label));
    return task_driven(parse_number(parts[1], label), static_cast<std::size_t>(w));
  }
  if (head == "temporal" && parts.size() == 2) return temporal(parse_number(parts[1], label));
  if (head == "coverage" && parts.size() == 2) return coverage(parse_number(parts[1], label));
  if (head == "frontier" && parts.size() == 1) return frontier_absence();
  throw ConfigError(fmt::format("unknown stopping criterion '{}'", label));
}

Decision Criterion::record(int step, bool stop) {
  if (stop && !triggered_at_) triggered_at_ = step;
  return stop ? Decision::stop : Decision::keep_going;
}

Decision Criterion::push_gamma(int step, double gamma_value) {
  window_.push_back(gamma_value);
  while (window_.size() > window_size_) window_.pop_front();
  const bool stop = window_.size() == window_size_ &&
                    std::all_of(window_.begin(), window_.end(), [&](double g) { return g < threshold_; });
  return record(step, stop);
}

Decision Criterion::update(const MetricSample& prev, const MetricSample& sample) {
  switch (kind_) {
    case CriterionKind::task_driven: return push_gamma(sample.step, step_deltas(prev, sample).gamma);
    case CriterionKind::temporal: return record(sample.step, sample.wall_time >= threshold_);
    case CriterionKind::coverage: return record(sample.step, sample.coverage >= threshold_);
    case CriterionKind::frontier_absence: return record(sample.step, sample.frontier_exhausted);
  }
  return Decision::keep_going;
}

void validate_criteria(std::span<const Criterion> criteria, bool ground_truth_available) {
  if (criteria.empty()) throw ConfigError("at least one stopping criterion is required");
  std::set<std::string> seen;
  for (const auto& c : criteria) {
    if (!seen.insert(c.label()).second) throw ConfigError("duplicate stopping criterion " + c.label());
    if (c.privileged() && !ground_truth_available) {
      throw CriterionUnavailableError(c.label() + " needs ground truth, which this run does not have");
    }
  }
}

std::vector<Decision> evaluate_all(std::span<Criterion> criteria, const MetricSample& prev,
                                   const MetricSample& sample) {
  std::vector<Decision> out;
  out.reserve(criteria.size());
  for (auto& c : criteria) out.push_back(c.update(prev, sample));
  return out;
}

std::optional<int> first_trigger(std::span<const double> gammas, double threshold_pct, std::size_t window) {
  auto c = Criterion::task_driven(threshold_pct, window);
  for (std::size_t i = 0; i < gammas.size(); ++i) c.push_gamma(static_cast<int>(i) + 1, gammas[i]);
  return c.triggered_at();
}

}  // namespace stopslam::stopping

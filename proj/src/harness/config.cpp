#include "stopslam/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "stopslam/core/errors.hpp"
#include "stopslam/stopping/criteria.hpp"

namespace stopslam::harness {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& v) {
  double x = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(x)) throw std::invalid_argument(v);
  return x;
}

long long to_int(const std::string& v) {
  long long x = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || end != v.data() + v.size()) throw std::invalid_argument(v);
  return x;
}

std::size_t to_count(const std::string& v) {
  const long long x = to_int(v);
  if (x < 0) throw std::invalid_argument(v);
  return static_cast<std::size_t>(x);
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw std::invalid_argument(v);
}

constexpr double kDeg = std::numbers::pi / 180.0;

using Setter = std::function<void(ExperimentConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"world", [](auto& c, auto& v) { c.world = v; }},
      {"seed", [](auto& c, auto& v) { c.seed = static_cast<std::uint64_t>(to_count(v)); }},
      {"trials", [](auto& c, auto& v) { c.trials = static_cast<int>(to_int(v)); }},
      {"step_cap", [](auto& c, auto& v) { c.step_cap = static_cast<int>(to_int(v)); }},
      {"criteria", [](auto& c, auto& v) { c.criteria = split(v, ','); }},
      {"master", [](auto& c, auto& v) { c.master = v; }},
      {"ground_truth", [](auto& c, auto& v) { c.ground_truth = to_bool(v); }},
      {"output_dir", [](auto& c, auto& v) { c.output_dir = v; }},
      {"start",
       [](auto& c, auto& v) {
         const auto p = split(v, ',');
         if (p.size() != 3) throw std::invalid_argument(v);
         c.start = Pose2(to_double(p[0]), to_double(p[1]), to_double(p[2]));
       }},
      {"sensor.fov_deg", [](auto& c, auto& v) { c.slam.sensor.fov = to_double(v) * kDeg; }},
      {"sensor.max_range", [](auto& c, auto& v) { c.slam.sensor.max_range = to_double(v); }},
      {"sensor.beams", [](auto& c, auto& v) { c.slam.sensor.beams = static_cast<int>(to_int(v)); }},
      {"sensor.range_noise", [](auto& c, auto& v) { c.slam.sensor.range_noise = to_double(v); }},
      {"sensor.hit_log_odds", [](auto& c, auto& v) { c.slam.sensor.hit_log_odds = to_double(v); }},
      {"sensor.miss_log_odds", [](auto& c, auto& v) { c.slam.sensor.miss_log_odds = to_double(v); }},
      {"motion.v_max", [](auto& c, auto& v) { c.slam.motion.v_max = to_double(v); }},
      {"motion.omega_max", [](auto& c, auto& v) { c.slam.motion.omega_max = to_double(v); }},
      {"motion.sigma_xy",
       [](auto& c, auto& v) {
         const double s = to_double(v);
         c.slam.motion.odometry_covariance(0, 0) = s * s;
         c.slam.motion.odometry_covariance(1, 1) = s * s;
       }},
      {"motion.sigma_theta",
       [](auto& c, auto& v) {
         const double s = to_double(v);
         c.slam.motion.odometry_covariance(2, 2) = s * s;
       }},
      {"loop.radius", [](auto& c, auto& v) { c.slam.loop.radius = to_double(v); }},
      {"loop.yaw_gate", [](auto& c, auto& v) { c.slam.loop.yaw_gate = to_double(v); }},
      {"loop.gap_min", [](auto& c, auto& v) { c.slam.loop.gap_min = to_count(v); }},
      {"loop.min_interval", [](auto& c, auto& v) { c.slam.loop.min_interval = to_count(v); }},
      {"loop.sigma_xy",
       [](auto& c, auto& v) {
         c.slam.loop.sigma.x() = to_double(v);
         c.slam.loop.sigma.y() = to_double(v);
       }},
      {"loop.sigma_theta", [](auto& c, auto& v) { c.slam.loop.sigma.z() = to_double(v); }},
      {"node.min_translation", [](auto& c, auto& v) { c.slam.node_min_translation = to_double(v); }},
      {"node.min_rotation", [](auto& c, auto& v) { c.slam.node_min_rotation = to_double(v); }},
      {"robot.radius", [](auto& c, auto& v) { c.slam.body_radius = to_double(v); }},
      {"map.known_threshold", [](auto& c, auto& v) { c.slam.occupancy.known_threshold = to_double(v); }},
      {"map.max_log_odds", [](auto& c, auto& v) { c.slam.occupancy.max_log_odds = to_double(v); }},
      {"optimizer.max_iterations", [](auto& c, auto& v) { c.slam.optimizer.max_iterations = static_cast<int>(to_int(v)); }},
      {"optimizer.update_tolerance", [](auto& c, auto& v) { c.slam.optimizer.update_tolerance = to_double(v); }},
      {"utility.alpha", [](auto& c, auto& v) { c.explorer.utility.alpha = to_double(v); }},
      {"utility.max_candidates", [](auto& c, auto& v) { c.explorer.utility.max_candidates = to_count(v); }},
      {"frontier.min_cluster_size", [](auto& c, auto& v) { c.explorer.utility.min_cluster_size = to_count(v); }},
      {"planner.clearance", [](auto& c, auto& v) { c.explorer.planner.clearance = to_double(v); }},
      {"planner.inflation_radius", [](auto& c, auto& v) { c.explorer.planner.inflation_radius = to_double(v); }},
      {"planner.inflation_penalty", [](auto& c, auto& v) { c.explorer.planner.inflation_penalty = to_double(v); }},
      {"control.dt", [](auto& c, auto& v) { c.explorer.dt = to_double(v); }},
      {"control.goal_tolerance", [](auto& c, auto& v) { c.explorer.goal_tolerance = to_double(v); }},
      {"control.lookahead", [](auto& c, auto& v) { c.explorer.lookahead = to_double(v); }},
      {"control.stuck_ticks", [](auto& c, auto& v) { c.explorer.stuck_ticks = static_cast<int>(to_int(v)); }},
      {"control.replan_ticks", [](auto& c, auto& v) { c.explorer.replan_ticks = static_cast<int>(to_int(v)); }},
      {"control.max_goal_ticks", [](auto& c, auto& v) { c.explorer.max_goal_ticks = static_cast<int>(to_int(v)); }},
      {"control.max_attempts", [](auto& c, auto& v) { c.explorer.max_attempts = to_count(v); }},
      {"control.blacklist_radius", [](auto& c, auto& v) { c.explorer.blacklist_radius = to_double(v); }},
  };
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (step_cap <= 0) throw ConfigError("step_cap must be positive");
  if (trials <= 0) throw ConfigError("trials must be positive");
  if (world.empty()) throw ConfigError("no world configured");
  std::vector<stopping::Criterion> parsed;
  for (const auto& label : criteria) parsed.push_back(stopping::Criterion::parse(label));
  stopping::validate_criteria(parsed, ground_truth);
  if (!master.empty()) {
    bool found = false;
    for (const auto& c : parsed) found = found || c.label() == stopping::Criterion::parse(master).label();
    if (!found) throw ConfigError("master criterion " + master + " is not configured");
  }
  slam.sensor.validate();
  slam.motion.validate();
  explorer.validate();
  if (!(slam.body_radius >= 0.0)) throw ConfigError("robot radius must be >= 0");
}

ExperimentConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  ExperimentConfig config;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ParseError(line, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(line, "unknown key '" + key + "'");
    try {
      it->second(config, value);
    } catch (const std::invalid_argument&) {
      throw ParseError(line, fmt::format("bad value '{}' for {}", value, key));
    }
  }
  if (!config.world.empty() && config.world.is_relative() && !base_dir.empty()) config.world = base_dir / config.world;
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_config(in, path.parent_path());
}

std::string describe_config(const ExperimentConfig& c) {
  std::string joined;
  for (std::size_t i = 0; i < c.criteria.size(); ++i) joined += (i ? "," : "") + c.criteria[i];
  const auto& s = c.slam;
  const auto& e = c.explorer;
  std::string out;
  auto put = [&](std::string_view k, auto v) { out += fmt::format("{} = {}\n", k, v); };
  put("world", c.world.string());
  put("seed", c.seed);
  put("trials", c.trials);
  put("step_cap", c.step_cap);
  put("criteria", joined);
  if (!c.master.empty()) put("master", c.master);
  put("ground_truth", c.ground_truth ? "true" : "false");
  if (c.start) put("start", fmt::format("{},{},{}", c.start->x(), c.start->y(), c.start->theta()));
  put("sensor.fov_deg", s.sensor.fov / kDeg);
  put("sensor.max_range", s.sensor.max_range);
  put("sensor.beams", s.sensor.beams);
  put("sensor.range_noise", s.sensor.range_noise);
  put("sensor.hit_log_odds", s.sensor.hit_log_odds);
  put("sensor.miss_log_odds", s.sensor.miss_log_odds);
  put("motion.v_max", s.motion.v_max);
  put("motion.omega_max", s.motion.omega_max);
  put("motion.sigma_xy", std::sqrt(s.motion.odometry_covariance(0, 0)));
  put("motion.sigma_theta", std::sqrt(s.motion.odometry_covariance(2, 2)));
  put("loop.radius", s.loop.radius);
  put("loop.yaw_gate", s.loop.yaw_gate);
  put("loop.gap_min", s.loop.gap_min);
  put("loop.min_interval", s.loop.min_interval);
  put("loop.sigma_xy", s.loop.sigma.x());
  put("loop.sigma_theta", s.loop.sigma.z());
  put("node.min_translation", s.node_min_translation);
  put("node.min_rotation", s.node_min_rotation);
  put("robot.radius", s.body_radius);
  put("map.known_threshold", s.occupancy.known_threshold);
  put("map.max_log_odds", s.occupancy.max_log_odds);
  put("optimizer.max_iterations", s.optimizer.max_iterations);
  put("optimizer.update_tolerance", s.optimizer.update_tolerance);
  put("utility.alpha", e.utility.alpha);
  put("utility.max_candidates", e.utility.max_candidates);
  put("frontier.min_cluster_size", e.utility.min_cluster_size);
  put("planner.clearance", e.planner.clearance);
  put("planner.inflation_radius", e.planner.inflation_radius);
  put("planner.inflation_penalty", e.planner.inflation_penalty);
  put("control.dt", e.dt);
  put("control.goal_tolerance", e.goal_tolerance);
  put("control.lookahead", e.lookahead);
  put("control.stuck_ticks", e.stuck_ticks);
  put("control.replan_ticks", e.replan_ticks);
  put("control.max_goal_ticks", e.max_goal_ticks);
  put("control.max_attempts", e.max_attempts);
  put("control.blacklist_radius", e.blacklist_radius);
  return out;
}

}  // namespace stopslam::harness

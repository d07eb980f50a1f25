#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>

#include "graph_fixtures.hpp"
#include "stopslam/core/errors.hpp"
#include "stopslam/core/random_graph.hpp"
#include "stopslam/slam/map_metrics.hpp"
#include "stopslam/slam/optimizer.hpp"
#include "stopslam/slam/sensor.hpp"
#include "stopslam/slam/slam_state.hpp"
#include "world_fixtures.hpp"

using namespace stopslam;
using namespace stopslam::slam;
using stopslam::testing::empty_room;
using stopslam::testing::world_from_rows;

namespace {

SlamConfig noiseless_config() {
  SlamConfig cfg;
  cfg.sensor.range_noise = 0.0;
  cfg.motion.odometry_covariance = Eigen::Matrix3d::Identity() * 1e-24;
  cfg.loop.sigma = Eigen::Vector3d::Constant(1e-12);
  return cfg;
}

std::shared_ptr<const WorldModel> share(WorldModel w) { return std::make_shared<const WorldModel>(std::move(w)); }

}  // namespace

TEST_CASE("world files") {
  const auto w = world_from_rows({"#####", "#..##", "#...#", "#####"}, 0.5);
  CHECK(w.geometry().width == 5);
  CHECK(w.geometry().height == 4);
  CHECK(w.occupied({3, 2}));   // second text row, fourth column
  CHECK_FALSE(w.occupied({1, 1}));
  CHECK(w.occupied({-1, 0}));  // outside counts as occupied

  CHECK_THROWS_AS(world_from_rows({"#####", "#....", "#####"}, 0.5), ConfigError);
  CHECK_THROWS_AS(world_from_rows({"#####", "#.x.#", "#####"}, 0.5), ParseError);
  CHECK_THROWS_AS(world_from_rows({"#####", "#..#", "#####"}, 0.5), ParseError);
  std::istringstream bad("res 0.1\n###\n#.#\n###\n");
  CHECK_THROWS_AS(WorldModel::parse(bad), ParseError);
}

TEST_CASE("exact distance transform matches brute force") {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution on(0.05);
  const int w = 23, h = 17;
  std::vector<unsigned char> seed(w * h);
  for (auto& s : seed) s = on(rng) ? 1 : 0;
  seed[0] = 1;
  const auto d = distance_transform(w, h, seed);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double best = INFINITY;
      for (int yy = 0; yy < h; ++yy)
        for (int xx = 0; xx < w; ++xx)
          if (seed[yy * w + xx]) best = std::min(best, std::hypot(x - xx, y - yy));
      CHECK(d[y * w + x] == doctest::Approx(best));
    }
  }
}

TEST_CASE("single beam measures the wall distance") {
  std::vector<Cell> wall;
  for (int y = 1; y < 19; ++y) wall.push_back({50, y});  // x in [2.50, 2.55)
  const auto world = empty_room(3.0, 1.0, 0.05, wall);
  SensorModel sensor;
  sensor.beams = 1;
  sensor.range_noise = 0.0;
  std::mt19937_64 rng(1);
  const Scan scan = simulate_scan(world, Pose2(0.5, 0.5, 0.0), sensor, rng);
  REQUIRE(scan.ranges.size() == 1);
  CHECK(scan.hit[0] == 1);
  CHECK(scan.ranges[0] == doctest::Approx(2.0).epsilon(1e-12));

  OccupancyGrid map(world.geometry());
  integrate_scan(map, Pose2(0.5, 0.5, 0.0), scan, sensor);
  CHECK(map.state(Cell{50, 10}) == CellState::occupied);
  CHECK(map.state(Cell{49, 10}) == CellState::free);
  CHECK(map.state(Cell{10, 10}) == CellState::free);
  CHECK(map.state(Cell{51, 10}) == CellState::unknown);

  CHECK_THROWS_AS(simulate_scan(world, Pose2(2.52, 0.5, 0.0), sensor, rng), SimulationFault);
}

TEST_CASE("half-disc scan reveals the sector area") {
  const auto world = empty_room(14.0, 14.0);
  SensorModel sensor;
  sensor.range_noise = 0.0;
  std::mt19937_64 rng(2);
  const Pose2 pose(7.0, 7.0, 0.3);
  const Scan scan = simulate_scan(world, pose, sensor, rng);
  OccupancyGrid map(world.geometry());
  CHECK(map.known_area() == 0.0);
  integrate_scan(map, pose, scan, sensor);
  const double expected = 0.5 * std::numbers::pi * 25.0;
  const double band = (std::numbers::pi * 5.0 + 10.0) * 0.05;  // perimeter times one cell
  CHECK(std::abs(map.known_area() - expected) <= band);

  // Re-observing a fully known region adds nothing.
  const double before = map.known_area();
  CHECK(integrate_scan(map, pose, scan, sensor) == 0);
  CHECK(map.known_area() == before);
}

TEST_CASE("log-odds clamp") {
  const auto world = empty_room(2.0, 2.0);
  OccupancyGrid map(world.geometry());
  for (int i = 0; i < 100; ++i) map.update(5, 0.85);
  CHECK(map.log_odds(std::size_t{5}) == 10.0);
  for (int i = 0; i < 100; ++i) map.update(5, -0.7);
  CHECK(map.log_odds(std::size_t{5}) == -10.0);
}

TEST_CASE("unicycle kinematics") {
  const Pose2 p = integrate_unicycle(Pose2(0, 0, 0), {0.2, 0.0}, 1.0);
  CHECK(p.x() == doctest::Approx(0.2));
  CHECK(p.y() == doctest::Approx(0.0));
  // Quarter circle of radius 1.
  const Pose2 q = integrate_unicycle(Pose2(0, 0, 0), {0.5, 0.5}, std::numbers::pi);
  CHECK(q.x() == doctest::Approx(1.0));
  CHECK(q.y() == doctest::Approx(1.0));
  CHECK(q.theta() == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("odometry edges") {
  auto cfg = noiseless_config();
  cfg.node_min_translation = 0.0;
  cfg.node_min_rotation = 0.0;
  SlamState state(share(empty_room(6.0, 6.0)), cfg, Pose2(3, 3, 0), 1);

  auto still = state.step_odometry({0.0, 0.0}, 1.0);
  REQUIRE(still);
  CHECK(still->odometry.measurement == Pose2(0, 0, 0));

  auto straight = state.step_odometry({0.2, 0.0}, 1.0);
  REQUIRE(straight);
  CHECK(straight->odometry.measurement.x() == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(straight->odometry.measurement.y() == 0.0);
  CHECK(straight->odometry.measurement.theta() == 0.0);
  CHECK(straight->odometry.from_id + 1 == straight->odometry.to_id);
  CHECK(state.true_pose().x() == doctest::Approx(3.2));

  // Commands beyond the limits are clamped.
  auto fast = state.step_odometry({1.0, 0.0}, 1.0);
  REQUIRE(fast);
  CHECK(fast->odometry.measurement.x() == doctest::Approx(0.2));

  MotionModel m;
  m.odometry_covariance = Eigen::Vector3d(1e-4, 1e-4, 2.5e-5).asDiagonal();
  const auto info = m.odometry_info();
  CHECK(info(0, 0) == doctest::Approx(1e4));
  CHECK(info(1, 1) == doctest::Approx(1e4));
  CHECK(info(2, 2) == doctest::Approx(4e4));
}

TEST_CASE("motion into walls is refused") {
  auto cfg = noiseless_config();
  SlamState state(share(empty_room(2.0, 2.0)), cfg, Pose2(1.7, 1.0, 0), 1);
  bool blocked = false;
  state.step_odometry({0.2, 0.0}, 1.0, &blocked);
  CHECK(blocked);
  CHECK(state.true_pose() == Pose2(1.7, 1.0, 0));
  CHECK_THROWS_AS(SlamState(share(empty_room(2.0, 2.0)), cfg, Pose2(0.01, 1.0, 0), 1), ConfigError);
}

TEST_CASE("loop-closure detection") {
  auto cfg = noiseless_config();
  cfg.node_min_translation = 0.0;
  cfg.node_min_rotation = 0.0;
  SlamState state(share(empty_room(8.0, 8.0)), cfg, Pose2(1, 1, 0), 1);
  const double quarter = std::numbers::pi / 2 / 0.8;

  // Out along the bottom edge: no revisits.
  for (int i = 0; i < 5; ++i) {
    state.step_odometry({0.2, 0}, 1.5);
    CHECK_FALSE(state.detect_loop_closure(1.0, 0.8));
  }
  for (int side = 0; side < 3; ++side) {
    state.step_odometry({0, 0.8}, quarter);
    for (int i = 0; i < 5; ++i) state.step_odometry({0.2, 0}, 1.5);
  }
  state.step_odometry({0, 0.8}, quarter);  // node 24, back at node 0's pose
  auto closure = state.detect_loop_closure(1.0, 0.8);
  REQUIRE(closure);
  CHECK(closure->kind == EdgeKind::loop_closure);
  CHECK(closure->to_id == 24);
  CHECK(closure->from_id == 0);
  CHECK(std::abs(closure->measurement.x()) < 1e-9);
  CHECK(std::abs(closure->measurement.theta()) < 1e-9);

  for (int i = 0; i < 5; ++i) state.step_odometry({0.2, 0}, 1.5);  // node 29 sits on node 5
  closure = state.detect_loop_closure(1.0, 0.8);
  REQUIRE(closure);
  CHECK(closure->from_id == 5);
  CHECK(closure->measurement.distance_to(Pose2()) < 1e-9);

  // Nearest wins: step sideways 0.4 m off node 29's line so node 5 is 0.4 m away and node 4 is 0.5 m.
  state.step_odometry({0, 0.8}, quarter);
  state.step_odometry({0.2, 0}, 2.0);
  state.step_odometry({0, -0.8}, quarter);
  closure = state.detect_loop_closure(1.0, 0.8);
  REQUIRE(closure);
  CHECK(closure->from_id == 5);
  CHECK(state.true_pose().distance_to(state.true_node_poses()[5]) == doctest::Approx(0.4));
  CHECK(state.true_pose().distance_to(state.true_node_poses()[4]) == doctest::Approx(0.5));

  // Yaw gate rejects a reversed heading.
  state.step_odometry({0, 0.8}, 2 * quarter);
  CHECK_FALSE(state.detect_loop_closure(1.0, 0.8));
}

TEST_CASE("optimizer on consistent graphs") {
  using stopslam::testing::make_graph;
  SUBCASE("noise-free graph does not move") {
    std::mt19937_64 rng(4);
    RandomGraphOptions opt;
    opt.nodes = 30;
    opt.max_extra_edges = 10;
    opt.min_weight = 1.0;
    opt.max_weight = 100.0;
    auto g = random_connected_graph(opt, rng);
    const auto before = g;
    const auto report = optimize(g);
    CHECK(report.final_chi2 < 1e-20);
    CHECK(report.iterations == 1);
    CHECK(report.converged);
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(g.node(i).pose.distance_to(before.node(i).pose) < 1e-12);
  }
  SUBCASE("triangle with a closing edge") {
    PoseGraph g;
    const Pose2 p0, p1(1.0, 0.0, 2.0944), p2(0.5, 0.866, -2.0944);
    g.add_node(p0);
    g.add_node(p1);
    g.add_node(p2);
    g.add_edge({0, 1, Pose2::between(p0, p1), InfoMatrix3::diagonal(100, 100, 400), EdgeKind::odometry});
    g.add_edge({1, 2, Pose2::between(p1, p2), InfoMatrix3::diagonal(100, 100, 400), EdgeKind::odometry});
    g.add_edge({0, 2, Pose2::between(p0, p2), InfoMatrix3::diagonal(400, 400, 1600), EdgeKind::loop_closure});
    const auto report = optimize(g);
    CHECK(report.final_chi2 < 1e-10);

    g.set_pose(1, Pose2(p1.x() + 0.1, p1.y(), p1.theta()));
    CHECK(chi2(g) > 1.0);
    const auto fixed = optimize(g);
    CHECK(fixed.final_chi2 < 1e-10);
    CHECK(g.node(1).pose.distance_to(p1) < 1e-6);
    CHECK(g.node(0).pose == p0);
  }
}

TEST_CASE("chi2 never increases and the anchor never moves") {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> noise(0.0, 0.2);
  for (int trial = 0; trial < 20; ++trial) {
    RandomGraphOptions opt;
    opt.nodes = 15;
    opt.min_extra_edges = 3;
    opt.max_extra_edges = 8;
    opt.min_weight = 1.0;
    opt.max_weight = 50.0;
    opt.isotropic = false;
    auto g = random_connected_graph(opt, rng);
    const Pose2 anchor = g.node(0).pose;
    for (std::size_t i = 1; i < g.node_count(); ++i) {
      const Pose2 p = g.node(i).pose;
      g.set_pose(i, Pose2(p.x() + noise(rng), p.y() + noise(rng), p.theta() + noise(rng)));
    }
    const auto report = optimize(g);
    for (std::size_t k = 1; k < report.chi2_history.size(); ++k) {
      CHECK(report.chi2_history[k] <= report.chi2_history[k - 1]);
    }
    CHECK(report.final_chi2 <= report.initial_chi2);
    CHECK(g.node(0).pose == anchor);
  }
}

TEST_CASE("map error") {
  const auto world = empty_room(2.0, 2.0, 0.05, {{10, 10}});
  OccupancyGrid exact(world.geometry());
  for (std::size_t i = 0; i < world.geometry().cell_count(); ++i) {
    exact.update(i, world.occupied(world.geometry().cell_at(i)) ? 5.0 : -5.0);
  }
  auto err = map_error(exact, world);
  REQUIRE(err);
  CHECK(err->rmse == 0.0);
  CHECK(err->max_error == 0.0);

  OccupancyGrid shifted(world.geometry());
  shifted.update(world.geometry().index({11, 11}), 5.0);
  err = map_error(shifted, world);
  REQUIRE(err);
  CHECK(err->rmse == doctest::Approx(0.0707107).epsilon(1e-5));
  CHECK(err->max_error == doctest::Approx(std::sqrt(2.0) * 0.05));

  OccupancyGrid blank(world.geometry());
  CHECK_FALSE(map_error(blank, world));
}

TEST_CASE("coverage and known area") {
  const auto world = empty_room(3.0, 2.0);
  const MapReference reference(world, Pose2(1.5, 1.0, 0));
  OccupancyGrid map(world.geometry());
  CHECK(known_area(map) == 0.0);
  CHECK(coverage(map, reference) == 0.0);
  for (std::size_t i = 0; i < world.geometry().cell_count(); ++i) {
    map.update(i, world.occupied(world.geometry().cell_at(i)) ? 5.0 : -5.0);
  }
  CHECK(coverage(map, reference) == doctest::Approx(100.0));
  CHECK(known_area(map) == doctest::Approx(6.0));
  CHECK(reference.explorable_count() == world.geometry().cell_count());
}

TEST_CASE("map rebuild, monotone known area and determinism") {
  auto world = share(empty_room(6.0, 5.0, 0.05, {{40, 40}, {41, 40}, {40, 41}, {41, 41}}));
  auto cfg = noiseless_config();
  cfg.sensor.beams = 300;
  SlamState state(world, cfg, Pose2(1.0, 1.0, 0.4), 7);
  double area = state.map().known_area();
  for (int i = 0; i < 60; ++i) {
    const auto out = state.tick({0.2, i % 20 < 10 ? 0.3 : -0.1}, 0.5);
    if (out.new_node && !out.optimization) {
      CHECK(state.map().known_area() >= area);
    }
    area = state.map().known_area();
  }
  const OccupancyGrid before = state.map();
  state.rebuild_map();
  CHECK(state.map() == before);

  SlamConfig noisy;
  noisy.sensor.beams = 200;
  SlamState a(world, noisy, Pose2(1.0, 1.0, 0.4), 42);
  SlamState b(world, noisy, Pose2(1.0, 1.0, 0.4), 42);
  for (int i = 0; i < 80; ++i) {
    const VelocityCommand cmd{0.2, i % 30 < 15 ? 0.4 : -0.2};
    a.tick(cmd, 0.5);
    b.tick(cmd, 0.5);
  }
  CHECK(a.graph() == b.graph());
  CHECK(a.map() == b.map());
  CHECK(a.graph().node_count() > 5);
}

#include <doctest.h>

#include <cmath>
#include <memory>
#include <random>

#include "stopslam/core/errors.hpp"
#include "stopslam/explore/explorer.hpp"
#include "stopslam/explore/frontier.hpp"
#include "stopslam/explore/planner.hpp"
#include "stopslam/explore/utility.hpp"
#include "stopslam/slam/slam_state.hpp"
#include "stopslam/toed/dopt.hpp"
#include "world_fixtures.hpp"

using namespace stopslam;
using namespace stopslam::explore;
using slam::Cell;
using slam::CellState;
using slam::GridGeometry;
using slam::OccupancyGrid;
using stopslam::testing::empty_room;
using stopslam::testing::world_from_rows;

namespace {

GridGeometry geometry(int w, int h, double res = 0.1) {
  GridGeometry g;
  g.width = w;
  g.height = h;
  g.resolution = res;
  return g;
}

void set_log_odds(OccupancyGrid& m, Cell c, double value) {
  const auto i = m.geometry().index(c);
  m.update(i, value - m.log_odds(i));
}
void set_free(OccupancyGrid& m, Cell c) { set_log_odds(m, c, -5.0); }
void set_occupied(OccupancyGrid& m, Cell c) { set_log_odds(m, c, 5.0); }

// Every cell known: border walls, free interior.
OccupancyGrid known_room(int w, int h, double res = 0.1) {
  OccupancyGrid m(geometry(w, h, res));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
        set_occupied(m, {x, y});
      } else {
        set_free(m, {x, y});
      }
    }
  }
  return m;
}

slam::SlamConfig quiet_config() {
  slam::SlamConfig cfg;
  cfg.sensor.range_noise = 0.0;
  cfg.sensor.beams = 360;
  cfg.motion.odometry_covariance = Eigen::Matrix3d::Identity() * 1e-24;
  return cfg;
}

}  // namespace

TEST_CASE("fully known map has no frontiers") {
  const auto m = known_room(20, 20);
  CHECK(detect_frontiers(m, 1).empty());
}

TEST_CASE("frontier predicate matches its definition") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick(0, 2);
  OccupancyGrid m(geometry(12, 9));
  const auto& g = m.geometry();
  for (std::size_t i = 0; i < g.cell_count(); ++i) {
    const int s = pick(rng);
    if (s == 1) m.update(i, -5.0);
    if (s == 2) m.update(i, 5.0);
  }
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      bool unknown_nb = false;
      for (Cell d : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
        const Cell n{x + d.x, y + d.y};
        if (g.contains(n) && m.state(n) == CellState::unknown) unknown_nb = true;
      }
      const bool expected = m.state(Cell{x, y}) == CellState::free && unknown_nb;
      CHECK(is_frontier(m, g.index({x, y})) == expected);
    }
  }
}

TEST_CASE("half-disc scan leaves one frontier arc") {
  auto world = std::make_shared<const slam::WorldModel>(empty_room(14.0, 14.0));
  slam::SlamState state(world, quiet_config(), Pose2(7.0, 7.0, 0.0), 1);
  const auto clusters = detect_frontiers(state.map());
  REQUIRE(clusters.size() == 1);
  // The arc is the flat side of the half disc plus the curved rim.
  CHECK(clusters[0].size() > 100);
}

TEST_CASE("two separated regions give two clusters sorted by size") {
  OccupancyGrid m(geometry(30, 10));
  for (int x = 2; x < 6; ++x) {
    for (int y = 2; y < 8; ++y) set_free(m, {x, y});
  }
  for (int x = 20; x < 22; ++x) {
    for (int y = 3; y < 6; ++y) set_free(m, {x, y});
  }
  const auto clusters = detect_frontiers(m, 1);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].size() > clusters[1].size());
  CHECK(clusters[0].centroid.x() < clusters[1].centroid.x());
  CHECK(detect_frontiers(m, 7).size() == 1);
}

TEST_CASE("planner") {
  const auto m = known_room(101, 101);  // 10.1 m square at 0.1 m
  SUBCASE("goal in the start cell") {
    const auto p = plan_path(m, Pose2(5.02, 5.03, 0.3), {5.04, 5.01});
    REQUIRE(p);
    CHECK(p->poses.size() == 1);
    CHECK(p->length == 0.0);
  }
  SUBCASE("corner to corner stays near the diagonal") {
    PlannerConfig cfg;
    cfg.inflation_radius = 0.2;
    const Eigen::Vector2d goal(9.55, 9.55);
    const auto p = plan_path(m, Pose2(0.55, 0.55, 0.0), goal, cfg);
    REQUIRE(p);
    const double straight = std::hypot(9.0, 9.0);
    CHECK(p->length >= straight - 1e-9);
    CHECK(p->length <= 1.05 * straight);
    CHECK(p->poses.front().x() == doctest::Approx(0.55));
    CHECK(p->poses.back().x() == doctest::Approx(goal.x()));
  }
  SUBCASE("walls block") {
    auto walled = m;
    for (int y = 0; y < 101; ++y) set_occupied(walled, {50, y});
    CHECK_FALSE(plan_path(walled, Pose2(2.0, 5.0, 0.0), {8.0, 5.0}));
  }
  SUBCASE("unknown goal is unreachable") {
    OccupancyGrid partial = m;
    set_log_odds(partial, {80, 80}, 0.0);
    CHECK_FALSE(plan_path(partial, Pose2(2.0, 2.0, 0.0), {8.05, 8.05}));
  }
  SUBCASE("start inside an obstacle is rejected") {
    CHECK_THROWS_AS(plan_path(m, Pose2(0.05, 5.0, 0.0), {5.0, 5.0}), DomainError);
  }
  SUBCASE("clearance closes gaps narrower than the robot") {
    auto gap = known_room(60, 30);  // 6 x 3 m
    for (int y = 0; y < 30; ++y) {
      if (y < 14 || y > 15) set_occupied(gap, {30, y});
    }
    const Pose2 from(1.0, 1.5, 0.0);
    const Eigen::Vector2d to(5.0, 1.5);
    CHECK_FALSE(plan_path(gap, from, to));  // 0.2 m opening
    CHECK(plan_path(gap, from, to, {0.05, 0.1, 10.0}));
    for (int y = 10; y < 20; ++y) set_free(gap, {30, y});
    const auto p = plan_path(gap, from, to);  // 1.0 m opening
    REQUIRE(p);
    for (const auto& pose : p->poses) {
      if (std::abs(pose.x() - 3.05) < 0.2) CHECK(std::abs(pose.y() - 1.5) < 0.35);
    }
  }
  SUBCASE("no corner cutting") {
    auto diag = known_room(6, 6);
    set_occupied(diag, {2, 3});
    set_occupied(diag, {3, 2});
    CHECK_FALSE(plan_path(diag, Pose2(0.25, 0.25, 0.0), {0.35, 0.35}, {0.0, 0.0}) == std::nullopt);
    CHECK_FALSE(plan_path(diag, Pose2(0.25, 0.25, 0.0), {0.35, 0.35}, {0.0, 0.0})->poses.empty());
    // (2,2) -> (3,3) must go around both blocked cells.
    const auto p = plan_path(diag, Pose2(0.25, 0.25, 0.0), {0.35, 0.35}, {0.0, 0.0});
    CHECK(p->length > std::sqrt(2.0) * 0.1 + 1e-9);
  }
}

TEST_CASE("normalized scores and selection") {
  std::vector<UtilityTerms> t{{1.0, 2.0}, {3.0, 1.0}, {2.0, 3.0}};
  const auto s = normalized_scores(t, 1.0);
  CHECK(s[0] == doctest::Approx(0.5));
  CHECK(s[1] == doctest::Approx(1.0));
  CHECK(s[2] == doctest::Approx(1.5));
  CHECK(argmax_first(s) == 2);
  std::vector<double> ties{1.0, 2.0, 2.0};
  CHECK(argmax_first(ties) == 1);
  const auto flat = normalized_scores(std::vector<UtilityTerms>{{1, 1}, {1, 1}}, 1.0);
  CHECK(flat[0] == 0.0);
  CHECK(flat[1] == 0.0);
  CHECK(utility({2.0, 3.0}, 0.5) == doctest::Approx(3.5));
}

TEST_CASE("expected visible area") {
  const auto known = known_room(40, 40);
  slam::SensorModel sensor;
  sensor.beams = 720;
  CHECK(expected_visible_area(known, Pose2(2.0, 2.0, 0.0), sensor) == 0.0);

  // Revealing cells one at a time never increases the expected gain.
  OccupancyGrid m(geometry(40, 40));
  for (int x = 0; x < 40; ++x) {
    set_occupied(m, {x, 0});
    set_occupied(m, {x, 39});
  }
  const Pose2 view(2.0, 2.0, 0.3);
  double previous = expected_visible_area(m, view, sensor);
  CHECK(previous > 0.0);
  for (int x = 5; x < 35; x += 3) {
    for (int y = 1; y < 39; y += 4) set_free(m, {x, y});
    const double now = expected_visible_area(m, view, sensor);
    CHECK(now <= previous);
    previous = now;
  }
}

TEST_CASE("hallucinated graph") {
  slam::SlamConfig cfg;
  PoseGraph g;
  g.add_node(Pose2(0, 0, 0), 0);
  for (int i = 1; i <= 12; ++i) {
    g.add_node(Pose2(0.3 * i, 0, 0), 0);
    g.add_edge({NodeId(i - 1), NodeId(i), Pose2(0.3, 0, 0), cfg.motion.odometry_info(), EdgeKind::odometry});
  }

  SUBCASE("empty path predicts the current graph") {
    Path none;
    none.poses.push_back(Pose2(3.6, 0, 0));
    const auto h = hallucinate_graph(g, none, cfg);
    CHECK(h == g);
    CHECK(utility({toed::dopt_graph(h), 0.0}, 1.0) == toed::dopt_graph(g));
  }
  SUBCASE("a path back over old nodes adds a loop closure") {
    Path back;
    back.poses = {Pose2(3.6, 0.2, M_PI), Pose2(0.0, 0.2, M_PI)};
    back.length = 3.6;
    const auto h = hallucinate_graph(g, back, cfg);
    CHECK(h.node_count() == g.node_count() + 12);
    CHECK(h.loop_closure_count() == 0);  // headings differ by pi from every old node

    // Around a loop, ending on the old chain with the old heading.
    back.poses = {Pose2(3.6, 0.0, 0.0), Pose2(3.6, 2.0, 0.0), Pose2(-1.0, 2.0, 0.0), Pose2(-1.0, 0.2, 0.0),
                  Pose2(2.0, 0.2, 0.0)};
    back.length = 2.0 + 4.6 + 1.8 + 3.0;
    Path away;
    away.poses = {Pose2(3.6, 0.0, 0.0), Pose2(15.0, 0.0, 0.0)};
    away.length = 11.4;
    const auto toward = hallucinate_graph(g, back, cfg);
    const auto outward = hallucinate_graph(g, away, cfg);
    CHECK(toward.node_count() == outward.node_count());
    CHECK(outward.loop_closure_count() == 0);
    CHECK(toward.loop_closure_count() >= 1);
    CHECK(toed::dopt_graph(toward) > toed::dopt_graph(outward));
  }
}

TEST_CASE("explorer in a room seen whole from the start is exhausted") {
  auto world = std::make_shared<const slam::WorldModel>(empty_room(2.0, 2.0));
  auto cfg = quiet_config();
  cfg.sensor.fov = 2 * M_PI;
  Explorer ex(world, cfg, ExplorerConfig{}, Pose2(1.0, 1.0, 0.0), 1);
  const auto out = ex.select_and_execute();
  CHECK(out.result == StepResult::exhausted);
  CHECK(out.candidates.empty());
  CHECK_FALSE(out.selected.has_value());
  CHECK(ex.steps() == 1);
}

TEST_CASE("explorer drives to the only frontier") {
  // Long corridor; a short sensor range leaves one frontier ahead.
  auto world = std::make_shared<const slam::WorldModel>(empty_room(6.0, 1.2));
  auto cfg = quiet_config();
  cfg.sensor.fov = 2 * M_PI;
  cfg.sensor.max_range = 2.0;
  Explorer ex(world, cfg, ExplorerConfig{}, Pose2(0.6, 0.6, 0.0), 1);
  const auto out = ex.select_and_execute();
  REQUIRE(out.candidates.size() == 1);
  REQUIRE(out.selected.has_value());
  CHECK(*out.selected == 0);
  CHECK(out.result == StepResult::reached);
  const auto& goal = out.candidates[0].goal;
  CHECK(goal.x() > 2.0);
  CHECK(ex.slam().true_pose().x() > 1.5);
}

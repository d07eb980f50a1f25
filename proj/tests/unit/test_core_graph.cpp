#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "graph_fixtures.hpp"
#include "stopslam/core/errors.hpp"
#include "stopslam/core/graph_io.hpp"
#include "stopslam/core/laplacian.hpp"
#include "stopslam/core/random_graph.hpp"

using namespace stopslam;
using stopslam::testing::make_graph;
using stopslam::testing::triangle;

namespace {

std::vector<double> ones(std::size_t m) { return std::vector<double>(m, 1.0); }

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("pose angles stay in (-pi, pi]") {
  constexpr double pi = std::numbers::pi;
  CHECK(Pose2(0, 0, -pi).theta() == doctest::Approx(pi));
  CHECK(Pose2(0, 0, pi).theta() == pi);
  CHECK(Pose2(0, 0, 3 * pi).theta() == doctest::Approx(pi));
  CHECK(Pose2(0, 0, 2 * pi + 0.25).theta() == doctest::Approx(0.25));
  const Pose2 a(1, 2, 3.0);
  const Pose2 b = a * Pose2(0, 0, 1.0);
  CHECK(b.theta() > -pi);
  CHECK(b.theta() <= pi);
  CHECK(b.theta() == doctest::Approx(4.0 - 2 * pi));

  const Pose2 p(1.5, -0.5, 0.7);
  const Pose2 q(-2.0, 3.0, -2.9);
  const Pose2 rel = Pose2::between(p, q);
  const Pose2 back = p * rel;
  CHECK(back.x() == doctest::Approx(q.x()));
  CHECK(back.y() == doctest::Approx(q.y()));
  CHECK(back.theta() == doctest::Approx(q.theta()));
}

TEST_CASE("information matrices are validated") {
  Eigen::Matrix3d asym = Eigen::Matrix3d::Identity();
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(InfoMatrix3{asym}, DomainError);
  CHECK_THROWS_AS(InfoMatrix3::diagonal(1, -1, 1), DomainError);
  Eigen::Matrix3d nan = Eigen::Matrix3d::Identity();
  nan(2, 2) = std::nan("");
  CHECK_THROWS_AS(InfoMatrix3{nan}, DomainError);
  CHECK_NOTHROW(InfoMatrix3{Eigen::Matrix3d::Zero()});

  const auto info = InfoMatrix3::from_covariance(Eigen::Vector3d(1e-4, 1e-4, 2.5e-5).asDiagonal());
  CHECK(info(0, 0) == doctest::Approx(1e4));
  CHECK(info(1, 1) == doctest::Approx(1e4));
  CHECK(info(2, 2) == doctest::Approx(4e4));
}

TEST_CASE("graph edge invariants") {
  PoseGraph g;
  g.add_node({});
  g.add_node({1, 0, 0});
  g.add_node({2, 0, 0});
  CHECK_THROWS_AS(g.add_edge({0, 3, {}, {}, EdgeKind::loop_closure}), ConfigError);
  CHECK_THROWS_AS(g.add_edge({1, 1, {}, {}, EdgeKind::loop_closure}), ConfigError);
  CHECK_THROWS_AS(g.add_edge({0, 2, {}, {}, EdgeKind::odometry}), ConfigError);
  g.add_edge({0, 1, {}, {}, EdgeKind::odometry});
  CHECK_FALSE(g.is_connected());
  g.add_edge({0, 2, {}, {}, EdgeKind::loop_closure});
  CHECK(g.is_connected());
  CHECK(g.loop_closure_count() == 1);
}

TEST_CASE("weighted Laplacian construction") {
  SUBCASE("triangle, unit weights") {
    const auto L = build_weighted_laplacian(triangle(), ones(3)).dense();
    Eigen::Matrix3d expected;
    expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
    CHECK(L.isApprox(expected));
  }
  SUBCASE("single edge weight 2") {
    const std::vector<double> w{2.0};
    const auto L = build_weighted_laplacian(make_graph(2, {{0, 1}}), w).dense();
    CHECK(L.isApprox((Eigen::Matrix2d() << 2, -2, -2, 2).finished()));
  }
  SUBCASE("parallel edges sum") {
    const std::vector<double> w{1.0, 3.0};
    const auto L = build_weighted_laplacian(make_graph(2, {{0, 1}, {0, 1}}), w).dense();
    CHECK(L.isApprox((Eigen::Matrix2d() << 4, -4, -4, 4).finished()));
  }
  SUBCASE("errors") {
    const std::vector<double> short_w{1.0, 1.0};
    CHECK_THROWS_AS(build_weighted_laplacian(triangle(), short_w), ConfigError);
    const std::vector<double> neg{1.0, -1.0, 1.0};
    CHECK_THROWS_AS(build_weighted_laplacian(triangle(), neg), DomainError);
    const std::vector<double> inf{1.0, INFINITY, 1.0};
    CHECK_THROWS_AS(build_weighted_laplacian(triangle(), inf), DomainError);
  }
}

TEST_CASE("log spanning-tree count matches closed forms") {
  CHECK(log_weighted_spanning_trees(build_weighted_laplacian(triangle(), ones(3))) == doctest::Approx(std::log(3.0)));
  const std::vector<double> w2{2.0};
  CHECK(log_weighted_spanning_trees(build_weighted_laplacian(make_graph(2, {{0, 1}}), w2)) ==
        doctest::Approx(std::log(2.0)));
  const auto k4 = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(log_weighted_spanning_trees(build_weighted_laplacian(k4, ones(6))) == doctest::Approx(std::log(16.0)));
}

TEST_CASE("disconnection is an error, never -inf") {
  const auto split = make_graph(4, {{0, 1}, {2, 3}});
  CHECK_THROWS_AS(log_weighted_spanning_trees(build_weighted_laplacian(split, ones(2))), DisconnectedGraphError);
  // A zero weight cutting the only bridge.
  const auto path = make_graph(3, {{0, 1}, {1, 2}});
  const std::vector<double> cut{1.0, 0.0};
  CHECK_THROWS_AS(log_weighted_spanning_trees(build_weighted_laplacian(path, cut)), DisconnectedGraphError);
  const std::vector<double> none;
  CHECK_THROWS_AS(log_weighted_spanning_trees(build_weighted_laplacian(make_graph(1, {}), none)), ConfigError);
}

TEST_CASE("log domain survives counts beyond double range") {
  std::mt19937_64 rng(7);
  RandomGraphOptions opt;
  opt.nodes = 400;
  opt.min_extra_edges = opt.max_extra_edges = 200;
  opt.min_weight = opt.max_weight = 1e4;
  const auto g = random_connected_graph(opt, rng);
  std::vector<double> w(g.edge_count(), 1e4);
  const double log_t = log_weighted_spanning_trees(build_weighted_laplacian(g, w));
  CHECK(std::isfinite(log_t));
  CHECK(log_t > std::log(1e4) * 399);  // at least the spanning chain's product
  CHECK(log_t > 709.0);                // exp would overflow
}

TEST_CASE("brute-force spanning-tree oracle") {
  CHECK(brute_force_spanning_trees(triangle(), ones(3)) == 3.0);
  CHECK(brute_force_spanning_trees(make_graph(3, {{0, 1}, {1, 2}}), ones(2)) == 1.0);
  const std::vector<double> w{1.0, 2.0, 3.0};
  CHECK(brute_force_spanning_trees(triangle(), w) == 11.0);
  const auto k4 = make_graph(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(brute_force_spanning_trees(k4, ones(6)) == 16.0);  // Cayley: 4^2
  const std::vector<double> par{1.0, 3.0};
  CHECK(brute_force_spanning_trees(make_graph(2, {{0, 1}, {0, 1}}), par) == 4.0);

  PoseGraph big;
  for (int i = 0; i < 11; ++i) big.add_node({});
  CHECK_THROWS_AS(brute_force_spanning_trees(big, std::vector<double>{}), EnumerationLimitError);
}

TEST_CASE("matrix-tree equivalence on random graphs") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> size(3, 8);
  for (int trial = 0; trial < 60; ++trial) {
    RandomGraphOptions opt;
    opt.nodes = size(rng);
    opt.max_extra_edges = opt.nodes;
    const auto g = random_connected_graph(opt, rng);
    std::uniform_real_distribution<double> wd(0.1, 10.0);
    std::vector<double> w(g.edge_count());
    for (auto& x : w) x = wd(rng);
    const double expected = brute_force_spanning_trees(g, w);
    const auto L = build_weighted_laplacian(g, w);
    CHECK(rel_err(std::exp(log_weighted_spanning_trees(L)), expected) < 1e-9);

    // Every cofactor agrees.
    const double base = log_weighted_spanning_trees(L, 0);
    for (std::size_t k = 1; k < g.node_count(); ++k) {
      CHECK(rel_err(log_weighted_spanning_trees(L, k), base) < 1e-9);
    }
  }
}

TEST_CASE("Laplacian rows sum to zero and the null space counts components") {
  std::mt19937_64 rng(11);
  RandomGraphOptions opt;
  opt.nodes = 7;
  opt.max_extra_edges = 5;
  opt.min_weight = 0.1;
  opt.max_weight = 10.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = random_connected_graph(opt, rng);
    std::uniform_real_distribution<double> wd(0.1, 10.0);
    std::vector<double> w(g.edge_count());
    for (auto& x : w) x = wd(rng);
    const Eigen::MatrixXd L = build_weighted_laplacian(g, w).dense();
    CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() < 1e-9);
    for (Eigen::Index i = 0; i < L.rows(); ++i) {
      CHECK(L(i, i) >= 0.0);
      for (Eigen::Index j = 0; j < L.cols(); ++j) {
        if (i != j) CHECK(L(i, j) <= 0.0);
      }
    }
    const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues();
    const auto zeros = (eig.array().abs() < 1e-9 * eig.maxCoeff()).count();
    CHECK(zeros == 1);
  }
  // Three components: {0,1}, {2,3,4}, {5}.
  const auto split = make_graph(6, {{0, 1}, {2, 3}, {3, 4}, {2, 4}});
  const Eigen::MatrixXd L = build_weighted_laplacian(split, ones(4)).dense();
  const Eigen::VectorXd eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues();
  CHECK((eig.array().abs() < 1e-9).count() == 3);
}

TEST_CASE("average node degree") {
  CHECK(average_node_degree(triangle()) == 2.0);
  CHECK(average_node_degree(make_graph(2, {{0, 1}})) == 1.0);
}

TEST_CASE("pose-graph text records round-trip exactly") {
  std::mt19937_64 rng(5);
  RandomGraphOptions opt;
  opt.nodes = 60;
  opt.min_extra_edges = 10;
  opt.max_extra_edges = 20;
  opt.min_weight = 0.5;
  opt.max_weight = 500.0;
  opt.isotropic = false;
  const auto g = random_connected_graph(opt, rng);
  std::stringstream buffer;
  write_pose_graph(buffer, g);
  const auto back = read_pose_graph(buffer);
  REQUIRE(back.node_count() == g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    CHECK(back.node(i).id == g.node(i).id);
    CHECK(back.node(i).pose == g.node(i).pose);
  }
  CHECK(back.edges() == g.edges());
}

TEST_CASE("pose-graph parse errors carry line numbers") {
  SUBCASE("missing vertex") {
    std::istringstream in("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\nEDGE_SE2 0 2 1 0 0 1 0 0 1 0 1\n");
    try {
      read_pose_graph(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("truncated edge") {
    std::istringstream in("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\nEDGE_SE2 0 1 1 0 0 1 0\n");
    CHECK_THROWS_AS(read_pose_graph(in), ParseError);
  }
  SUBCASE("unknown tag") {
    std::istringstream in("VERTEX_SE2 0 0 0 0\nFOO 1\n");
    try {
      read_pose_graph(in);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("gap in ids") {
    std::istringstream in("VERTEX_SE2 0 0 0 0\nVERTEX_SE2 2 1 0 0\n");
    CHECK_THROWS_AS(read_pose_graph(in), ParseError);
  }
  SUBCASE("comments and blanks are skipped") {
    std::istringstream in("# seed=1\n\nVERTEX_SE2 0 0 0 0\nVERTEX_SE2 1 1 0 0\nEDGE_SE2 0 1 1 0 0 1 0 0 1 0 1\n");
    const auto g = read_pose_graph(in);
    CHECK(g.node_count() == 2);
    CHECK(g.edges().front().kind == EdgeKind::odometry);
  }
}

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "fjs/error.hpp"
#include "fjs/graph.hpp"
#include "helpers.hpp"

using namespace fjs;
using testing_support::to_graph;

TEST_CASE("single edge builds a two node graph") {
  const std::vector<EdgeTriple> t{{1, 2, 1.0, 1}};
  const Graph g = Graph::build(t);
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.degrees()[0] == 1.0);
  CHECK(g.degrees()[1] == 1.0);
}

TEST_CASE("duplicate edges merge by summing weights") {
  const std::vector<EdgeTriple> t{{7, 9, 2.0, 1}, {9, 7, 3.0, 2}};
  const Graph g = Graph::build(t);
  CHECK(g.node_count() == 2);
  REQUIRE(g.edge_count() == 1);
  CHECK(g.edges()[0].w == 5.0);
  CHECK(g.merged_parallel_edges() == 1);
}

TEST_CASE("self loops are dropped and counted") {
  const std::vector<EdgeTriple> t{{1, 1, 4.0, 1}, {1, 2, 1.0, 2}};
  const Graph g = Graph::build(t);
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.dropped_self_loops() == 1);
}

TEST_CASE("invalid weights are rejected with the offending line") {
  for (double w : {0.0, -1.0, std::nan(""), std::numeric_limits<double>::infinity()}) {
    const std::vector<EdgeTriple> t{{1, 2, 1.0, 1}, {2, 3, w, 17}};
    try {
      (void)Graph::build(t);
      FAIL("expected rejection");
    } catch (const InputError& e) {
      CHECK(std::string(e.what()).find("line 17") != std::string::npos);
    }
  }
}

TEST_CASE("empty input is rejected") {
  CHECK_THROWS_AS(Graph::build({}), InputError);
  CHECK_THROWS_AS(Graph::from_indexed_edges(0, {}), InputError);
}

TEST_CASE("ids are interned in first appearance order, declared nodes last") {
  const std::vector<EdgeTriple> t{{40, 10, 1.0, 1}, {10, 30, 1.0, 2}};
  const std::vector<NodeId> declared{99, 10};
  const Graph g = Graph::build(t, declared);
  REQUIRE(g.node_count() == 4);
  CHECK(g.node_id(0) == 40);
  CHECK(g.node_id(1) == 10);
  CHECK(g.node_id(2) == 30);
  CHECK(g.node_id(3) == 99);
  CHECK(g.index_of(30) == 2);
  CHECK(g.index_of(12345) == g.node_count());
  CHECK(g.degrees()[3] == 0.0);
}

TEST_CASE("stored edges are canonical and adjacency is symmetric") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    const Graph g = to_graph(n, oracle::random_edges(rng, n, 0.2));
    for (const Edge& e : g.edges()) CHECK(e.u < e.v);
    for (std::size_t i = 0; i < n; ++i) {
      const auto nb = g.neighbors(i);
      const auto w = g.neighbor_weights(i);
      double row = 0.0;
      for (std::size_t p = 0; p < nb.size(); ++p) {
        row += w[p];
        const auto back = g.neighbors(nb[p]);
        const auto it = std::find(back.begin(), back.end(), i);
        REQUIRE(it != back.end());
        CHECK(g.neighbor_weights(nb[p])[it - back.begin()] == w[p]);
      }
      CHECK(row == g.degrees()[i]);  // same summation order, exact
    }
  }
}

TEST_CASE("laplacian on fixtures") {
  const Graph path = testing_support::two_node_path();
  const std::vector<double> x{1.0, -1.0};
  const auto y = laplacian_apply(path, x);
  CHECK(y[0] == 2.0);
  CHECK(y[1] == -2.0);

  const std::vector<Edge> tri{{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}};
  const Graph g = Graph::from_indexed_edges(3, tri);
  const auto yt = laplacian_apply(g, std::vector<double>{1.0, 0.0, 0.0});
  CHECK(yt[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(yt[1] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(yt[2] == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("laplacian annihilates constants and matches the dense oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    const auto raw = oracle::random_edges(rng, n, 0.1);
    const Graph g = to_graph(n, raw);
    const auto ones = laplacian_apply(g, std::vector<double>(n, 1.0));
    for (double v : ones) CHECK(std::abs(v) <= 1e-12 * n * std::max(1.0, g.w_max()));

    const Eigen::VectorXd x = oracle::random_vector(rng, n, -1.0, 1.0);
    const Eigen::VectorXd expect = oracle::laplacian(n, raw) * x;
    const auto got = laplacian_apply(g, testing_support::to_std(x));
    CHECK((testing_support::to_eigen(got) - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
  }
}

TEST_CASE("incidence composition equals the laplacian") {
  std::mt19937_64 rng(5);
  const std::size_t n = 60;
  const Graph g = to_graph(n, oracle::random_edges(rng, n, 0.1));
  const IncidenceView b(g);
  CHECK(b.rows() == g.edge_count());
  CHECK(b.cols() == n);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = testing_support::to_std(oracle::random_vector(rng, n, -1.0, 1.0));
    std::vector<double> direct(n), composed(n);
    laplacian_apply(g, x, direct);
    b.compose_laplacian(x, composed);
    const double scale = testing_support::to_eigen(direct).norm();
    CHECK((testing_support::to_eigen(direct) - testing_support::to_eigen(composed)).norm() <=
          1e-12 * scale);
    // x'Lx equals the weighted squared incidence norm.
    const double quad = testing_support::to_eigen(x).dot(testing_support::to_eigen(direct));
    CHECK(b.weighted_norm_squared(x) == doctest::Approx(quad).epsilon(1e-12));
  }
}

TEST_CASE("incidence rows are signed e_u - e_v") {
  const std::vector<Edge> e{{0, 2, 3.0}};
  const Graph g = Graph::from_indexed_edges(3, e);
  std::vector<double> out(1);
  IncidenceView(g).apply(std::vector<double>{5.0, 7.0, 2.0}, out);
  CHECK(out[0] == 3.0);
  std::vector<double> back(3);
  IncidenceView(g).apply_transpose(std::vector<double>{1.0}, back);
  CHECK(back == std::vector<double>{1.0, 0.0, -1.0});
}

TEST_CASE("stubbornness validation and extremes") {
  const StubbornnessVector k({2.0, 0.5, 3.0});
  CHECK(k.k_min() == 0.5);
  CHECK(k.k_max() == 3.0);
  CHECK(k.total() == 5.5);
  CHECK_THROWS_AS(StubbornnessVector({1.0, 0.0}), InputError);
  CHECK_THROWS_AS(StubbornnessVector({1.0, -2.0}), InputError);
  CHECK_THROWS_AS(StubbornnessVector({INFINITY}), InputError);
  CHECK_THROWS_AS(StubbornnessVector(std::vector<double>{}), InputError);
  CHECK_THROWS_AS(check_dimensions(testing_support::two_node_path(), StubbornnessVector::uniform(3, 1.0)),
                  InputError);
}

TEST_CASE("eigen bounds on fixtures") {
  SUBCASE("two node path, k = (2, 1)") {
    const Graph g = testing_support::two_node_path();
    const StubbornnessVector k({2.0, 1.0});
    const auto b = eigen_bounds(g, k);
    CHECK(b.lower == 1.0);
    CHECK(b.upper == 4.0);
    CHECK(b.coarse_upper == 4.0);
    // Dense spectrum {(5 - sqrt 5)/2, (5 + sqrt 5)/2}.
    const Eigen::Vector2d ev =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
            (Eigen::Matrix2d() << 3.0, -1.0, -1.0, 2.0).finished())
            .eigenvalues();
    CHECK(ev(0) == doctest::Approx(1.381966011250105).epsilon(1e-14));
    CHECK(ev(1) == doctest::Approx(3.618033988749895).epsilon(1e-14));
    CHECK(ev(0) >= b.lower);
    CHECK(ev(1) <= b.upper);
  }
  SUBCASE("single node") {
    const std::vector<NodeId> declared{5};
    const Graph g = Graph::build({}, declared);
    const auto b = eigen_bounds(g, StubbornnessVector({5.0}));
    CHECK(b.lower == 5.0);
    CHECK(b.upper == 5.0);
    CHECK(b.coarse_upper == 5.0);
  }
  SUBCASE("star with three leaves") {
    const std::vector<Edge> e{{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}};
    const Graph g = Graph::from_indexed_edges(4, e);
    const auto b = eigen_bounds(g, StubbornnessVector::uniform(4, 1.0));
    CHECK(b.lower == 1.0);
    CHECK(b.coarse_upper == 5.0);
    CHECK(b.upper == 7.0);
  }
}

TEST_CASE("dense spectrum of L + K lies inside both brackets") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    const auto raw = oracle::random_edges(rng, n, 0.15);
    const Graph g = to_graph(n, raw);
    const Eigen::VectorXd kv = oracle::random_vector(rng, n, 0.2, 3.0);
    const StubbornnessVector k(testing_support::to_std(kv));
    const auto b = eigen_bounds(g, k);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(oracle::system_matrix(oracle::laplacian(n, raw), kv))
            .eigenvalues();
    CHECK(ev.minCoeff() >= b.lower * (1 - 1e-12));
    CHECK(ev.maxCoeff() <= b.upper * (1 + 1e-12));
    CHECK(ev.maxCoeff() <= b.coarse_upper * (1 + 1e-12));
  }
}

TEST_CASE("graph construction is deterministic") {
  std::mt19937_64 rng(23);
  std::vector<EdgeTriple> t;
  for (std::size_t e = 0; e < 500; ++e) {
    t.push_back({static_cast<NodeId>(rng() % 100), static_cast<NodeId>(rng() % 100), 1.0 + (rng() % 7),
                 e + 1});
  }
  t.push_back({1000, 1001, 2.0, 501});
  const Graph a = Graph::build(t);
  const Graph b = Graph::build(t);
  CHECK(a.fingerprint() == b.fingerprint());
  REQUIRE(a.edge_count() == b.edge_count());
  for (std::size_t e = 0; e < a.edge_count(); ++e) {
    CHECK(a.edges()[e].u == b.edges()[e].u);
    CHECK(a.edges()[e].v == b.edges()[e].v);
    CHECK(a.edges()[e].w == b.edges()[e].w);
  }
  t.back().w += 1.0;
  CHECK(Graph::build(t).fingerprint() != a.fingerprint());
}

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "fjs/dynamics.hpp"
#include "fjs/error.hpp"
#include "helpers.hpp"

using namespace fjs;
using testing_support::to_eigen;
using testing_support::to_graph;
using testing_support::to_std;

namespace {

struct RandomCase {
  std::size_t n;
  std::vector<oracle::RawEdge> raw;
  Graph g;
  Eigen::VectorXd k;
  Eigen::VectorXd s;
};

RandomCase random_case(std::mt19937_64& rng, std::size_t n_lo, std::size_t n_hi, double p = 0.15) {
  const std::size_t n = n_lo + rng() % (n_hi - n_lo + 1);
  auto raw = oracle::random_edges(rng, n, p);
  Graph g = to_graph(n, raw);
  return {n, raw, std::move(g), oracle::random_vector(rng, n, 0.5, 2.0),
          oracle::random_vector(rng, n, -1.0, 1.0)};
}

}  // namespace

TEST_CASE("one synchronous step on the two node path") {
  const Graph g = testing_support::two_node_path();
  const StubbornnessVector k({2.0, 1.0});
  const OpinionState start({1.0, -1.0}, {0.0, 0.0});
  const OpinionState next = step(g, k, start);
  CHECK(next.time() == 1);
  CHECK(next.expressed()[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(next.expressed()[1] == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(next.shared_innate() == start.shared_innate());
  CHECK_THROWS_AS(OpinionState({1.0}, {0.0, 0.0}), InputError);
}

TEST_CASE("equilibria of the two node fixtures") {
  const Graph g = testing_support::two_node_path();
  const std::vector<double> s{1.0, -1.0};
  for (auto mode : {SolveMode::exact, SolveMode::iterative}) {
    const auto z1 = equilibrium(g, StubbornnessVector({1.0, 1.0}), s, mode);
    CHECK(std::abs(z1[0] - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(z1[1] + 1.0 / 3.0) <= 1e-12);
    const auto z2 = equilibrium(g, StubbornnessVector({2.0, 1.0}), s, mode);
    CHECK(std::abs(z2[0] - 0.6) <= 1e-12);
    CHECK(std::abs(z2[1] + 0.2) <= 1e-12);
    // Total opinion is not conserved with unequal stubbornness.
    CHECK(std::abs(z2[0] + z2[1] - 0.4) <= 1e-12);
  }
  const auto zp = equilibrium(g, StubbornnessVector({2.0, 1.0}), std::vector<double>{1.0, -2.0},
                              SolveMode::exact);
  CHECK(std::abs(zp[0] - 0.4) <= 1e-12);
  CHECK(std::abs(zp[1] + 0.8) <= 1e-12);
}

TEST_CASE("fundamental matrix of the two node fixture") {
  const Eigen::MatrixXd phi =
      fundamental_matrix(testing_support::two_node_path(), StubbornnessVector({2.0, 1.0}));
  CHECK(std::abs(phi(0, 0) - 0.8) <= 1e-12);
  CHECK(std::abs(phi(0, 1) - 0.2) <= 1e-12);
  CHECK(std::abs(phi(1, 0) - 0.4) <= 1e-12);
  CHECK(std::abs(phi(1, 1) - 0.6) <= 1e-12);
}

TEST_CASE("dense paths refuse graphs above the cap") {
  const Graph g = testing_support::two_node_path();
  const StubbornnessVector k({1.0, 1.0});
  const std::vector<double> s{1.0, 0.0};
  CHECK_THROWS_AS(equilibrium(g, k, s, SolveMode::exact, 1e-12, 1), SizeGuardError);
  CHECK_THROWS_AS(fundamental_matrix(g, k, 1), SizeGuardError);
  CHECK_NOTHROW(equilibrium(g, k, s, SolveMode::iterative, 1e-12, 1));
}

TEST_CASE("centering rules") {
  const StubbornnessVector k({2.0, 1.0});
  const std::vector<double> s{1.0, 0.0};
  const auto w = center_opinions(s, k, CenteringRule::weighted);
  CHECK(w[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(w[1] == doctest::Approx(-2.0 / 3.0).epsilon(1e-15));
  CHECK(std::abs(2.0 * w[0] + w[1]) <= 1e-15);
  const auto c = center_opinions(s, k, CenteringRule::by_count);
  CHECK(c[0] == doctest::Approx(0.0));
  CHECK(c[1] == doctest::Approx(-1.0));
}

TEST_CASE("spectral radius fixtures") {
  const Graph g = testing_support::two_node_path();
  const auto a = spectral_radius(g, StubbornnessVector({2.0, 1.0}));
  CHECK(a.converged);
  CHECK(std::abs(a.rho - std::sqrt(1.0 / 6.0)) <= 1e-10);
  CHECK(a.upper >= a.rho);
  const auto b = spectral_radius(g, StubbornnessVector({3.0, 1.0}));
  CHECK(std::abs(b.rho - std::sqrt(1.0 / 8.0)) <= 1e-10);
  const std::vector<NodeId> lone{1};
  CHECK(spectral_radius(Graph::build({}, lone), StubbornnessVector({1.0})).rho == 0.0);
}

TEST_CASE("spectral radius matches a dense eigensolve, bipartite graphs included") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    // p = 0 gives trees, which are bipartite.
    auto c = random_case(rng, 2, 40, trial % 2 ? 0.0 : 0.15);
    const StubbornnessVector k(to_std(c.k));
    const auto est = spectral_radius(c.g, k);
    const double dense = oracle::spectral_radius(oracle::laplacian(c.n, c.raw), c.k);
    CHECK(est.converged);
    CHECK(std::abs(est.rho - dense) <= 1e-9);
    CHECK(est.upper >= dense - 1e-12);
    CHECK(dense < 1.0);
  }
}

TEST_CASE("convergence bound") {
  CHECK(convergence_bound(std::sqrt(1.0 / 6.0), 1.0, 1e-6) == 16);
  CHECK(convergence_bound(0.5, 1.0, 0.125) == 3);
  CHECK(convergence_bound(0.5, 1.0, 2.0) == 0);
  CHECK(convergence_bound(0.5, 1.0, 1.0) == 0);
  CHECK(convergence_bound(0.0, 1.0, 0.5) == 1);
  CHECK_THROWS_AS(convergence_bound(1.0, 1.0, 0.1), InputError);
  CHECK_THROWS_AS(convergence_bound(0.5, 1.0, 0.0), InputError);
}

TEST_CASE("scaled error uses sqrt(k + d)") {
  const Graph g = testing_support::two_node_path();
  const StubbornnessVector k({2.0, 1.0});
  const auto f = scaled_error(g, k, std::vector<double>{1.0, 1.0}, std::vector<double>{0.0, 0.0});
  CHECK(f[0] == doctest::Approx(std::sqrt(3.0)));
  CHECK(f[1] == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("row sums of QA are d / (k + d) and below one") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_case(rng, 1, 100);
    const StubbornnessVector k(to_std(c.k));
    const ScalingDiagonal q(c.g, k);
    for (std::size_t i = 0; i < c.n; ++i) {
      double row = 0.0;
      for (double w : c.g.neighbor_weights(i)) row += q[i] * w;
      const double d = c.g.degrees()[i];
      CHECK(std::abs(row - d / (c.k(static_cast<Eigen::Index>(i)) + d)) <= 1e-12);
      CHECK(row < 1.0);
    }
  }
}

TEST_CASE("equilibrium agrees with the dense oracle and is a fixed point") {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = random_case(rng, 1, 150);
    const StubbornnessVector k(to_std(c.k));
    const auto s = to_std(c.s);
    const Eigen::VectorXd expect = oracle::equilibrium(oracle::laplacian(c.n, c.raw), c.k, c.s);
    const auto z = equilibrium(c.g, k, s, SolveMode::exact);
    CHECK((to_eigen(z) - expect).lpNorm<Eigen::Infinity>() <= 1e-12);
    const auto zi = equilibrium(c.g, k, s, SolveMode::iterative, 1e-12);
    CHECK((to_eigen(zi) - expect).lpNorm<Eigen::Infinity>() <= 1e-10);
    std::vector<double> next(c.n);
    step_into(c.g, k, s, z, next);
    CHECK((to_eigen(next) - to_eigen(z)).lpNorm<Eigen::Infinity>() <= 1e-10);
  }
}

TEST_CASE("fundamental matrix is row stochastic, positive and matches the oracle") {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_case(rng, 1, 120);
    const Eigen::MatrixXd phi = fundamental_matrix(c.g, StubbornnessVector(to_std(c.k)));
    CHECK((phi.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-12);
    CHECK(phi.minCoeff() > 0.0);
    CHECK((phi - oracle::fundamental(oracle::laplacian(c.n, c.raw), c.k)).cwiseAbs().maxCoeff() <=
          1e-12);
  }
}

TEST_CASE("weighted sum and translation properties") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = random_case(rng, 1, 150);
    const StubbornnessVector k(to_std(c.k));
    const auto s = center_opinions(to_std(c.s), k);
    const auto z = equilibrium(c.g, k, s, SolveMode::exact);
    CHECK(std::abs(c.k.dot(to_eigen(z))) <= 1e-9 * c.n * k.k_max());

    const double shift = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
    std::vector<double> shifted = s;
    for (double& v : shifted) v += shift;
    const auto zs = equilibrium(c.g, k, shifted, SolveMode::exact);
    for (std::size_t i = 0; i < c.n; ++i) CHECK(std::abs(zs[i] - z[i] - shift) <= 1e-10);
  }
}

TEST_CASE("uniform stubbornness conserves total opinion") {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 30; ++trial) {
    auto c = random_case(rng, 1, 150);
    const auto k = StubbornnessVector::uniform(c.n, 0.3 + trial * 0.1);
    const auto s = to_std(c.s);
    const auto z = equilibrium(c.g, k, s, SolveMode::exact);
    CHECK(std::abs(std::accumulate(z.begin(), z.end(), 0.0) -
                   std::accumulate(s.begin(), s.end(), 0.0)) <= 1e-9);
  }
}

TEST_CASE("raising one stubbornness lowers the spectral radius") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_case(rng, 2, 40);
    std::vector<double> k = to_std(c.k);
    const double before = spectral_radius(c.g, StubbornnessVector(k)).rho;
    k[rng() % c.n] *= 1.5;
    const double after = spectral_radius(c.g, StubbornnessVector(k)).rho;
    CHECK(before - after > 1e-9);
  }
}

TEST_CASE("lowering k_v shrinks column v of the fundamental matrix and grows the rest") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_case(rng, 2, 40, 0.2);
    std::vector<double> k = to_std(c.k);
    const Eigen::MatrixXd before = fundamental_matrix(c.g, StubbornnessVector(k));
    const std::size_t v = rng() % c.n;
    k[v] *= 0.5;
    const Eigen::MatrixXd delta = fundamental_matrix(c.g, StubbornnessVector(k)) - before;
    for (Eigen::Index i = 0; i < delta.rows(); ++i) {
      for (Eigen::Index j = 0; j < delta.cols(); ++j) {
        if (j == static_cast<Eigen::Index>(v)) {
          CHECK(delta(i, j) < -1e-12);
        } else {
          CHECK(delta(i, j) > 1e-12);
        }
      }
    }
  }
}

TEST_CASE("simulation decays geometrically and stops within the bound") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    auto c = random_case(rng, 1, 80);
    const StubbornnessVector k(to_std(c.k));
    const auto s = to_std(c.s);
    const std::vector<double> z0 = to_std(oracle::random_vector(rng, c.n, -1.0, 1.0));
    for (double eps : {1e-4, 1e-8}) {
      const auto sim = simulate_until(c.g, k, s, z0, eps);
      CHECK(sim.within_bound);
      CHECK(sim.stop_time <= sim.bound);
      CHECK(sim.trace.f_norms.back() <= eps);
      CHECK(sim.state.time() == sim.stop_time);
      const double rho = sim.spectral.upper;
      for (std::size_t t = 0; t + 1 < sim.trace.f_norms.size(); ++t) {
        CHECK(sim.trace.f_norms[t + 1] <= rho * sim.trace.f_norms[t] + 1e-9);
      }
    }
  }
}

TEST_CASE("simulation step cap is a numerical error") {
  const Graph g = testing_support::two_node_path();
  SimulationOptions opt;
  opt.max_steps = 2;
  CHECK_THROWS_AS(simulate_until(g, StubbornnessVector({1.0, 1.0}), std::vector<double>{1.0, -1.0},
                                 std::vector<double>{0.0, 0.0}, 1e-12, opt),
                  NumericalError);
}

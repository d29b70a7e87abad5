// Acceptance harness: one PASS/FAIL line per criterion. Exits nonzero when
// any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "fjs/dynamics.hpp"
#include "fjs/error.hpp"
#include "fjs/forest.hpp"
#include "fjs/generators.hpp"
#include "fjs/metrics.hpp"
#include "fjs/solver.hpp"
#include "helpers.hpp"

using namespace fjs;
using testing_support::to_eigen;
using testing_support::to_graph;
using testing_support::to_std;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Instance {
  std::size_t n = 0;
  std::vector<oracle::RawEdge> raw;
  Graph g;
  Eigen::VectorXd k;
  Eigen::VectorXd s;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n_lo, std::size_t n_hi, double p) {
  Instance in;
  in.n = n_lo + rng() % (n_hi - n_lo + 1);
  in.raw = oracle::random_edges(rng, in.n, p);
  in.g = to_graph(in.n, in.raw);
  in.k = oracle::random_vector(rng, in.n, 0.2, 5.0);
  in.s = oracle::random_vector(rng, in.n, -1.0, 1.0);
  return in;
}

double rel_err(double approx, double exact) {
  if (exact == 0.0) return std::abs(approx);
  return std::abs(approx - exact) / std::abs(exact);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// 1. Approximate vs dense exact metrics.
Outcome approximation_accuracy() {
  const OpinionDistribution dists[] = {OpinionDistribution::uniform, OpinionDistribution::powerlaw,
                                       OpinionDistribution::normal,
                                       OpinionDistribution::exponential};
  std::mt19937_64 rng(1001);
  std::vector<double> errs;
  double worst = 0.0;
  bool certified = true;
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 100 + rng() % 1901;
    Graph g;
    switch (i % 3) {
      case 0: g = random_regular_graph(n, 6, rng()); break;
      case 1: g = preferential_attachment_graph(n, 3, rng()); break;
      default: g = random_connected_graph(n, 4.0 / n, 0.5, 2.0, rng()); break;
    }
    const StubbornnessVector k = random_stubbornness(n, 0.5, 2.0, rng());
    const auto s0 = generate_opinions(n, dists[i % 4], rng());
    // Approx centers internally; the exact reference uses the same shift.
    const auto s = center_opinions(s0, k, CenteringRule::weighted);
    const auto a = approxim(g, k, s0, 1e-6);
    const auto e = metrics_exact(g, k, s);
    certified = certified && a.certified;
    for (double r : {rel_err(a.conflict, e.conflict), rel_err(a.disagreement, e.disagreement),
                     rel_err(a.polarization, e.polarization), rel_err(a.pd_index, e.pd_index)}) {
      errs.push_back(r);
      worst = std::max(worst, r);
    }
  }
  return {worst <= 1e-6 && certified,
          "median rel err " + fmt("%.3g", median(errs)) + ", max " + fmt("%.3g", worst) +
              (certified ? "" : ", uncertified solve")};
}

// 2. C + 2D + P = sum k s^2 in exact mode.
Outcome conservation_law() {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Instance in = random_instance(rng, 1, 200, 0.05);
    const auto r = metrics_exact(in.g, StubbornnessVector(to_std(in.k)), to_std(in.s));
    const double total = (in.k.array() * in.s.array().square()).sum();
    const double resid =
        std::abs(r.conflict + 2.0 * r.disagreement + r.polarization - total) / total;
    worst = std::max(worst, resid);
  }
  return {worst <= 1e-10, "max relative residual " + fmt("%.3g", worst)};
}

// 3. Forest enumeration vs dense inverse and determinant.
Outcome forest_equivalence() {
  std::mt19937_64 rng(1003);
  double worst_abs = 0.0;
  double worst_det = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Instance in = random_instance(rng, 1, 7, 0.4);
    const MappedDigraph d(in.g, StubbornnessVector(to_std(in.k)));
    const ForestEnumeration e = enumerate_forests(d);
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(in.n, in.n) +
                              in.k.cwiseInverse().asDiagonal() * oracle::laplacian(in.n, in.raw);
    worst_abs = std::max(worst_abs, (forest_matrix(e) - m.inverse()).cwiseAbs().maxCoeff());
    worst_det = std::max(worst_det, rel_err(e.total_weight, m.determinant()));
  }
  return {worst_abs <= 1e-9 && worst_det <= 1e-9,
          "max abs " + fmt("%.3g", worst_abs) + ", det rel " + fmt("%.3g", worst_det)};
}

// 4. Raising one stubbornness lowers the spectral radius.
Outcome rho_monotone() {
  std::mt19937_64 rng(1004);
  double weakest = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int i = 0; i < 50; ++i) {
    const Instance in = random_instance(rng, 2, 40, 0.15);
    std::vector<double> k = to_std(in.k);
    const auto before = spectral_radius(in.g, StubbornnessVector(k));
    k[rng() % in.n] *= 1.5;
    const auto after = spectral_radius(in.g, StubbornnessVector(k));
    const double drop = before.rho - after.rho;
    weakest = std::min(weakest, drop);
    if (!(drop > 1e-9)) ++failures;
  }
  return {failures == 0,
          "smallest drop " + fmt("%.3g", weakest) + ", failures " + std::to_string(failures)};
}

// 5. Halving k_v lowers column v of Phi and raises every other entry.
Outcome phi_column_monotone() {
  std::mt19937_64 rng(1005);
  double weakest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 50; ++i) {
    // Connected instances so every entry of Phi is positive.
    const Instance in = random_instance(rng, 2, 40, 0.15);
    std::vector<double> k = to_std(in.k);
    const std::size_t v = rng() % in.n;
    const Eigen::MatrixXd before = fundamental_matrix(in.g, StubbornnessVector(k));
    k[v] *= 0.5;
    const Eigen::MatrixXd change = fundamental_matrix(in.g, StubbornnessVector(k)) - before;
    for (Eigen::Index r = 0; r < change.rows(); ++r)
      for (Eigen::Index c = 0; c < change.cols(); ++c)
        weakest = std::min(weakest, c == static_cast<Eigen::Index>(v) ? -change(r, c)
                                                                       : change(r, c));
  }
  return {weakest > 1e-12, "weakest signed change " + fmt("%.3g", weakest)};
}

// 6. Simulation stops within the bound and decays geometrically.
Outcome convergence_bound_holds() {
  std::mt19937_64 rng(1006);
  double excess = -std::numeric_limits<double>::infinity();
  int late = 0;
  std::uint64_t max_stop = 0;
  for (int i = 0; i < 50; ++i) {
    const Instance in = random_instance(rng, 2, 100, 0.1);
    const StubbornnessVector k(to_std(in.k));
    const double rho = oracle::spectral_radius(oracle::laplacian(in.n, in.raw), in.k);
    const std::vector<double> z0 = to_std(oracle::random_vector(rng, in.n, -1.0, 1.0));
    for (double eps : {1e-4, 1e-8}) {
      const auto sim = simulate_until(in.g, k, to_std(in.s), z0, eps);
      if (sim.stop_time > sim.bound) ++late;
      max_stop = std::max(max_stop, sim.stop_time);
      const auto& f = sim.trace.f_norms;
      for (std::size_t t = 0; t + 1 < f.size(); ++t) excess = std::max(excess, f[t + 1] - rho * f[t]);
    }
  }
  return {late == 0 && excess <= 1e-9, "stop > bound in " + std::to_string(late) +
                                           " runs, max decay excess " + fmt("%.3g", excess) +
                                           ", longest run " + std::to_string(max_stop) + " steps"};
}

// 7. Weighted sum, translation covariance, total opinion under K = cI.
Outcome structural_properties() {
  std::mt19937_64 rng(1007);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Instance in = random_instance(rng, 1, 200, 0.05);
    const StubbornnessVector k(to_std(in.k));
    const auto s = to_std(in.s);
    const auto z = equilibrium(in.g, k, s, SolveMode::exact);
    const Eigen::VectorXd ze = to_eigen(z);
    worst = std::max(worst, std::abs(in.k.dot(ze) - in.k.dot(in.s)));

    const double c = std::uniform_real_distribution<double>(-2.0, 2.0)(rng);
    std::vector<double> shifted(s);
    for (double& v : shifted) v += c;
    const auto zc = equilibrium(in.g, k, shifted, SolveMode::exact);
    for (std::size_t j = 0; j < in.n; ++j) worst = std::max(worst, std::abs(zc[j] - z[j] - c));

    const double cval = std::uniform_real_distribution<double>(0.2, 5.0)(rng);
    const auto zu = equilibrium(in.g, StubbornnessVector::uniform(in.n, cval), s, SolveMode::exact);
    worst = std::max(worst, std::abs(std::accumulate(zu.begin(), zu.end(), 0.0) - in.s.sum()));
  }
  return {worst <= 1e-9, "max deviation " + fmt("%.3g", worst)};
}

// 8. Hand-computed two node fixtures.
Outcome fixtures() {
  const Graph g = testing_support::two_node_path();
  const std::vector<double> s{1.0, -1.0};
  double worst = 0.0;
  auto track = [&](double got, double want) { worst = std::max(worst, std::abs(got - want)); };
  const auto z1 = equilibrium(g, StubbornnessVector({1.0, 1.0}), s, SolveMode::exact);
  track(z1[0], 1.0 / 3.0);
  track(z1[1], -1.0 / 3.0);
  const StubbornnessVector k({2.0, 1.0});
  const auto z2 = equilibrium(g, k, s, SolveMode::exact);
  track(z2[0], 0.6);
  track(z2[1], -0.2);
  const Eigen::MatrixXd phi = fundamental_matrix(g, k);
  track(phi(0, 0), 0.8);
  track(phi(0, 1), 0.2);
  track(phi(1, 0), 0.4);
  track(phi(1, 1), 0.6);
  const auto r = metrics_exact(g, k, s);
  track(r.conflict, 24.0 / 25.0);
  track(r.disagreement, 16.0 / 25.0);
  track(r.polarization, 19.0 / 25.0);
  track(r.pd_index, 7.0 / 5.0);
  return {worst <= 1e-12, "max abs deviation " + fmt("%.3g", worst)};
}

// 9. Approx time grows nearly linearly in the edge count; exact refuses
// above the dense cap.
Outcome scalability() {
  const std::size_t degree = 10;
  const std::size_t edge_targets[] = {10000, 30000, 100000, 300000, 1000000};
  std::vector<double> xs, ys;
  std::string detail;
  bool refused = true;
  bool produced = true;
  int certified = 0;
  for (std::size_t m : edge_targets) {
    const std::size_t n = 2 * m / degree;
    const Graph g = random_regular_graph(n, degree, 77 + n);
    const StubbornnessVector k = random_stubbornness(n, 0.5, 2.0, 78 + n);
    const auto s = generate_opinions(n, OpinionDistribution::uniform, 79 + n);
    std::vector<double> times;
    for (int rep = 0; rep < 3; ++rep) {
      const auto start = Clock::now();
      const auto r = approxim(g, k, s, 1e-6);
      times.push_back(std::chrono::duration<double>(Clock::now() - start).count());
      if (!(r.pd_index > 0.0)) produced = false;
      if (rep == 0 && r.certified) ++certified;
    }
    const double t = median(times);
    xs.push_back(std::log(static_cast<double>(g.edge_count())));
    ys.push_back(std::log(t));
    detail += std::to_string(g.edge_count()) + ":" + fmt("%.3g", t) + "s ";
    if (n > kDefaultDenseCap) {
      try {
        (void)metrics_exact(g, k, s);
        refused = false;
      } catch (const SizeGuardError&) {
      }
    }
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  return {slope <= 1.3 && refused && produced,
          "log-log slope " + fmt("%.3f", slope) + (refused ? "" : ", exact did not refuse") +
              (produced ? "" : ", approx returned no value") +
              ", certified " + std::to_string(certified) + "/5; " + detail};
}

// 10. Certified solves meet the energy-norm contract.
Outcome solver_contract() {
  std::mt19937_64 rng(1010);
  std::uniform_real_distribution<double> log_delta(-12.0, -2.0);
  double worst = 0.0;
  int uncertified = 0;
  for (int i = 0; i < 100; ++i) {
    const Instance in = random_instance(rng, 1, 500, 0.02);
    const double delta = std::pow(10.0, log_delta(rng));
    const StubbornnessVector k(to_std(in.k));
    const auto r = solve(SolverRequest{SystemOperator(in.g, k), to_std(in.s), delta});
    if (!r.certified) {
      ++uncertified;
      continue;
    }
    const Eigen::MatrixXd t = oracle::system_matrix(oracle::laplacian(in.n, in.raw), in.k);
    const Eigen::VectorXd x = t.llt().solve(in.s);
    const Eigen::VectorXd e = to_eigen(r.y) - x;
    worst = std::max(worst, std::sqrt(e.dot(t * e)) / (delta * std::sqrt(x.dot(t * x))));
  }
  return {worst <= 1.0 && uncertified == 0,
          "max error/delta " + fmt("%.3g", worst) + ", uncertified " + std::to_string(uncertified)};
}

struct Criterion {
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {"approximation_accuracy", 120.0, approximation_accuracy},
      {"conservation_law", 10.0, conservation_law},
      {"forest_equivalence", 60.0, forest_equivalence},
      {"rho_decreases_in_stubbornness", 30.0, rho_monotone},
      {"phi_column_monotone", 30.0, phi_column_monotone},
      {"convergence_bound", 60.0, convergence_bound_holds},
      {"weighted_sum_translation_total", 10.0, structural_properties},
      {"hand_fixtures", 10.0, fixtures},
      {"scalability", 900.0, scalability},
      {"solver_contract", 60.0, solver_contract},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s %2d %s: %s (%.2fs of %.0fs)\n", pass ? "PASS" : "FAIL", index, c.name,
                o.detail.c_str(), secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}

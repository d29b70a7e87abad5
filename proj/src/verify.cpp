#include "fjs/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <numeric>
#include <optional>

#include "fjs/dynamics.hpp"
#include "fjs/forest.hpp"
#include "fjs/generators.hpp"
#include "fjs/graph.hpp"
#include "fjs/metrics.hpp"
#include "fjs/report.hpp"
#include "fjs/solver.hpp"

namespace fjs {
namespace {

struct Check {
  bool ok = true;
  double measure = 0.0;
  std::string detail;
};

struct Instance {
  Graph g;
  StubbornnessVector k;
  std::vector<double> s;
};

std::uint64_t name_hash(const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Eigen::Map<const Eigen::VectorXd> as_eigen(std::span<const double> v) {
  return {v.data(), static_cast<Eigen::Index>(v.size())};
}

double rel_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Connected graph with n in [n_lo, n_hi], k and weights in [0.5, 2].
Instance random_instance(Rng& rng, std::size_t n_lo, std::size_t n_hi, double avg_degree = 4.0) {
  const std::size_t n = n_lo + rng.below(n_hi - n_lo + 1);
  const double p = n > 1 ? std::min(1.0, avg_degree / static_cast<double>(n - 1)) : 0.0;
  Graph g = random_connected_graph(n, p, 0.5, 2.0, rng.next_u64());
  StubbornnessVector k = random_stubbornness(n, 0.5, 2.0, rng.next_u64());
  const auto dist = static_cast<OpinionDistribution>(rng.below(4));
  std::vector<double> s = generate_opinions(n, dist, rng.next_u64());
  return {std::move(g), std::move(k), std::move(s)};
}

Eigen::MatrixXd dense_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    lap(e.u, e.u) += e.w;
    lap(e.v, e.v) += e.w;
    lap(e.u, e.v) -= e.w;
    lap(e.v, e.u) -= e.w;
  }
  return lap;
}

class Harness {
 public:
  explicit Harness(const VerifyOptions& options) : options_(options) {}

  bool full() const { return options_.scale == VerifyScale::full; }
  std::size_t count(std::size_t small, std::size_t large) const { return full() ? large : small; }
  bool fault() const { return options_.inject_fault; }

  template <class F>
  void run(const std::string& name, std::size_t instances, F&& body) {
    PropertyOutcome out;
    out.name = name;
    Rng rng(options_.seed ^ name_hash(name));
    for (std::size_t i = 0; i < instances; ++i) {
      Check c;
      try {
        c = body(rng, i);
      } catch (const std::exception& e) {
        c = {false, 0.0, std::string("exception: ") + e.what()};
      }
      out.worst = std::max(out.worst, c.measure);
      if (c.ok) {
        ++out.passed;
      } else {
        ++out.failed;
        if (out.first_failure.empty()) {
          out.first_failure = "instance " + std::to_string(i) + ": " + c.detail;
        }
      }
    }
    emit(out);
    summary_.properties.push_back(std::move(out));
  }

  VerifySummary take() { return std::move(summary_); }

 private:
  void emit(const PropertyOutcome& o) {
    if (!options_.on_line) return;
    char buf[96];
    std::snprintf(buf, sizeof buf, "%zu/%zu  worst=%.3e", o.passed, o.passed + o.failed, o.worst);
    std::string line = (o.failed ? "FAIL " : "PASS ") + o.name + "  " + buf;
    if (o.failed) line += "  " + o.first_failure;
    options_.on_line(line);
  }

  const VerifyOptions& options_;
  VerifySummary summary_;
};

void fixture_properties(Harness& h) {
  h.run("fixtures.two_node", 1, [](Rng&, std::size_t) {
    const std::vector<Edge> edge{{0, 1, 1.0}};
    const Graph g = Graph::from_indexed_edges(2, edge);
    const StubbornnessVector k({2.0, 1.0});
    const std::vector<double> s{1.0, -1.0};
    const auto z = equilibrium(g, k, s, SolveMode::exact);
    const auto phi = fundamental_matrix(g, k);
    const auto r = metrics_exact(g, k, s);
    const StubbornnessVector k1({1.0, 1.0});
    const auto z1 = equilibrium(g, k1, s, SolveMode::exact);
    double err = 0.0;
    err = std::max(err, std::abs(z[0] - 0.6));
    err = std::max(err, std::abs(z[1] + 0.2));
    err = std::max(err, std::abs(z1[0] - 1.0 / 3.0));
    err = std::max(err, std::abs(z1[1] + 1.0 / 3.0));
    err = std::max(err, std::abs(phi(0, 0) - 0.8));
    err = std::max(err, std::abs(phi(0, 1) - 0.2));
    err = std::max(err, std::abs(phi(1, 0) - 0.4));
    err = std::max(err, std::abs(phi(1, 1) - 0.6));
    err = std::max(err, std::abs(r.conflict - 24.0 / 25.0));
    err = std::max(err, std::abs(r.disagreement - 16.0 / 25.0));
    err = std::max(err, std::abs(r.polarization - 19.0 / 25.0));
    err = std::max(err, std::abs(r.pd_index - 7.0 / 5.0));
    return Check{err <= 1e-12, err, "max deviation " + std::to_string(err)};
  });
}

void graph_properties(Harness& h) {
  h.run("graphcore.laplacian_ones", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const std::vector<double> ones(in.g.node_count(), 1.0);
    const auto y = laplacian_apply(in.g, ones);
    double worst = 0.0;
    for (double v : y) worst = std::max(worst, std::abs(v));
    const double tol = 1e-12 * static_cast<double>(in.g.node_count()) * std::max(in.g.w_max(), 1.0);
    return Check{worst <= tol, worst, "|L1|_inf = " + std::to_string(worst)};
  });

  h.run("graphcore.incidence_composition", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 2, 200);
    const std::size_t n = in.g.node_count();
    std::vector<double> x(n), direct(n), composed(n);
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    laplacian_apply(in.g, x, direct);
    IncidenceView(in.g).compose_laplacian(x, composed);
    const double scale = as_eigen(direct).norm();
    const double gap = (as_eigen(direct) - as_eigen(composed)).norm() / std::max(scale, 1e-300);
    return Check{gap <= 1e-12, gap, "relative gap " + std::to_string(gap)};
  });

  h.run("graphcore.spectrum_within_bounds", h.count(10, 50), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 50);
    const auto bounds = eigen_bounds(in.g, in.k);
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense_system_matrix(in.g, in.k))
            .eigenvalues();
    const double slack = 1e-12 * bounds.coarse_upper;
    const bool ok = ev.minCoeff() >= bounds.lower - slack && ev.maxCoeff() <= bounds.upper + slack &&
                    ev.maxCoeff() <= bounds.coarse_upper + slack;
    const double excess = std::max(bounds.lower - ev.minCoeff(), ev.maxCoeff() - bounds.upper);
    return Check{ok, std::max(0.0, excess), "spectrum escapes the bracket"};
  });

  h.run("graphcore.deterministic_build", h.count(5, 20), [](Rng& rng, std::size_t) {
    const std::size_t n = 2 + rng.below(100);
    std::vector<EdgeTriple> triples;
    for (std::size_t e = 0; e < 3 * n; ++e) {
      triples.push_back({static_cast<NodeId>(rng.below(n) * 7 + 3),
                         static_cast<NodeId>(rng.below(n) * 7 + 3), rng.uniform(0.5, 2.0), e + 1});
    }
    const Graph a = Graph::build(triples);
    const Graph b = Graph::build(triples);
    bool same = a.fingerprint() == b.fingerprint() && a.edge_count() == b.edge_count() &&
                std::equal(a.node_ids().begin(), a.node_ids().end(), b.node_ids().begin());
    for (std::size_t e = 0; same && e < a.edge_count(); ++e) {
      same = a.edges()[e].u == b.edges()[e].u && a.edges()[e].v == b.edges()[e].v &&
             a.edges()[e].w == b.edges()[e].w;
    }
    return Check{same, same ? 0.0 : 1.0, "two builds differ"};
  });
}

void dynamics_properties(Harness& h) {
  h.run("dynamics.row_substochastic", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const ScalingDiagonal q(in.g, in.k);
    double worst = 0.0;
    bool below_one = true;
    for (std::size_t i = 0; i < in.g.node_count(); ++i) {
      double row = 0.0;
      for (double w : in.g.neighbor_weights(i)) row += q[i] * w;
      const double d = in.g.degrees()[i];
      worst = std::max(worst, std::abs(row - d / (in.k[i] + d)));
      below_one = below_one && row < 1.0;
    }
    return Check{below_one && worst <= 1e-12, worst, "row sum mismatch " + std::to_string(worst)};
  });

  h.run("dynamics.fixed_point", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const auto z = equilibrium(in.g, in.k, in.s, SolveMode::exact);
    std::vector<double> next(z.size());
    step_into(in.g, in.k, in.s, z, next);
    const double gap = (as_eigen(next) - as_eigen(z)).lpNorm<Eigen::Infinity>();
    return Check{gap <= 1e-10, gap, "step moved the equilibrium by " + std::to_string(gap)};
  });

  const bool fault = h.fault();
  h.run("dynamics.phi_row_stochastic", h.count(10, 50), [fault](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    Eigen::MatrixXd phi = fundamental_matrix(in.g, in.k);
    if (fault) phi(0, 0) += 1e-6;
    const double row_gap = (phi.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double min_entry = phi.minCoeff();
    return Check{row_gap <= 1e-12 && min_entry > 0.0, row_gap,
                 "row sum off by " + std::to_string(row_gap) + ", min entry " +
                     std::to_string(min_entry)};
  });

  h.run("dynamics.weighted_sum_preserved", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const auto s = center_opinions(in.s, in.k, CenteringRule::weighted);
    const auto z = equilibrium(in.g, in.k, s, SolveMode::exact);
    double kz = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) kz += in.k[i] * z[i];
    const double tol = 1e-9 * static_cast<double>(z.size()) * in.k.k_max();
    return Check{std::abs(kz) <= tol, std::abs(kz), "1'Kz = " + std::to_string(kz)};
  });

  h.run("dynamics.translation_covariance", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const double c = rng.uniform(-2.0, 2.0);
    std::vector<double> shifted(in.s);
    for (double& v : shifted) v += c;
    const auto z = equilibrium(in.g, in.k, in.s, SolveMode::exact);
    const auto zc = equilibrium(in.g, in.k, shifted, SolveMode::exact);
    double gap = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) gap = std::max(gap, std::abs(zc[i] - z[i] - c));
    return Check{gap <= 1e-10, gap, "shift error " + std::to_string(gap)};
  });

  h.run("dynamics.total_opinion_uniform_k", h.count(20, 100), [](Rng& rng, std::size_t) {
    Instance in = random_instance(rng, 1, 200);
    const StubbornnessVector k = StubbornnessVector::uniform(in.g.node_count(), rng.uniform(0.2, 5.0));
    const auto z = equilibrium(in.g, k, in.s, SolveMode::exact);
    const double gap = std::abs(std::accumulate(z.begin(), z.end(), 0.0) -
                                std::accumulate(in.s.begin(), in.s.end(), 0.0));
    return Check{gap <= 1e-9, gap, "|sum z - sum s| = " + std::to_string(gap)};
  });

  h.run("dynamics.rho_decreases_in_stubbornness", h.count(10, 50), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 2, 40);
    const std::size_t i = rng.below(in.g.node_count());
    std::vector<double> raised(in.k.values().begin(), in.k.values().end());
    raised[i] *= 1.5;
    const auto before = spectral_radius(in.g, in.k);
    const auto after = spectral_radius(in.g, StubbornnessVector(raised));
    const double drop = before.rho - after.rho;
    return Check{before.converged && after.converged && drop > 1e-9, -drop,
                 "rho moved by " + std::to_string(-drop)};
  });

  h.run("dynamics.phi_column_monotone", h.count(10, 50), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 2, 40);
    const std::size_t v = rng.below(in.g.node_count());
    std::vector<double> lowered(in.k.values().begin(), in.k.values().end());
    lowered[v] *= 0.5;
    const Eigen::MatrixXd delta =
        fundamental_matrix(in.g, StubbornnessVector(lowered)) - fundamental_matrix(in.g, in.k);
    double weakest = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < delta.rows(); ++r) {
      for (Eigen::Index c = 0; c < delta.cols(); ++c) {
        const double signed_change = c == static_cast<Eigen::Index>(v) ? -delta(r, c) : delta(r, c);
        weakest = std::min(weakest, signed_change);
      }
    }
    return Check{weakest > 1e-12, std::max(0.0, -weakest),
                 "weakest signed change " + std::to_string(weakest)};
  });

  h.run("dynamics.geometric_decay", h.count(10, 50), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 100);
    const std::vector<double> z0(in.g.node_count(), 0.0);
    const auto sim = simulate_until(in.g, in.k, in.s, z0, 1e-8);
    const double rho = std::max(sim.spectral.rho, sim.spectral.upper);
    double excess = 0.0;
    const auto& f = sim.trace.f_norms;
    for (std::size_t t = 0; t + 1 < f.size(); ++t) excess = std::max(excess, f[t + 1] - rho * f[t]);
    const bool ok = excess <= 1e-9 && sim.within_bound;
    return Check{ok, std::max(0.0, excess),
                 "excess " + std::to_string(excess) + ", stop " + std::to_string(sim.stop_time) +
                     " vs bound " + std::to_string(sim.bound)};
  });
}

void solver_properties(Harness& h) {
  h.run("solver.energy_contract", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 500);
    const double delta = std::pow(10.0, rng.uniform(-12.0, -2.0));
    const SystemOperator op(in.g, in.k);
    std::vector<double> b(in.s);
    const auto res = solve(SolverRequest{op, b, delta});
    const Eigen::MatrixXd t = dense_system_matrix(in.g, in.k);
    const Eigen::VectorXd x = t.llt().solve(as_eigen(b));
    const Eigen::VectorXd err = as_eigen(res.y) - x;
    const double ratio = std::sqrt(err.dot(t * err)) / std::sqrt(x.dot(t * x));
    return Check{res.certified && ratio <= delta, ratio / delta,
                 "energy ratio " + std::to_string(ratio) + " vs delta " + std::to_string(delta)};
  });

  h.run("solver.deterministic", h.count(5, 20), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 300);
    const SystemOperator op(in.g, in.k);
    const auto a = solve(SolverRequest{op, in.s, 1e-10});
    const auto b = solve(SolverRequest{op, in.s, 1e-10});
    const bool same = a.y == b.y && a.iterations == b.iterations;
    return Check{same, same ? 0.0 : 1.0, "repeated solve differs"};
  });

  if (h.full()) {
    // Path graphs have a bounded condition number, so iteration counts must
    // stay far below linear growth.
    h.run("solver.iteration_scaling", 1, [](Rng&, std::size_t) {
      std::vector<double> log_n, log_it;
      for (std::size_t n : {250u, 500u, 1000u, 2000u, 4000u}) {
        std::vector<Edge> edges;
        for (std::size_t i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1, 1.0});
        const Graph g = Graph::from_indexed_edges(n, edges);
        const auto k = StubbornnessVector::uniform(n, 1.0);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) b[i] = std::sin(0.37 * static_cast<double>(i));
        const auto res = solve(SolverRequest{SystemOperator(g, k), b, 1e-10});
        log_n.push_back(std::log(static_cast<double>(n)));
        log_it.push_back(std::log(static_cast<double>(std::max<std::size_t>(res.iterations, 1))));
      }
      const double mx = std::accumulate(log_n.begin(), log_n.end(), 0.0) / log_n.size();
      const double my = std::accumulate(log_it.begin(), log_it.end(), 0.0) / log_it.size();
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t i = 0; i < log_n.size(); ++i) {
        sxy += (log_n[i] - mx) * (log_it[i] - my);
        sxx += (log_n[i] - mx) * (log_n[i] - mx);
      }
      const double slope = sxy / sxx;
      return Check{slope < 0.75, slope, "iteration slope " + std::to_string(slope)};
    });
  }
}

void metrics_properties(Harness& h) {
  h.run("metrics.quadratic_forms", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const auto r = metrics_exact(in.g, in.k, in.s);
    const Eigen::MatrixXd t = dense_system_matrix(in.g, in.k);
    const Eigen::MatrixXd lap = dense_laplacian(in.g);
    const Eigen::VectorXd kv = as_eigen(in.k.values());
    const Eigen::VectorXd z = t.llt().solve(kv.cwiseProduct(as_eigen(in.s)));
    const Eigen::VectorXd gap = z - as_eigen(in.s);
    const double c = gap.dot(kv.cwiseProduct(gap));
    const double d = z.dot(lap * z);
    const double p = z.dot(kv.cwiseProduct(z));
    const double worst = std::max({rel_gap(c, r.conflict), rel_gap(d, r.disagreement),
                                   rel_gap(p, r.polarization), rel_gap(p + d, r.pd_index)});
    return Check{worst <= 1e-9, worst, "relative gap " + std::to_string(worst)};
  });

  h.run("metrics.conservation_law", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const auto r = metrics_exact(in.g, in.k, in.s);
    return Check{r.conservation_relative <= 1e-10, r.conservation_relative,
                 "relative residual " + std::to_string(r.conservation_relative)};
  });

  h.run("metrics.pd_identity", h.count(20, 100), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 200);
    const auto r = metrics_exact(in.g, in.k, in.s);
    return Check{r.pd_identity_residual <= 1e-9, r.pd_identity_residual,
                 "relative gap " + std::to_string(r.pd_identity_residual)};
  });

  h.run("metrics.approx_within_eps", h.count(5, 20), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 2, 300);
    const double eps = 1e-6;
    const auto approx = approxim(in.g, in.k, in.s, eps);
    const auto s = center_opinions(in.s, in.k, CenteringRule::weighted);
    const auto exact = metrics_exact(in.g, in.k, s);
    const double worst = std::max({rel_gap(approx.conflict, exact.conflict),
                                   rel_gap(approx.disagreement, exact.disagreement),
                                   rel_gap(approx.polarization, exact.polarization),
                                   rel_gap(approx.pd_index, exact.pd_index)});
    return Check{worst <= eps, worst, "relative error " + std::to_string(worst)};
  });

  h.run("metrics.report_roundtrip", h.count(5, 20), [](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, 100);
    const auto r = rng.below(2) ? metrics_exact(in.g, in.k, in.s) : approxim(in.g, in.k, in.s, 1e-3);
    const bool same = report_from_json(report_to_json(r)) == r;
    return Check{same, same ? 0.0 : 1.0, "report changed after serialization"};
  });
}

void forest_properties(Harness& h) {
  const std::size_t max_n = h.full() ? 7 : 5;
  const std::size_t sweep = h.count(20, 200);
  h.run("forest.matrix_equals_inverse", sweep, [max_n](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, max_n, 3.0);
    const MappedDigraph d(in.g, in.k);
    const Eigen::MatrixXd phi = forest_matrix(d);
    const auto n = static_cast<Eigen::Index>(in.g.node_count());
    const Eigen::MatrixXd inv =
        (Eigen::MatrixXd::Identity(n, n) + d.laplacian()).partialPivLu().inverse();
    const double gap = (phi - inv).cwiseAbs().maxCoeff();
    return Check{gap <= 1e-9, gap, "max abs deviation " + std::to_string(gap)};
  });

  h.run("forest.total_weight_equals_det", sweep, [max_n](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, max_n, 3.0);
    const MappedDigraph d(in.g, in.k);
    const ForestEnumeration e = enumerate_forests(d);
    const auto n = static_cast<Eigen::Index>(in.g.node_count());
    const double det = (Eigen::MatrixXd::Identity(n, n) + d.laplacian()).determinant();
    const double gap = rel_gap(e.total_weight, det);
    return Check{gap <= 1e-9, gap, "relative gap " + std::to_string(gap)};
  });

  h.run("forest.matches_fundamental", h.count(10, 50), [max_n](Rng& rng, std::size_t) {
    const Instance in = random_instance(rng, 1, max_n, 3.0);
    const double gap =
        (forest_matrix(MappedDigraph(in.g, in.k)) - fundamental_matrix(in.g, in.k)).cwiseAbs().maxCoeff();
    return Check{gap <= 1e-9, gap, "max abs deviation " + std::to_string(gap)};
  });
}

}  // namespace

bool VerifySummary::all_passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyOutcome& p) { return p.failed == 0; });
}

const PropertyOutcome* VerifySummary::find(const std::string& name) const {
  for (const auto& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

VerifySummary run_verify(const VerifyOptions& options) {
  Harness h(options);
  fixture_properties(h);
  graph_properties(h);
  dynamics_properties(h);
  solver_properties(h);
  metrics_properties(h);
  forest_properties(h);
  return h.take();
}

}  // namespace fjs

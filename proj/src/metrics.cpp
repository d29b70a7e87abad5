#include "fjs/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "fjs/error.hpp"
#include "fjs/solver.hpp"

namespace fjs {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double weighted_square_sum(const StubbornnessVector& k, std::span<const double> s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) sum += k[i] * s[i] * s[i];
  return sum;
}

void fill_graph_fields(MetricsReport& r, const Graph& g) {
  r.node_count = g.node_count();
  r.edge_count = g.edge_count();
  r.graph_fingerprint = g.fingerprint();
}

}  // namespace

const char* to_string(MetricsMode mode) {
  return mode == MetricsMode::exact ? "exact" : "approx";
}

MetricsReport metrics_from_equilibrium(const Graph& g, const StubbornnessVector& k,
                                       std::span<const double> s, std::span<const double> z) {
  check_dimensions(g, k);
  check_dimensions(g, s, "innate opinion vector");
  check_dimensions(g, z, "expressed opinion vector");
  MetricsReport r;
  double ksz = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double gap = z[i] - s[i];
    r.conflict += k[i] * gap * gap;
    r.polarization += k[i] * z[i] * z[i];
    r.sum_z += z[i];
    r.weighted_sum_z += k[i] * z[i];
    ksz += k[i] * s[i] * z[i];
  }
  for (const Edge& e : g.edges()) {
    const double diff = z[e.u] - z[e.v];
    r.disagreement += e.w * diff * diff;
  }
  r.pd_index = r.polarization + r.disagreement;
  r.pd_identity_residual =
      r.pd_index == 0.0 ? std::abs(ksz) : std::abs(r.pd_index - ksz) / r.pd_index;
  const auto cons = conservation_check(r, k, s);
  r.conservation_residual = cons.absolute;
  r.conservation_relative = cons.relative;
  fill_graph_fields(r, g);
  return r;
}

MetricsReport metrics_exact(const Graph& g, const StubbornnessVector& k, std::span<const double> s,
                            const ExactOptions& options) {
  const auto start = Clock::now();
  const bool dense = g.node_count() <= options.dense_cap;
  if (!dense && !options.solver_fallback) {
    throw SizeGuardError("exact mode refused: n = " + std::to_string(g.node_count()) +
                         " exceeds the dense cap " + std::to_string(options.dense_cap));
  }
  const std::vector<double> z =
      dense ? equilibrium(g, k, s, SolveMode::exact, 0.0, options.dense_cap)
            : equilibrium(g, k, s, SolveMode::iterative, options.fallback_delta);
  const double solve_seconds = seconds_since(start);

  const auto norms_start = Clock::now();
  MetricsReport r = metrics_from_equilibrium(g, k, s, z);
  r.mode = MetricsMode::exact;
  r.delta_used = dense ? 0.0 : options.fallback_delta;
  r.solve_seconds = solve_seconds;
  r.norms_seconds = seconds_since(norms_start);
  r.total_seconds = seconds_since(start);
  if (r.pd_identity_residual > 1e-9) {
    throw NumericalError("I_pd cross-check failed: relative gap " +
                         std::to_string(r.pd_identity_residual));
  }
  return r;
}

DeltaBudget delta_budget(const Graph& g, const StubbornnessVector& k, std::span<const double> s,
                         double eps) {
  check_dimensions(g, k);
  check_dimensions(g, s, "innate opinion vector");
  if (!(eps > 0.0 && eps < 0.5)) throw InputError("eps must lie in (0, 1/2)");
  double s_norm = 0.0;
  for (double v : s) s_norm += v * v;
  s_norm = std::sqrt(s_norm);
  if (s_norm == 0.0) throw InputError("opinion vector is zero; every metric is trivially 0");

  const double n = static_cast<double>(g.node_count());
  // Edgeless graphs: only the ratio of the weight extremes matters.
  const double w_min = g.edge_count() ? g.w_min() : 1.0;
  const double w_max = g.edge_count() ? g.w_max() : 1.0;
  const double k_min = k.k_min();
  const double k_max = k.k_max();
  const double spread = k_max + n * w_max;

  DeltaBudget b;
  b.delta1 = eps / (3.0 * std::sqrt(spread / (k_min * k_max)));
  b.delta2 = eps * k_min * s_norm / (3.0 * n * spread) * std::sqrt(w_min / (n * spread));
  b.delta3 = eps * w_min * k_min * std::sqrt(k_min) * s_norm /
             (3.0 * w_max * n * n * n * spread * std::sqrt(n * k_max * spread));
  b.delta = std::min({b.delta1, b.delta2, b.delta3});
  return b;
}

MetricsReport approxim(const Graph& g, const StubbornnessVector& k, std::span<const double> s_in,
                       double eps, const ApproxOptions& options) {
  const auto start = Clock::now();
  check_dimensions(g, k);
  check_dimensions(g, s_in, "innate opinion vector");
  if (!(eps > 0.0 && eps < 0.5)) throw InputError("eps must lie in (0, 1/2)");

  const std::size_t n = g.node_count();
  double weighted = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weighted += k[i] * s_in[i];
    scale += k[i] * std::abs(s_in[i]);
  }
  MetricsReport r;
  r.mode = MetricsMode::approx;
  r.eps_requested = eps;
  fill_graph_fields(r, g);

  std::vector<double> s(s_in.begin(), s_in.end());
  if (std::abs(weighted) > 1e-14 * scale) {
    s = center_opinions(s_in, k, CenteringRule::weighted);
    r.centered = true;
  }
  double s_norm2 = 0.0;
  for (double v : s) s_norm2 += v * v;
  if (s_norm2 == 0.0) {
    r.total_seconds = seconds_since(start);
    return r;
  }

  const DeltaBudget budget = delta_budget(g, k, s, eps);
  r.delta_used = options.delta_override > 0.0 ? options.delta_override : budget.delta;

  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = k[i] * s[i];
  const SystemOperator op(g, k);
  const SolverResult sol = solve(SolverRequest{op, ks, r.delta_used, options.max_iterations});
  r.solve_seconds = seconds_since(start);
  r.certified = sol.certified;
  r.solver_iterations = sol.iterations;

  const auto norms_start = Clock::now();
  const std::vector<double>& q = sol.y;
  const std::vector<double> lq = laplacian_apply(g, q);
  double ksz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.conflict += lq[i] * lq[i] / k[i];
    r.polarization += k[i] * q[i] * q[i];
    r.sum_z += q[i];
    r.weighted_sum_z += k[i] * q[i];
    ksz += ks[i] * q[i];
  }
  r.disagreement = IncidenceView(g).weighted_norm_squared(q);
  r.pd_index = r.polarization + r.disagreement;
  r.pd_identity_residual =
      r.pd_index == 0.0 ? std::abs(ksz) : std::abs(r.pd_index - ksz) / r.pd_index;
  const auto cons = conservation_check(r, k, s);
  r.conservation_residual = cons.absolute;
  r.conservation_relative = cons.relative;
  r.norms_seconds = seconds_since(norms_start);
  r.total_seconds = seconds_since(start);
  return r;
}

ConservationResidual conservation_check(const MetricsReport& report, const StubbornnessVector& k,
                                        std::span<const double> s) {
  if (s.size() != k.size()) throw InputError("opinion and stubbornness vectors differ in length");
  const double total = weighted_square_sum(k, s);
  ConservationResidual out;
  out.absolute =
      std::abs(report.conflict + 2.0 * report.disagreement + report.polarization - total);
  out.relative = total == 0.0 ? out.absolute : out.absolute / total;
  return out;
}

}  // namespace fjs

#include "fjs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fjs/error.hpp"
#include "fjs/parallel.hpp"
#include "fjs/solver.hpp"

namespace fjs {
namespace {

double norm2(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

void check_dense_cap(const Graph& g, std::size_t dense_cap) {
  if (g.node_count() > dense_cap) {
    throw SizeGuardError("dense computation refused: n = " + std::to_string(g.node_count()) +
                         " exceeds the dense cap " + std::to_string(dense_cap));
  }
}

}  // namespace

OpinionState::OpinionState(std::vector<double> innate, std::vector<double> expressed,
                           std::uint64_t t)
    : OpinionState(std::make_shared<const std::vector<double>>(std::move(innate)),
                   std::move(expressed), t) {}

OpinionState::OpinionState(std::shared_ptr<const std::vector<double>> innate,
                           std::vector<double> expressed, std::uint64_t t)
    : s_(std::move(innate)), z_(std::move(expressed)), t_(t) {
  if (!s_ || s_->size() != z_.size()) {
    throw InputError("innate and expressed opinion vectors differ in length");
  }
}

ScalingDiagonal::ScalingDiagonal(const Graph& g, const StubbornnessVector& k) {
  check_dimensions(g, k);
  const auto deg = g.degrees();
  q_.resize(g.node_count());
  for (std::size_t i = 0; i < q_.size(); ++i) q_[i] = 1.0 / (k[i] + deg[i]);
}

void step_into(const Graph& g, const StubbornnessVector& k, std::span<const double> s,
               std::span<const double> z, std::span<double> out) {
  check_dimensions(g, k);
  check_dimensions(g, s, "innate opinion vector");
  check_dimensions(g, z, "expressed opinion vector");
  check_dimensions(g, out, "output vector");
  const auto rows = g.row_offsets();
  const auto cols = g.neighbor_indices();
  const auto vals = g.neighbor_weights();
  const auto deg = g.degrees();
  parallel_for(g.node_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) sum += vals[p] * z[cols[p]];
      out[i] = (k[i] * s[i] + sum) / (k[i] + deg[i]);
    }
  });
}

OpinionState step(const Graph& g, const StubbornnessVector& k, const OpinionState& state) {
  std::vector<double> next(state.expressed().size());
  step_into(g, k, state.innate(), state.expressed(), next);
  return OpinionState(state.shared_innate(), std::move(next), state.time() + 1);
}

Eigen::MatrixXd dense_system_matrix(const Graph& g, const StubbornnessVector& k,
                                    std::size_t dense_cap) {
  check_dimensions(g, k);
  check_dense_cap(g, dense_cap);
  const auto n = static_cast<Eigen::Index>(g.node_count());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  const auto deg = g.degrees();
  for (Eigen::Index i = 0; i < n; ++i) t(i, i) = deg[i] + k[i];
  for (const Edge& e : g.edges()) {
    t(e.u, e.v) -= e.w;
    t(e.v, e.u) -= e.w;
  }
  return t;
}

std::vector<double> equilibrium(const Graph& g, const StubbornnessVector& k,
                                std::span<const double> s, SolveMode mode, double delta,
                                std::size_t dense_cap) {
  check_dimensions(g, k);
  check_dimensions(g, s, "innate opinion vector");
  const std::size_t n = g.node_count();
  std::vector<double> ks(n);
  for (std::size_t i = 0; i < n; ++i) ks[i] = k[i] * s[i];

  if (mode == SolveMode::exact) {
    const Eigen::MatrixXd t = dense_system_matrix(g, k, dense_cap);
    Eigen::LLT<Eigen::MatrixXd> llt(t);
    if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization of L+K failed");
    const Eigen::VectorXd z =
        llt.solve(Eigen::Map<const Eigen::VectorXd>(ks.data(), static_cast<Eigen::Index>(n)));
    return {z.data(), z.data() + z.size()};
  }

  if (!(delta > 0.0 && delta < 1.0)) throw InputError("iterative equilibrium needs delta in (0, 1)");
  const SystemOperator op(g, k);
  SolverResult res = solve(SolverRequest{op, ks, delta});
  if (!res.certified) {
    throw NumericalError("solver did not certify delta = " + std::to_string(delta) + ": " +
                         res.diagnostics);
  }
  return std::move(res.y);
}

Eigen::MatrixXd fundamental_matrix(const Graph& g, const StubbornnessVector& k,
                                   std::size_t dense_cap) {
  const Eigen::MatrixXd t = dense_system_matrix(g, k, dense_cap);
  Eigen::LLT<Eigen::MatrixXd> llt(t);
  if (llt.info() != Eigen::Success) throw NumericalError("Cholesky factorization of L+K failed");
  const Eigen::VectorXd kd =
      Eigen::Map<const Eigen::VectorXd>(k.values().data(), static_cast<Eigen::Index>(k.size()));
  return llt.solve(Eigen::MatrixXd(kd.asDiagonal()));
}

std::vector<double> center_opinions(std::span<const double> s, const StubbornnessVector& k,
                                    CenteringRule rule) {
  if (s.size() != k.size()) throw InputError("opinion and stubbornness vectors differ in length");
  double weighted = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) weighted += k[i] * s[i];
  const double divisor =
      rule == CenteringRule::weighted ? k.total() : static_cast<double>(s.size());
  const double shift = weighted / divisor;
  std::vector<double> out(s.begin(), s.end());
  if (shift == 0.0) return out;
  for (double& v : out) v -= shift;
  return out;
}

SpectralEstimate spectral_radius(const Graph& g, const StubbornnessVector& k, double tol,
                                 std::size_t max_iterations) {
  check_dimensions(g, k);
  if (!(tol > 0.0)) throw InputError("spectral tolerance must be positive");
  SpectralEstimate est;
  if (g.edge_count() == 0) {
    est.converged = true;
    return est;
  }

  const std::size_t n = g.node_count();
  const ScalingDiagonal q(g, k);
  std::vector<double> sqrt_q(n);
  for (std::size_t i = 0; i < n; ++i) sqrt_q[i] = std::sqrt(q[i]);
  const auto rows = g.row_offsets();
  const auto cols = g.neighbor_indices();
  const auto vals = g.neighbor_weights();

  // y = Q^{1/2} A Q^{1/2} x
  auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        double sum = 0.0;
        for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) sum += vals[p] * sqrt_q[cols[p]] * x[cols[p]];
        y[i] = sqrt_q[i] * sum;
      }
    });
  };

  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> y(n);
  est.upper = 1.0;
  // Iterating with (I + S)/2 keeps the Perron root dominant when S has the
  // eigenvalue -rho (bipartite components).
  for (std::size_t it = 1; it <= max_iterations; ++it) {
    apply(x, y);
    double theta = 0.0;
    for (std::size_t i = 0; i < n; ++i) theta += x[i] * y[i];
    double res2 = 0.0;
    double cw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - theta * x[i];
      res2 += r * r;
      if (x[i] > 0.0) cw = std::max(cw, y[i] / x[i]);
    }
    est.rho = theta;
    est.residual = std::sqrt(res2);
    est.iterations = it;
    est.upper = std::min(est.upper, cw);
    if (est.residual <= tol || est.upper - theta <= tol) {
      est.converged = true;
      break;
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = 0.5 * (x[i] + y[i]);
      norm += x[i] * x[i];
    }
    norm = std::sqrt(norm);
    for (double& v : x) v /= norm;
  }
  est.upper = std::max(est.upper, est.rho);
  return est;
}

std::uint64_t convergence_bound(double rho, double f0_norm, double eps) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) throw InputError("rho must lie in [0, 1)");
  if (!(f0_norm >= 0.0)) throw InputError("|f(0)| must be nonnegative");
  if (eps >= f0_norm) return 0;
  if (rho == 0.0) return 1;
  const double t = (std::log(eps) - std::log(f0_norm)) / std::log(rho);
  return static_cast<std::uint64_t>(std::ceil(t - 1e-9 * std::max(1.0, t)));
}

std::uint64_t convergence_bound(const SpectralEstimate& rho, double f0_norm, double eps) {
  const double r = rho.upper < 1.0 ? std::max(rho.upper, rho.rho) : rho.rho;
  return convergence_bound(r, f0_norm, eps);
}

std::vector<double> scaled_error(const Graph& g, const StubbornnessVector& k,
                                 std::span<const double> z, std::span<const double> z_star) {
  const auto deg = g.degrees();
  std::vector<double> f(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) f[i] = (z[i] - z_star[i]) * std::sqrt(k[i] + deg[i]);
  return f;
}

SimulationResult simulate_until(const Graph& g, const StubbornnessVector& k,
                                std::span<const double> s, std::span<const double> z0, double eps,
                                const SimulationOptions& options) {
  if (!(eps > 0.0)) throw InputError("eps must be positive");
  check_dimensions(g, k);
  check_dimensions(g, s, "innate opinion vector");
  check_dimensions(g, z0, "initial opinion vector");

  const std::size_t n = g.node_count();
  std::vector<double> z_star =
      n <= options.dense_cap ? equilibrium(g, k, s, SolveMode::exact, 0.0, options.dense_cap)
                             : equilibrium(g, k, s, SolveMode::iterative, 1e-14);
  SpectralEstimate spectral = spectral_radius(g, k, options.spectral_tol);

  auto innate = std::make_shared<const std::vector<double>>(s.begin(), s.end());
  std::vector<double> z(z0.begin(), z0.end());
  std::vector<double> next(n);
  ErrorTrace trace;
  std::uint64_t t = 0;
  for (;; ++t) {
    std::vector<double> e(n);
    for (std::size_t i = 0; i < n; ++i) e[i] = z[i] - z_star[i];
    const double f_norm = norm2(scaled_error(g, k, z, z_star));
    trace.e_norms.push_back(norm2(e));
    trace.f_norms.push_back(f_norm);
    if (f_norm <= eps) break;
    if (t >= options.max_steps) {
      throw NumericalError("simulation did not reach eps within " +
                           std::to_string(options.max_steps) + " steps");
    }
    step_into(g, k, *innate, z, next);
    z.swap(next);
  }

  SimulationResult result{OpinionState(innate, std::move(z), t), std::move(trace),
                          std::move(z_star), spectral, t, 0, false};
  result.bound = convergence_bound(spectral, result.trace.f_norms.front(), eps);
  result.within_bound = result.stop_time <= result.bound;
  return result;
}

}  // namespace fjs

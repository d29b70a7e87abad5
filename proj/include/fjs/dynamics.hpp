#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fjs/graph.hpp"

namespace fjs {

inline constexpr std::size_t kDefaultDenseCap = 10000;

// Innate opinions s (fixed for the lifetime of a run) and the expressed
// opinions z(t) after t synchronous updates.
class OpinionState {
 public:
  OpinionState(std::vector<double> innate, std::vector<double> expressed, std::uint64_t t = 0);
  OpinionState(std::shared_ptr<const std::vector<double>> innate, std::vector<double> expressed,
               std::uint64_t t);

  std::span<const double> innate() const noexcept { return *s_; }
  std::span<const double> expressed() const noexcept { return z_; }
  std::uint64_t time() const noexcept { return t_; }
  const std::shared_ptr<const std::vector<double>>& shared_innate() const noexcept { return s_; }

 private:
  std::shared_ptr<const std::vector<double>> s_;
  std::vector<double> z_;
  std::uint64_t t_ = 0;
};

// q_i = 1 / (k_i + d_i)
class ScalingDiagonal {
 public:
  ScalingDiagonal(const Graph& g, const StubbornnessVector& k);
  std::span<const double> values() const noexcept { return q_; }
  double operator[](std::size_t i) const noexcept { return q_[i]; }

 private:
  std::vector<double> q_;
};

// Per-step norms of e(t) = z(t) - z* and f(t) = Q^{-1/2} e(t).
struct ErrorTrace {
  std::vector<double> e_norms;
  std::vector<double> f_norms;
};

struct SpectralEstimate {
  double rho = 0.0;    // Rayleigh quotient at termination
  double upper = 0.0;  // certified upper bound (Collatz-Wielandt)
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

enum class SolveMode { exact, iterative };

// Divisor used when shifting s so that the stubbornness-weighted sum vanishes.
enum class CenteringRule {
  weighted,  // s - (1'Ks / 1'K1) 1, makes 1'Ks exactly zero
  by_count,  // s - (1'Ks / n) 1, zero only when trace(K) = n
};

// z_i(t+1) = (k_i s_i + sum_j w_ij z_j(t)) / (k_i + sum_j w_ij)
OpinionState step(const Graph& g, const StubbornnessVector& k, const OpinionState& state);
void step_into(const Graph& g, const StubbornnessVector& k, std::span<const double> s,
               std::span<const double> z, std::span<double> out);

// Dense L + K. Throws SizeGuardError above dense_cap.
Eigen::MatrixXd dense_system_matrix(const Graph& g, const StubbornnessVector& k,
                                    std::size_t dense_cap = kDefaultDenseCap);

// z = (L + K)^{-1} K s. Exact mode factors L + K densely (n <= dense_cap);
// iterative mode runs the certified solver with tolerance delta and throws
// NumericalError if the certificate is not reached.
std::vector<double> equilibrium(const Graph& g, const StubbornnessVector& k,
                                std::span<const double> s, SolveMode mode, double delta = 1e-12,
                                std::size_t dense_cap = kDefaultDenseCap);

// Phi = (L + K)^{-1} K, row-stochastic.
Eigen::MatrixXd fundamental_matrix(const Graph& g, const StubbornnessVector& k,
                                   std::size_t dense_cap = kDefaultDenseCap);

std::vector<double> center_opinions(std::span<const double> s, const StubbornnessVector& k,
                                    CenteringRule rule = CenteringRule::weighted);

// Spectral radius of QA via power iteration on the symmetric similarity
// Q^{1/2} A Q^{1/2}.
SpectralEstimate spectral_radius(const Graph& g, const StubbornnessVector& k, double tol = 1e-10,
                                 std::size_t max_iterations = 100000);

// Smallest integer t with rho^t f0 <= eps, i.e. ceil(log_rho(eps) - log_rho(f0)).
// Returns 0 when eps >= f0.
std::uint64_t convergence_bound(double rho, double f0_norm, double eps);
// Uses the certified upper bound of the estimate.
std::uint64_t convergence_bound(const SpectralEstimate& rho, double f0_norm, double eps);

// f_i = (z_i - z*_i) * sqrt(k_i + d_i)
std::vector<double> scaled_error(const Graph& g, const StubbornnessVector& k,
                                 std::span<const double> z, std::span<const double> z_star);

struct SimulationOptions {
  std::uint64_t max_steps = 1000000;
  std::size_t dense_cap = kDefaultDenseCap;
  double spectral_tol = 1e-10;
};

struct SimulationResult {
  OpinionState state;
  ErrorTrace trace;
  std::vector<double> equilibrium;
  SpectralEstimate spectral;
  std::uint64_t stop_time = 0;
  std::uint64_t bound = 0;
  bool within_bound = false;
};

// Iterates step until |f(t)| <= eps. Throws NumericalError past max_steps.
SimulationResult simulate_until(const Graph& g, const StubbornnessVector& k,
                                std::span<const double> s, std::span<const double> z0, double eps,
                                const SimulationOptions& options = {});

}  // namespace fjs

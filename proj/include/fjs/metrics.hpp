#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fjs/dynamics.hpp"
#include "fjs/graph.hpp"

namespace fjs {

enum class MetricsMode { exact, approx };

struct MetricsReport {
  double conflict = 0.0;       // C = sum_i k_i (z_i - s_i)^2
  double disagreement = 0.0;   // D = sum_{(i,j) in E} w_ij (z_i - z_j)^2
  double polarization = 0.0;   // P = sum_i k_i z_i^2
  double pd_index = 0.0;       // I_pd = P + D
  double sum_z = 0.0;
  double weighted_sum_z = 0.0;  // 1'Kz
  MetricsMode mode = MetricsMode::exact;
  double delta_used = 0.0;
  double eps_requested = 0.0;
  double conservation_residual = 0.0;  // |C + 2D + P - sum_i k_i s_i^2|
  double conservation_relative = 0.0;
  double pd_identity_residual = 0.0;   // |I_pd - sum_i k_i s_i z_i| / |I_pd|
  bool certified = true;
  bool centered = false;  // approx mode shifted s to make 1'Ks = 0
  std::uint64_t solver_iterations = 0;
  std::uint64_t node_count = 0;
  std::uint64_t edge_count = 0;
  std::uint64_t graph_fingerprint = 0;
  double solve_seconds = 0.0;
  double norms_seconds = 0.0;
  double total_seconds = 0.0;

  bool operator==(const MetricsReport&) const = default;
};

struct ConservationResidual {
  double absolute = 0.0;
  double relative = 0.0;
};

// Solver tolerances for the thresholds under which the four l2-norm
// estimates are eps-approximations.
struct DeltaBudget {
  double delta1 = 0.0;  // polarization
  double delta2 = 0.0;  // disagreement
  double delta3 = 0.0;  // internal conflict
  double delta = 0.0;   // min of the three
};

struct ExactOptions {
  std::size_t dense_cap = kDefaultDenseCap;
  // Above the cap, fall back to the certified solver at this delta instead
  // of refusing.
  bool solver_fallback = false;
  double fallback_delta = 1e-12;
};

// Evaluates C, D, P, I_pd from a given expressed-opinion vector z.
MetricsReport metrics_from_equilibrium(const Graph& g, const StubbornnessVector& k,
                                       std::span<const double> s, std::span<const double> z);

MetricsReport metrics_exact(const Graph& g, const StubbornnessVector& k, std::span<const double> s,
                            const ExactOptions& options = {});

DeltaBudget delta_budget(const Graph& g, const StubbornnessVector& k, std::span<const double> s,
                         double eps);

struct ApproxOptions {
  // Overrides the budget when positive (diagnostics only).
  double delta_override = 0.0;
  std::size_t max_iterations = 100000;
};

// One certified solve of (L + K) q = K s, then C~ = ||K^{-1/2} L q||^2,
// D~ = ||W^{1/2} B q||^2, P~ = ||K^{1/2} q||^2, I~ = P~ + D~. Centers s
// (weighted) first when 1'Ks != 0.
MetricsReport approxim(const Graph& g, const StubbornnessVector& k, std::span<const double> s,
                       double eps, const ApproxOptions& options = {});

ConservationResidual conservation_check(const MetricsReport& report, const StubbornnessVector& k,
                                        std::span<const double> s);

const char* to_string(MetricsMode mode);

}  // namespace fjs

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fjs/graph.hpp"

namespace fjs {

// T = L + K as a matrix-free operator. Symmetric positive definite whenever
// every k_i > 0.
class SystemOperator {
 public:
  SystemOperator(const Graph& g, const StubbornnessVector& k);

  std::size_t size() const noexcept { return diag_.size(); }
  const Graph& graph() const noexcept { return *g_; }
  const StubbornnessVector& stubbornness() const noexcept { return *k_; }
  std::span<const double> diagonal() const noexcept { return diag_; }
  const SpectrumBounds& bounds() const noexcept { return bounds_; }
  // CSR column indices of the graph narrowed to 32 bits for the hot loops.
  std::span<const std::uint32_t> columns() const noexcept { return cols_; }

  // y_i = (k_i + d_i) x_i - sum_j w_ij x_j
  void apply(std::span<const double> x, std::span<double> y) const;

 private:
  const Graph* g_;
  const StubbornnessVector* k_;
  std::vector<double> diag_;
  std::vector<std::uint32_t> cols_;
  SpectrumBounds bounds_;
};

// Request for y ~ T^{-1} b with ||y - T^{-1}b||_T <= delta ||T^{-1}b||_T.
struct SolverRequest {
  const SystemOperator& op;
  std::span<const double> b;
  double delta = 1e-10;
  std::size_t max_iterations = 100000;  // total CG iterations over all rounds
};

struct SolverResult {
  // The solution is y + y_tail (double-double). y alone is the rounded value.
  std::vector<double> y;
  std::vector<double> y_tail;
  std::size_t iterations = 0;
  std::size_t refinements = 0;
  double residual_norm = 0.0;      // ||b - T(y + y_tail)||, extended precision
  double relative_residual = 0.0;  // residual_norm / ||b||
  double target = 0.0;             // relative residual that certifies delta
  // residual_norm plus its rounding margin is at most
  // delta * sqrt(lower / upper) * ||b||, which implies the energy-norm contract.
  bool certified = false;
  std::string diagnostics;
};

// Jacobi-preconditioned conjugate gradients with iterative refinement. Each
// round solves the correction equation in double; residuals and the iterate
// are accumulated in double-double so the certificate can reach targets far
// below double epsilon.
SolverResult solve(const SolverRequest& req);

}  // namespace fjs

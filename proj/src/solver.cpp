#include "fjs/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "double_double.hpp"
#include "fjs/error.hpp"
#include "fjs/parallel.hpp"

namespace fjs {
namespace {

using detail::DoubleDouble;

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

struct CgOutcome {
  std::size_t iterations = 0;
  bool reached = false;
};

// y = T p and returns p'y. Single-threaded runs fuse the dot product into
// the sweep; the summation order is the same either way.
double apply_dot(const SystemOperator& op, std::span<const double> p, std::span<double> y) {
  if (thread_count() > 1) {
    op.apply(p, y);
    return dot(p, y);
  }
  const auto rows = op.graph().row_offsets();
  const auto vals = op.graph().neighbor_weights();
  const auto cols = op.columns();
  const auto diag = op.diagonal();
  double py = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double sum = 0.0;
    for (std::size_t q = rows[i]; q < rows[i + 1]; ++q) sum += vals[q] * p[cols[q]];
    y[i] = diag[i] * p[i] - sum;
    py += p[i] * y[i];
  }
  return py;
}

// Jacobi PCG for T x = rhs starting from x = 0. Stops when the recurrence
// residual drops to rel_tol * ||rhs|| or the iteration budget runs out.
CgOutcome pcg(const SystemOperator& op, std::span<const double> rhs, double rel_tol,
              std::size_t budget, std::vector<double>& x) {
  const std::size_t n = op.size();
  const auto diag = op.diagonal();
  x.assign(n, 0.0);
  std::vector<double> r(rhs.begin(), rhs.end());
  std::vector<double> z(n), p(n), q(n);

  const double rhs_norm = norm2(rhs);
  CgOutcome out;
  if (rhs_norm == 0.0) {
    out.reached = true;
    return out;
  }
  const double stop = rel_tol * rhs_norm;

  double rz = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    z[i] = r[i] / diag[i];
    rz += r[i] * z[i];
  }
  p = z;

  while (out.iterations < budget) {
    const double pq = apply_dot(op, p, q);
    if (!(pq > 0.0)) break;
    const double alpha = rz / pq;
    double rr = 0.0;
    double rz_next = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
      z[i] = r[i] / diag[i];
      rr += r[i] * r[i];
      rz_next += r[i] * z[i];
    }
    ++out.iterations;
    if (std::sqrt(rr) <= stop) {
      out.reached = true;
      break;
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  return out;
}

struct ExtendedResidual {
  std::vector<double> r;  // rounded to double
  double norm = 0.0;
  double margin = 0.0;    // bound on the rounding error of norm
};

// r = b - T (y + tail) evaluated in double-double.
ExtendedResidual extended_residual(const SystemOperator& op, std::span<const double> b,
                                   std::span<const double> y, std::span<const double> tail) {
  const Graph& g = op.graph();
  const auto& k = op.stubbornness();
  const auto rows = g.row_offsets();
  const auto cols = op.columns();
  const auto vals = g.neighbor_weights();
  const std::size_t n = op.size();

  ExtendedResidual res;
  res.r.resize(n);
  std::vector<double> margin(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const DoubleDouble yi{y[i], tail[i]};
      DoubleDouble acc = detail::mul(yi, k[i]);
      double magnitude = k[i] * std::abs(y[i]);
      for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) {
        const std::size_t j = cols[p];
        const DoubleDouble diff = detail::add(yi, detail::negate(DoubleDouble{y[j], tail[j]}));
        acc = detail::add(acc, detail::mul(diff, vals[p]));
        magnitude += vals[p] * (std::abs(y[i]) + std::abs(y[j]));
      }
      const DoubleDouble ri = detail::add(detail::negate(acc), b[i]);
      res.r[i] = ri.hi + ri.lo;
      const double ops = static_cast<double>(rows[i + 1] - rows[i] + 4);
      margin[i] = ops * 1e-31 * (magnitude + std::abs(b[i])) +
                  std::numeric_limits<double>::epsilon() * std::abs(res.r[i]);
    }
  });
  res.norm = norm2(res.r);
  res.margin = norm2(margin);
  return res;
}

}  // namespace

SystemOperator::SystemOperator(const Graph& g, const StubbornnessVector& k)
    : g_(&g), k_(&k), bounds_(eigen_bounds(g, k)) {
  if (g.node_count() > std::numeric_limits<std::uint32_t>::max()) {
    throw SizeGuardError("solver supports at most 2^32 - 1 nodes");
  }
  const auto deg = g.degrees();
  diag_.resize(g.node_count());
  for (std::size_t i = 0; i < diag_.size(); ++i) diag_[i] = deg[i] + k[i];
  const auto wide = g.neighbor_indices();
  cols_.assign(wide.begin(), wide.end());
}

void SystemOperator::apply(std::span<const double> x, std::span<double> y) const {
  const auto rows = g_->row_offsets();
  const auto vals = g_->neighbor_weights();
  parallel_for(size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) sum += vals[p] * x[cols_[p]];
      y[i] = diag_[i] * x[i] - sum;
    }
  });
}

SolverResult solve(const SolverRequest& req) {
  const SystemOperator& op = req.op;
  const std::size_t n = op.size();
  if (req.b.size() != n) throw InputError("right-hand side has wrong dimension");
  if (!(req.delta > 0.0 && req.delta < 1.0)) throw InputError("solver delta must lie in (0, 1)");

  SolverResult out;
  out.y.assign(n, 0.0);
  out.y_tail.assign(n, 0.0);

  const double b_norm = norm2(req.b);
  const auto& bounds = op.bounds();
  out.target = req.delta * std::sqrt(bounds.lower / bounds.upper);
  if (b_norm == 0.0) {
    out.certified = true;
    return out;
  }
  const double target_abs = out.target * b_norm;

  std::vector<double> residual(req.b.begin(), req.b.end());
  double r_norm = b_norm;
  std::vector<double> correction;
  constexpr std::size_t kMaxRounds = 12;

  for (std::size_t round = 0; round < kMaxRounds; ++round) {
    const std::size_t budget = req.max_iterations - std::min(req.max_iterations, out.iterations);
    if (budget == 0) {
      out.diagnostics = "iteration cap reached";
      break;
    }
    const double inner_tol = std::clamp(0.5 * target_abs / r_norm, 1e-12, 0.1);
    const CgOutcome cg = pcg(op, residual, inner_tol, budget, correction);
    out.iterations += cg.iterations;
    out.refinements = round + 1;

    for (std::size_t i = 0; i < n; ++i) {
      const DoubleDouble sum =
          detail::add(DoubleDouble{out.y[i], out.y_tail[i]}, correction[i]);
      out.y[i] = sum.hi;
      out.y_tail[i] = sum.lo;
    }

    ExtendedResidual er = extended_residual(op, req.b, out.y, out.y_tail);
    const double previous = r_norm;
    r_norm = er.norm;
    residual = std::move(er.r);
    out.residual_norm = r_norm;
    out.relative_residual = r_norm / b_norm;

    if (r_norm + er.margin <= target_abs) {
      out.certified = true;
      break;
    }
    if (!cg.reached && out.iterations >= req.max_iterations) {
      out.diagnostics = "iteration cap reached";
      break;
    }
    // Further rounds cannot push the residual below its own rounding margin.
    if (r_norm <= 2.0 * er.margin) {
      out.diagnostics = "residual reached the extended-precision floor at relative residual " +
                        std::to_string(out.relative_residual);
      break;
    }
    if (r_norm > 0.5 * previous) {
      out.diagnostics = "refinement stagnated at relative residual " +
                        std::to_string(out.relative_residual);
      break;
    }
  }
  if (!out.certified && out.diagnostics.empty()) {
    out.diagnostics = "refinement round limit reached";
  }
  return out;
}

}  // namespace fjs

#include "fjs/fjs.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <iostream>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "fjs/dynamics.hpp"
#include "fjs/error.hpp"
#include "fjs/forest.hpp"
#include "fjs/generators.hpp"
#include "fjs/graph.hpp"
#include "fjs/io.hpp"
#include "fjs/metrics.hpp"
#include "fjs/parallel.hpp"
#include "fjs/report.hpp"
#include "fjs/solver.hpp"
#include "fjs/verify.hpp"

struct fjs_graph {
  fjs::Graph g;
};

struct fjs_stubbornness {
  fjs::StubbornnessVector k;
};

namespace {

thread_local std::string last_error;

fjs_status fail(fjs_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs body and converts any exception into a status code.
template <class F>
fjs_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return FJS_OK;
  } catch (const fjs::Error& e) {
    return fail(static_cast<fjs_status>(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(FJS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(FJS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(FJS_ERR_INTERNAL, "unknown error");
  }
}

void require(bool condition, const char* message) {
  if (!condition) throw fjs::InputError(message);
}

const fjs::Graph& graph_of(const fjs_graph* g) {
  require(g != nullptr, "graph handle is null");
  return g->g;
}

const fjs::StubbornnessVector& stubbornness_of(const fjs_stubbornness* k) {
  require(k != nullptr, "stubbornness handle is null");
  return k->k;
}

// Checks n against the graph and wraps the pointer.
std::span<const double> in_vector(const fjs_graph* g, const double* p, std::size_t n,
                                  const char* what) {
  require(p != nullptr, "vector pointer is null");
  if (g && n != g->g.node_count()) {
    throw fjs::InputError(std::string(what) + " has length " + std::to_string(n) +
                          ", graph has " + std::to_string(g->g.node_count()) + " nodes");
  }
  return {p, n};
}

std::span<double> out_vector(const fjs_graph* g, double* p, std::size_t n) {
  require(p != nullptr, "output pointer is null");
  if (g && n != g->g.node_count()) {
    throw fjs::InputError("output length " + std::to_string(n) + " does not match the graph");
  }
  return {p, n};
}

void copy_out(std::span<const double> src, std::span<double> dst) {
  std::copy(src.begin(), src.end(), dst.begin());
}

fjs_spectral_estimate to_c(const fjs::SpectralEstimate& e) {
  return {e.rho, e.upper, e.residual, e.iterations, e.converged ? 1 : 0};
}

fjs_metrics_report to_c(const fjs::MetricsReport& r) {
  fjs_metrics_report c{};
  c.conflict = r.conflict;
  c.disagreement = r.disagreement;
  c.polarization = r.polarization;
  c.pd_index = r.pd_index;
  c.sum_z = r.sum_z;
  c.weighted_sum_z = r.weighted_sum_z;
  c.mode = r.mode == fjs::MetricsMode::exact ? FJS_METRICS_EXACT : FJS_METRICS_APPROX;
  c.delta_used = r.delta_used;
  c.eps_requested = r.eps_requested;
  c.conservation_residual = r.conservation_residual;
  c.conservation_relative = r.conservation_relative;
  c.pd_identity_residual = r.pd_identity_residual;
  c.certified = r.certified ? 1 : 0;
  c.centered = r.centered ? 1 : 0;
  c.solver_iterations = r.solver_iterations;
  c.node_count = r.node_count;
  c.edge_count = r.edge_count;
  c.graph_fingerprint = r.graph_fingerprint;
  c.solve_seconds = r.solve_seconds;
  c.norms_seconds = r.norms_seconds;
  c.total_seconds = r.total_seconds;
  return c;
}

fjs::MetricsReport from_c(const fjs_metrics_report& c) {
  fjs::MetricsReport r;
  r.conflict = c.conflict;
  r.disagreement = c.disagreement;
  r.polarization = c.polarization;
  r.pd_index = c.pd_index;
  r.sum_z = c.sum_z;
  r.weighted_sum_z = c.weighted_sum_z;
  r.mode = c.mode == FJS_METRICS_EXACT ? fjs::MetricsMode::exact : fjs::MetricsMode::approx;
  r.delta_used = c.delta_used;
  r.eps_requested = c.eps_requested;
  r.conservation_residual = c.conservation_residual;
  r.conservation_relative = c.conservation_relative;
  r.pd_identity_residual = c.pd_identity_residual;
  r.certified = c.certified != 0;
  r.centered = c.centered != 0;
  r.solver_iterations = c.solver_iterations;
  r.node_count = c.node_count;
  r.edge_count = c.edge_count;
  r.graph_fingerprint = c.graph_fingerprint;
  r.solve_seconds = c.solve_seconds;
  r.norms_seconds = c.norms_seconds;
  r.total_seconds = c.total_seconds;
  return r;
}

void copy_matrix(const Eigen::MatrixXd& m, double* out) {
  // Row-major output from Eigen's column-major storage.
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[i * m.cols() + j] = m(i, j);
  }
}

}  // namespace

extern "C" {

const char* fjs_last_error(void) { return last_error.c_str(); }

const char* fjs_version(void) { return "0.1.0"; }

void fjs_set_threads(unsigned count) { fjs::set_thread_count(count); }

unsigned fjs_get_threads(void) { return fjs::thread_count(); }

fjs_status fjs_graph_load(const char* path, fjs_graph** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new fjs_graph{fjs::read_edge_list(path)};
  });
}

fjs_status fjs_graph_from_edges(size_t m, const int64_t* u, const int64_t* v, const double* w,
                                fjs_graph** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(m == 0 || (u && v), "edge arrays are null");
    std::vector<fjs::EdgeTriple> triples(m);
    for (std::size_t e = 0; e < m; ++e) {
      triples[e] = {u[e], v[e], w ? w[e] : 1.0, e + 1};
    }
    *out = new fjs_graph{fjs::Graph::build(triples)};
  });
}

fjs_status fjs_graph_generate(fjs_graph_family family, size_t n, size_t param, uint64_t seed,
                              fjs_graph** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    switch (family) {
      case FJS_FAMILY_REGULAR:
        *out = new fjs_graph{fjs::random_regular_graph(n, param, seed)};
        return;
      case FJS_FAMILY_PREFERENTIAL:
        *out = new fjs_graph{fjs::preferential_attachment_graph(n, param, seed)};
        return;
      case FJS_FAMILY_CONNECTED: {
        require(n >= 1, "graph must have at least one node");
        const double p =
            n > 1 ? std::min(1.0, static_cast<double>(param) / static_cast<double>(n - 1)) : 0.0;
        *out = new fjs_graph{fjs::random_connected_graph(n, p, 1.0, 1.0, seed)};
        return;
      }
    }
    throw fjs::InputError("unknown graph family");
  });
}

void fjs_graph_free(fjs_graph* g) { delete g; }

size_t fjs_graph_node_count(const fjs_graph* g) { return g ? g->g.node_count() : 0; }

size_t fjs_graph_edge_count(const fjs_graph* g) { return g ? g->g.edge_count() : 0; }

size_t fjs_graph_dropped_self_loops(const fjs_graph* g) {
  return g ? g->g.dropped_self_loops() : 0;
}

size_t fjs_graph_merged_edges(const fjs_graph* g) { return g ? g->g.merged_parallel_edges() : 0; }

int64_t fjs_graph_node_id(const fjs_graph* g, size_t index) {
  if (!g || index >= g->g.node_count()) return -1;
  return g->g.node_ids()[index];
}

uint64_t fjs_graph_fingerprint(const fjs_graph* g) { return g ? g->g.fingerprint() : 0; }

fjs_status fjs_laplacian_apply(const fjs_graph* g, const double* x, double* y, size_t n) {
  return guarded([&] {
    fjs::laplacian_apply(graph_of(g), in_vector(g, x, n, "x"), out_vector(g, y, n));
  });
}

fjs_status fjs_stubbornness_uniform(size_t n, double value, fjs_stubbornness** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new fjs_stubbornness{fjs::StubbornnessVector::uniform(n, value)};
  });
}

fjs_status fjs_stubbornness_from_values(size_t n, const double* k, fjs_stubbornness** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    require(n == 0 || k != nullptr, "stubbornness array is null");
    *out = new fjs_stubbornness{fjs::StubbornnessVector(std::vector<double>(k, k + n))};
  });
}

fjs_status fjs_stubbornness_random(size_t n, double lo, double hi, uint64_t seed,
                                   fjs_stubbornness** out) {
  return guarded([&] {
    require(out != nullptr, "null output handle");
    *out = new fjs_stubbornness{fjs::random_stubbornness(n, lo, hi, seed)};
  });
}

fjs_status fjs_stubbornness_load(const char* path, const fjs_graph* g, fjs_stubbornness** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new fjs_stubbornness{fjs::read_stubbornness(path, graph_of(g))};
  });
}

void fjs_stubbornness_free(fjs_stubbornness* k) { delete k; }

size_t fjs_stubbornness_size(const fjs_stubbornness* k) { return k ? k->k.size() : 0; }

fjs_status fjs_stubbornness_values(const fjs_stubbornness* k, double* out, size_t n) {
  return guarded([&] {
    const auto& kv = stubbornness_of(k);
    require(out != nullptr, "output pointer is null");
    require(n == kv.size(), "output length does not match the stubbornness vector");
    copy_out(kv.values(), {out, n});
  });
}

fjs_status fjs_eigen_bounds(const fjs_graph* g, const fjs_stubbornness* k,
                            fjs_spectrum_bounds* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto b = fjs::eigen_bounds(graph_of(g), stubbornness_of(k));
    *out = {b.lower, b.upper, b.coarse_upper};
  });
}

fjs_status fjs_opinions_load(const char* path, const fjs_graph* g, double* out, size_t n) {
  return guarded([&] {
    require(path != nullptr, "null path");
    const auto s = fjs::read_opinions(path, graph_of(g));
    copy_out(s, out_vector(g, out, n));
  });
}

fjs_status fjs_opinions_generate(size_t n, const char* dist, uint64_t seed, double* out) {
  return guarded([&] {
    require(dist && out, "null argument");
    const auto d = fjs::parse_distribution(dist);
    if (!d) {
      throw fjs::InputError(std::string("unknown distribution '") + dist +
                            "' (expected uniform, powerlaw, normal or exponential)");
    }
    copy_out(fjs::generate_opinions(n, *d, seed), {out, n});
  });
}

fjs_status fjs_opinions_center(const fjs_stubbornness* k, const double* s, double* out, size_t n,
                               fjs_centering rule) {
  return guarded([&] {
    require(s && out, "null argument");
    const auto r =
        rule == FJS_CENTER_BY_COUNT ? fjs::CenteringRule::by_count : fjs::CenteringRule::weighted;
    copy_out(fjs::center_opinions({s, n}, stubbornness_of(k), r), {out, n});
  });
}

fjs_status fjs_write_node_values(const char* path, const fjs_graph* g, const double* values,
                                 size_t n) {
  return guarded([&] {
    const auto v = in_vector(g, values, n, "value vector");
    const std::span<const fjs::NodeId> ids =
        g ? g->g.node_ids() : std::span<const fjs::NodeId>{};
    if (!path || std::strcmp(path, "-") == 0) {
      fjs::write_node_values(std::cout, ids, v);
      std::cout.flush();
      return;
    }
    std::ofstream file(path);
    if (!file) throw fjs::InputError(std::string("cannot open file for writing: ") + path);
    fjs::write_node_values(file, ids, v);
    if (!file) throw fjs::InputError(std::string("write failed: ") + path);
  });
}

fjs_status fjs_step(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                    const double* z, double* out, size_t n) {
  return guarded([&] {
    fjs::step_into(graph_of(g), stubbornness_of(k), in_vector(g, s, n, "s"),
                   in_vector(g, z, n, "z"), out_vector(g, out, n));
  });
}

fjs_status fjs_equilibrium(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                           double* out, size_t n, fjs_solve_mode mode, double delta) {
  return guarded([&] {
    const auto m = mode == FJS_SOLVE_EXACT ? fjs::SolveMode::exact : fjs::SolveMode::iterative;
    const auto z = fjs::equilibrium(graph_of(g), stubbornness_of(k), in_vector(g, s, n, "s"), m,
                                    delta > 0.0 ? delta : 1e-12);
    copy_out(z, out_vector(g, out, n));
  });
}

fjs_status fjs_fundamental_matrix(const fjs_graph* g, const fjs_stubbornness* k, double* out,
                                  size_t n) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    require(n == graph_of(g).node_count(), "n does not match the graph");
    copy_matrix(fjs::fundamental_matrix(g->g, stubbornness_of(k)), out);
  });
}

fjs_status fjs_spectral_radius(const fjs_graph* g, const fjs_stubbornness* k, double tol,
                               size_t max_iterations, fjs_spectral_estimate* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = to_c(fjs::spectral_radius(graph_of(g), stubbornness_of(k), tol > 0.0 ? tol : 1e-10,
                                     max_iterations ? max_iterations : 100000));
  });
}

fjs_status fjs_convergence_bound(double rho, double f0_norm, double eps, uint64_t* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = fjs::convergence_bound(rho, f0_norm, eps);
  });
}

fjs_status fjs_simulate_until(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                              const double* z0, size_t n, double eps, uint64_t max_steps,
                              double* z_out, fjs_trace_callback callback, void* user,
                              fjs_simulation_summary* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fjs::SimulationOptions options;
    if (max_steps) options.max_steps = max_steps;
    const auto sim = fjs::simulate_until(graph_of(g), stubbornness_of(k), in_vector(g, s, n, "s"),
                                         in_vector(g, z0, n, "z0"), eps, options);
    if (callback) {
      for (std::size_t t = 0; t < sim.trace.f_norms.size(); ++t) {
        callback(t, sim.trace.e_norms[t], sim.trace.f_norms[t], user);
      }
    }
    if (z_out) copy_out(sim.state.expressed(), out_vector(g, z_out, n));
    *out = {sim.stop_time,           sim.bound, sim.within_bound ? 1 : 0,
            sim.trace.f_norms.front(), sim.trace.f_norms.back(), to_c(sim.spectral)};
  });
}

fjs_status fjs_solve(const fjs_graph* g, const fjs_stubbornness* k, const double* b, double* y,
                     size_t n, double delta, size_t max_iterations, fjs_solve_info* info) {
  return guarded([&] {
    const fjs::SystemOperator op(graph_of(g), stubbornness_of(k));
    const auto res = fjs::solve(fjs::SolverRequest{op, in_vector(g, b, n, "b"), delta,
                                                   max_iterations ? max_iterations : 100000});
    copy_out(res.y, out_vector(g, y, n));
    if (info) {
      *info = {res.iterations,        res.refinements, res.residual_norm,
               res.relative_residual, res.target,      res.certified ? 1 : 0};
    }
  });
}

fjs_status fjs_delta_budget(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                            size_t n, double eps, fjs_delta_thresholds* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const auto b = fjs::delta_budget(graph_of(g), stubbornness_of(k), in_vector(g, s, n, "s"), eps);
    *out = {b.delta1, b.delta2, b.delta3, b.delta};
  });
}

fjs_status fjs_metrics_exact(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                             size_t n, size_t dense_cap, int solver_fallback,
                             fjs_metrics_report* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    fjs::ExactOptions options;
    if (dense_cap) options.dense_cap = dense_cap;
    options.solver_fallback = solver_fallback != 0;
    *out = to_c(fjs::metrics_exact(graph_of(g), stubbornness_of(k), in_vector(g, s, n, "s"),
                                   options));
  });
}

fjs_status fjs_metrics_approx(const fjs_graph* g, const fjs_stubbornness* k, const double* s,
                              size_t n, double eps, fjs_metrics_report* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = to_c(fjs::approxim(graph_of(g), stubbornness_of(k), in_vector(g, s, n, "s"), eps));
  });
}

fjs_status fjs_forest_matrix(const fjs_graph* g, const fjs_stubbornness* k, double* out, size_t n,
                             double* total_weight) {
  return guarded([&] {
    require(out != nullptr, "output pointer is null");
    require(n == graph_of(g).node_count(), "n does not match the graph");
    const auto e = fjs::enumerate_forests(fjs::MappedDigraph(g->g, stubbornness_of(k)));
    copy_matrix(fjs::forest_matrix(e), out);
    if (total_weight) *total_weight = e.total_weight;
  });
}

fjs_status fjs_report_to_json(const fjs_metrics_report* report, const fjs_report_context* ctx,
                              char* buffer, size_t cap, size_t* needed) {
  return guarded([&] {
    require(report != nullptr, "null report");
    std::string text;
    if (ctx) {
      fjs::ReportContext c;
      if (ctx->command) c.command = ctx->command;
      if (ctx->graph_path) c.graph_path = ctx->graph_path;
      if (ctx->distribution) c.distribution = ctx->distribution;
      if (ctx->has_seed) c.seed = ctx->seed;
      c.threads = ctx->threads;
      text = fjs::report_to_json(from_c(*report), c);
    } else {
      text = fjs::report_to_json(from_c(*report));
    }
    if (needed) *needed = text.size() + 1;
    if (buffer && cap) {
      const std::size_t len = std::min(cap - 1, text.size());
      std::memcpy(buffer, text.data(), len);
      buffer[len] = '\0';
    }
  });
}

fjs_status fjs_report_from_json(const char* text, fjs_metrics_report* out) {
  return guarded([&] {
    require(text && out, "null argument");
    *out = to_c(fjs::report_from_json(text));
  });
}

fjs_status fjs_verify_run(int full, uint64_t seed, int inject_fault, fjs_line_callback callback,
                          void* user, size_t* failed) {
  return guarded([&] {
    fjs::VerifyOptions options;
    options.scale = full ? fjs::VerifyScale::full : fjs::VerifyScale::small;
    options.seed = seed;
    options.inject_fault = inject_fault != 0;
    if (callback) options.on_line = [&](const std::string& line) { callback(line.c_str(), user); };
    const auto summary = fjs::run_verify(options);
    if (failed) {
      *failed = 0;
      for (const auto& p : summary.properties) *failed += p.failed ? 1 : 0;
    }
  });
}

}  // extern "C"

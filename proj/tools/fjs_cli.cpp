// fjs command-line front end. Talks to the library only through fjs.h.
#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fjs/fjs.h"

namespace {

// Carries a status code up to main so it becomes the exit code.
struct Failure {
  fjs_status status;
  std::string message;
};

void check(fjs_status status) {
  if (status != FJS_OK) throw Failure{status, fjs_last_error()};
}

[[noreturn]] void input_error(const std::string& message) { throw Failure{FJS_ERR_INPUT, message}; }

struct GraphDeleter {
  void operator()(fjs_graph* g) const { fjs_graph_free(g); }
};
struct StubbornnessDeleter {
  void operator()(fjs_stubbornness* k) const { fjs_stubbornness_free(k); }
};
using GraphPtr = std::unique_ptr<fjs_graph, GraphDeleter>;
using StubbornnessPtr = std::unique_ptr<fjs_stubbornness, StubbornnessDeleter>;

GraphPtr load_graph(const std::string& path) {
  fjs_graph* g = nullptr;
  check(fjs_graph_load(path.c_str(), &g));
  GraphPtr owned(g);
  if (const auto loops = fjs_graph_dropped_self_loops(g)) {
    std::fprintf(stderr, "note: dropped %zu self-loop(s)\n", loops);
  }
  if (const auto merged = fjs_graph_merged_edges(g)) {
    std::fprintf(stderr, "note: merged %zu parallel edge(s)\n", merged);
  }
  return owned;
}

std::optional<double> parse_number(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

// "<file>", "<constant>" or "uniform:<lo>:<hi>" (drawn with seed).
StubbornnessPtr make_stubbornness(const std::string& source, fjs_graph* g, std::uint64_t seed) {
  fjs_stubbornness* k = nullptr;
  const std::size_t n = fjs_graph_node_count(g);
  if (source.rfind("uniform:", 0) == 0) {
    const auto colon = source.find(':', 8);
    const auto lo = parse_number(source.substr(8, colon - 8));
    const auto hi = colon == std::string::npos ? std::nullopt : parse_number(source.substr(colon + 1));
    if (!lo || !hi) input_error("stubbornness range must look like uniform:LO:HI, got '" + source + "'");
    check(fjs_stubbornness_random(n, *lo, *hi, seed ^ 0x9e3779b97f4a7c15ULL, &k));
  } else if (const auto c = parse_number(source)) {
    check(fjs_stubbornness_uniform(n, *c, &k));
  } else {
    check(fjs_stubbornness_load(source.c_str(), g, &k));
  }
  return StubbornnessPtr(k);
}

std::vector<double> make_opinions(const std::string& file, const std::string& dist, fjs_graph* g,
                                  std::uint64_t seed) {
  std::vector<double> s(fjs_graph_node_count(g));
  if (!file.empty()) {
    check(fjs_opinions_load(file.c_str(), g, s.data(), s.size()));
  } else {
    check(fjs_opinions_generate(s.size(), dist.c_str(), seed, s.data()));
  }
  return s;
}

std::string to_json(const fjs_metrics_report& r, const fjs_report_context& ctx) {
  std::size_t needed = 0;
  check(fjs_report_to_json(&r, &ctx, nullptr, 0, &needed));
  std::string text(needed, '\0');
  check(fjs_report_to_json(&r, &ctx, text.data(), needed, &needed));
  text.resize(needed - 1);
  return text;
}

// Writes JSON lines to path; "-" means standard output, empty means nowhere.
class JsonlSink {
 public:
  explicit JsonlSink(const std::string& path) : to_stdout_(path == "-") {
    if (!path.empty() && !to_stdout_) {
      file_.open(path);
      if (!file_) input_error("cannot open file for writing: " + path);
    }
  }
  void write(const std::string& line) {
    if (to_stdout_) {
      std::printf("%s\n", line.c_str());
    } else if (file_.is_open()) {
      file_ << line << '\n';
    }
  }

 private:
  bool to_stdout_;
  std::ofstream file_;
};

void print_report(const fjs_metrics_report& r) {
  std::printf("%-24s %s\n", "mode", r.mode == FJS_METRICS_EXACT ? "exact" : "approx");
  std::printf("%-24s %llu\n", "nodes", static_cast<unsigned long long>(r.node_count));
  std::printf("%-24s %llu\n", "edges", static_cast<unsigned long long>(r.edge_count));
  std::printf("%-24s %.17g\n", "internal conflict C", r.conflict);
  std::printf("%-24s %.17g\n", "disagreement D", r.disagreement);
  std::printf("%-24s %.17g\n", "polarization P", r.polarization);
  std::printf("%-24s %.17g\n", "index I_pd", r.pd_index);
  std::printf("%-24s %.17g\n", "sum z", r.sum_z);
  std::printf("%-24s %.3e\n", "conservation residual", r.conservation_residual);
  if (r.mode == FJS_METRICS_APPROX) {
    std::printf("%-24s %g\n", "eps", r.eps_requested);
    std::printf("%-24s %.3e\n", "delta", r.delta_used);
    std::printf("%-24s %s\n", "certified", r.certified ? "yes" : "no");
    std::printf("%-24s %s\n", "centered", r.centered ? "yes" : "no");
    std::printf("%-24s %llu\n", "solver iterations",
                static_cast<unsigned long long>(r.solver_iterations));
  }
  std::printf("%-24s %.6f s\n", "solve time", r.solve_seconds);
  std::printf("%-24s %.6f s\n", "norm time", r.norms_seconds);
  std::printf("%-24s %.6f s\n", "total time", r.total_seconds);
}

struct Common {
  std::string graph;
  std::string stubbornness = "1";
  std::string opinions;
  std::string dist = "uniform";
  std::uint64_t seed = 1;
  std::string out;
  unsigned threads = 1;
};

void add_graph_inputs(CLI::App* cmd, Common& c) {
  cmd->add_option("--graph", c.graph, "Edge list: `u v [w]` per line")->required();
  cmd->add_option("--stubbornness", c.stubbornness,
                  "File of `node k` lines, a constant, or uniform:LO:HI")
      ->capture_default_str();
  cmd->add_option("--opinions", c.opinions, "File of `node s` lines (overrides --dist)");
  cmd->add_option("--dist", c.dist, "Generated opinions: uniform|powerlaw|normal|exponential")
      ->capture_default_str();
  cmd->add_option("--seed", c.seed, "Seed for generated k and s")->capture_default_str();
}

int run_metrics(const Common& c, const std::string& mode, double eps, std::size_t dense_cap,
                bool fallback) {
  auto g = load_graph(c.graph);
  auto k = make_stubbornness(c.stubbornness, g.get(), c.seed);
  auto s = make_opinions(c.opinions, c.dist, g.get(), c.seed);
  fjs_metrics_report r{};
  if (mode == "exact") {
    check(fjs_metrics_exact(g.get(), k.get(), s.data(), s.size(), dense_cap, fallback, &r));
  } else {
    check(fjs_metrics_approx(g.get(), k.get(), s.data(), s.size(), eps, &r));
    if (r.centered) std::fprintf(stderr, "note: opinions centered so that 1'Ks = 0\n");
    if (!r.certified) std::fprintf(stderr, "warning: solver did not certify delta\n");
  }
  print_report(r);
  const fjs_report_context ctx{"metrics", c.graph.c_str(), c.opinions.empty() ? c.dist.c_str() : nullptr,
                               c.seed, c.opinions.empty() ? 1 : 0, c.threads};
  JsonlSink(c.out).write(to_json(r, ctx));
  return 0;
}

int run_simulate(const Common& c, double eps, std::uint64_t max_steps, bool trace) {
  auto g = load_graph(c.graph);
  auto k = make_stubbornness(c.stubbornness, g.get(), c.seed);
  auto s = make_opinions(c.opinions, c.dist, g.get(), c.seed);
  const std::vector<double> z0(s.size(), 0.0);
  std::vector<double> z(s.size());
  fjs_simulation_summary sum{};
  auto print_step = [](std::uint64_t t, double e, double f, void*) {
    std::printf("%8llu  |e| %.6e  |f| %.6e\n", static_cast<unsigned long long>(t), e, f);
  };
  check(fjs_simulate_until(g.get(), k.get(), s.data(), z0.data(), s.size(), eps, max_steps,
                           z.data(), trace ? +print_step : nullptr, nullptr, &sum));
  std::printf("%-24s %.17g\n", "spectral radius", sum.spectral.rho);
  std::printf("%-24s %.17g\n", "radius upper bound", sum.spectral.upper);
  std::printf("%-24s %.6e\n", "|f(0)|", sum.f0_norm);
  std::printf("%-24s %.6e\n", "|f(stop)|", sum.final_f_norm);
  std::printf("%-24s %llu\n", "stop time", static_cast<unsigned long long>(sum.stop_time));
  std::printf("%-24s %llu\n", "bound", static_cast<unsigned long long>(sum.bound));
  std::printf("%-24s %s\n", "within bound", sum.within_bound ? "yes" : "no");
  if (!c.out.empty()) check(fjs_write_node_values(c.out.c_str(), g.get(), z.data(), z.size()));
  return 0;
}

int run_spectrum(const Common& c, double tol, double eps) {
  auto g = load_graph(c.graph);
  auto k = make_stubbornness(c.stubbornness, g.get(), c.seed);
  fjs_spectral_estimate est{};
  check(fjs_spectral_radius(g.get(), k.get(), tol, 0, &est));
  fjs_spectrum_bounds b{};
  check(fjs_eigen_bounds(g.get(), k.get(), &b));
  std::printf("%-24s %.17g\n", "spectral radius", est.rho);
  std::printf("%-24s %.17g\n", "radius upper bound", est.upper);
  std::printf("%-24s %zu\n", "power iterations", est.iterations);
  std::printf("%-24s %s\n", "converged", est.converged ? "yes" : "no");
  std::printf("%-24s [%.17g, %.17g]\n", "spectrum of L+K in", b.lower, b.upper);
  std::printf("%-24s %.17g\n", "coarse upper", b.coarse_upper);
  if (eps > 0.0) {
    // |f(0)| for z(0) = 0 requires the equilibrium.
    auto s = make_opinions(c.opinions, c.dist, g.get(), c.seed);
    const std::vector<double> zero(s.size(), 0.0);
    fjs_simulation_summary sum{};
    std::vector<double> z(s.size());
    check(fjs_simulate_until(g.get(), k.get(), s.data(), zero.data(), s.size(), eps, 0, z.data(),
                             nullptr, nullptr, &sum));
    std::printf("%-24s %.6e\n", "|f(0)|", sum.f0_norm);
    std::printf("%-24s %llu\n", "steps bound", static_cast<unsigned long long>(sum.bound));
  }
  return 0;
}

int run_verify_cmd(const std::string& scale, std::uint64_t seed, bool inject_fault) {
  if (scale != "small" && scale != "full") input_error("--scale must be small or full");
  std::size_t failed = 0;
  auto print_line = [](const char* line, void*) {
    std::printf("%s\n", line);
    std::fflush(stdout);
  };
  check(fjs_verify_run(scale == "full", seed, inject_fault, +print_line, nullptr, &failed));
  std::printf("%s: %zu failing propert%s\n", failed ? "FAIL" : "OK", failed, failed == 1 ? "y" : "ies");
  return failed ? FJS_ERR_NUMERICAL : 0;
}

struct BenchOptions {
  std::vector<double> sizes{1e4, 3e4, 1e5, 3e5, 1e6};
  std::string family = "regular";
  std::size_t degree = 10;
  std::size_t exact_cap = 3000;
  std::size_t repeats = 3;
  double eps = 1e-6;
};

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double max_relative_error(const fjs_metrics_report& a, const fjs_metrics_report& e) {
  auto rel = [](double x, double y) {
    const double scale = std::max(std::abs(x), std::abs(y));
    return scale == 0.0 ? 0.0 : std::abs(x - y) / scale;
  };
  return std::max({rel(a.conflict, e.conflict), rel(a.disagreement, e.disagreement),
                   rel(a.polarization, e.polarization), rel(a.pd_index, e.pd_index)});
}

int run_bench(const Common& c, const BenchOptions& b) {
  fjs_graph_family family;
  if (b.family == "regular") {
    family = FJS_FAMILY_REGULAR;
  } else if (b.family == "preferential") {
    family = FJS_FAMILY_PREFERENTIAL;
  } else {
    input_error("--family must be regular or preferential");
  }
  if (b.repeats == 0) input_error("--repeats must be positive");
  JsonlSink sink(c.out);
  std::printf("%10s %10s %12s %12s %12s %10s %12s\n", "edges", "nodes", "exact[s]", "approx[s]",
              "max rel err", "certified", "iterations");
  std::vector<double> log_m, log_t;
  for (double size : b.sizes) {
    if (!(size >= 1.0)) input_error("bench sizes must be positive edge counts");
    // Regular graphs have n*d/2 edges, attachment graphs about n*d.
    const double per_node = family == FJS_FAMILY_REGULAR ? b.degree / 2.0 : static_cast<double>(b.degree);
    const auto n = static_cast<std::size_t>(std::llround(size / per_node));
    fjs_graph* raw = nullptr;
    check(fjs_graph_generate(family, n, b.degree, c.seed, &raw));
    GraphPtr g(raw);
    auto k = make_stubbornness(c.stubbornness, g.get(), c.seed);
    auto s = make_opinions("", c.dist, g.get(), c.seed);
    std::vector<double> centered(s.size());
    check(fjs_opinions_center(k.get(), s.data(), centered.data(), s.size(), FJS_CENTER_WEIGHTED));

    std::vector<double> times;
    fjs_metrics_report approx{};
    for (std::size_t r = 0; r < b.repeats; ++r) {
      check(fjs_metrics_approx(g.get(), k.get(), centered.data(), centered.size(), b.eps, &approx));
      times.push_back(approx.total_seconds);
    }
    const double t_approx = median(times);
    const fjs_report_context ctx{"bench", nullptr, c.dist.c_str(), c.seed, 1, c.threads};
    approx.total_seconds = t_approx;
    sink.write(to_json(approx, ctx));

    char exact_col[32] = "-";
    char err_col[32] = "-";
    if (n <= b.exact_cap) {
      fjs_metrics_report exact{};
      const fjs_status st =
          fjs_metrics_exact(g.get(), k.get(), centered.data(), centered.size(), 0, 0, &exact);
      if (st == FJS_OK) {
        std::snprintf(exact_col, sizeof exact_col, "%.4f", exact.total_seconds);
        std::snprintf(err_col, sizeof err_col, "%.2e", max_relative_error(approx, exact));
        sink.write(to_json(exact, ctx));
      } else if (st != FJS_ERR_SIZE_GUARD) {
        check(st);
      }
    }
    const auto m = fjs_graph_edge_count(g.get());
    std::printf("%10zu %10zu %12s %12.4f %12s %10s %12llu\n", m, n, exact_col, t_approx, err_col,
                approx.certified ? "yes" : "no",
                static_cast<unsigned long long>(approx.solver_iterations));
    std::fflush(stdout);
    log_m.push_back(std::log(static_cast<double>(m)));
    log_t.push_back(std::log(std::max(t_approx, 1e-9)));
  }
  if (log_m.size() >= 2) {
    const double mx = std::accumulate(log_m.begin(), log_m.end(), 0.0) / log_m.size();
    const double my = std::accumulate(log_t.begin(), log_t.end(), 0.0) / log_t.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_m.size(); ++i) {
      sxy += (log_m[i] - mx) * (log_t[i] - my);
      sxx += (log_m[i] - mx) * (log_m[i] - mx);
    }
    if (sxx > 0.0) std::printf("approx time vs edges, log-log slope: %.3f\n", sxy / sxx);
  }
  return 0;
}

int run_gen_opinions(const Common& c, std::size_t n) {
  GraphPtr g;
  if (!c.graph.empty()) {
    g = load_graph(c.graph);
    n = fjs_graph_node_count(g.get());
  }
  if (n == 0) input_error("give --graph or a positive --n");
  std::vector<double> s(n);
  check(fjs_opinions_generate(n, c.dist.c_str(), c.seed, s.data()));
  check(fjs_write_node_values(c.out.empty() ? "-" : c.out.c_str(), g.get(), s.data(), n));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Friedkin-Johnsen opinion dynamics with heterogeneous stubbornness"};
  app.require_subcommand(1);
  Common c;
  app.add_option("--threads", c.threads, "Worker threads (1 gives bitwise reproducible output)")
      ->capture_default_str();

  auto* metrics = app.add_subcommand("metrics", "Conflict, disagreement and polarization");
  add_graph_inputs(metrics, c);
  std::string mode = "exact";
  double eps = 1e-6;
  std::size_t dense_cap = 0;
  bool fallback = false;
  metrics->add_option("--mode", mode, "exact|approx")
      ->check(CLI::IsMember({"exact", "approx"}))
      ->capture_default_str();
  metrics->add_option("--eps", eps, "Approximation accuracy in (0, 1/2)")->capture_default_str();
  metrics->add_option("--dense-cap", dense_cap, "Largest n for the dense exact path (0 = default)");
  metrics->add_flag("--solver-fallback", fallback, "Exact mode: solve iteratively above the cap");
  metrics->add_option("--out", c.out, "Write the JSON report here ('-' for stdout)");

  auto* simulate = app.add_subcommand("simulate", "Iterate the update rule until |f(t)| <= eps");
  add_graph_inputs(simulate, c);
  double sim_eps = 1e-8;
  std::uint64_t max_steps = 0;
  bool trace = false;
  simulate->add_option("--eps", sim_eps, "Stop threshold on |f(t)|")->capture_default_str();
  simulate->add_option("--max-steps", max_steps, "Step cap (0 = default)");
  simulate->add_flag("--trace", trace, "Print |e(t)| and |f(t)| every step");
  simulate->add_option("--out", c.out, "Write the final expressed opinions here");

  auto* spectrum = app.add_subcommand("spectrum", "Spectral radius and convergence bound");
  add_graph_inputs(spectrum, c);
  double tol = 1e-10;
  double spectrum_eps = 0.0;
  spectrum->add_option("--tol", tol, "Power-iteration tolerance")->capture_default_str();
  spectrum->add_option("--eps", spectrum_eps, "Also report the step bound for this eps (z(0) = 0)");

  auto* verify = app.add_subcommand("verify", "Run the property suites");
  std::string scale = "small";
  bool inject_fault = false;
  verify->add_option("--scale", scale, "small|full")->capture_default_str();
  verify->add_option("--seed", c.seed, "Seed for the random instances")->capture_default_str();
  verify->add_flag("--inject-fault", inject_fault, "Perturb a fundamental-matrix row (self-test)");

  auto* bench = app.add_subcommand("bench", "Exact vs approximate timing on synthetic graphs");
  BenchOptions bo;
  std::string bench_k = "uniform:0.5:2";
  bench->add_option("--sizes", bo.sizes, "Target edge counts")->delimiter(',')->capture_default_str();
  bench->add_option("--family", bo.family, "regular|preferential")->capture_default_str();
  bench->add_option("--degree", bo.degree, "Degree (regular) or links per node (preferential)")
      ->capture_default_str();
  bench->add_option("--dist", c.dist, "Opinion distribution")->capture_default_str();
  bench->add_option("--stubbornness", bench_k, "Constant or uniform:LO:HI")
      ->capture_default_str();
  bench->add_option("--eps", bo.eps, "Approximation accuracy")->capture_default_str();
  bench->add_option("--seed", c.seed, "Seed")->capture_default_str();
  bench->add_option("--exact-cap", bo.exact_cap, "Largest n timed in exact mode")
      ->capture_default_str();
  bench->add_option("--repeats", bo.repeats, "Approx runs per size (median is reported)")
      ->capture_default_str();
  bench->add_option("--out", c.out, "JSON lines for every run");

  auto* gen = app.add_subcommand("gen-opinions", "Write generated innate opinions");
  std::size_t gen_n = 0;
  gen->add_option("--graph", c.graph, "Take n and node ids from this edge list");
  gen->add_option("-n,--n", gen_n, "Number of opinions when no graph is given");
  gen->add_option("--dist", c.dist, "uniform|powerlaw|normal|exponential")->capture_default_str();
  gen->add_option("--seed", c.seed, "Seed")->capture_default_str();
  gen->add_option("--out", c.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return FJS_ERR_INPUT;
  }

  try {
    fjs_set_threads(std::max(1u, c.threads));
    if (*metrics) return run_metrics(c, mode, eps, dense_cap, fallback);
    if (*simulate) return run_simulate(c, sim_eps, max_steps, trace);
    if (*spectrum) return run_spectrum(c, tol, spectrum_eps);
    if (*verify) return run_verify_cmd(scale, c.seed, inject_fault);
    if (*bench) {
      c.stubbornness = bench_k;
      return run_bench(c, bo);
    }
    if (*gen) return run_gen_opinions(c, gen_n);
  } catch (const Failure& f) {
    std::fprintf(stderr, "error: %s\n", f.message.c_str());
    return static_cast<int>(f.status);
  }
  return 0;
}

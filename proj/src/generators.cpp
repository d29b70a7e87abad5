#include "fjs/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fjs/error.hpp"

namespace fjs {
namespace {

// Affine map of [min, max] onto [-1, 1]; a constant sample maps to 0.
void rescale_to_unit_interval(std::vector<double>& v) {
  if (v.empty()) return;
  const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (hi == lo) {
    std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  for (double& x : v) x = std::clamp(2.0 * (x - lo) / (hi - lo) - 1.0, -1.0, 1.0);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

std::size_t Rng::below(std::size_t bound) {
  // Lemire's multiply-shift with rejection.
  const std::uint64_t b = bound;
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * b;
  auto low = static_cast<std::uint64_t>(m);
  if (low < b) {
    const std::uint64_t threshold = -b % b;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * b;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::size_t>(m >> 64);
}

double Rng::standard_normal() {
  // Box-Muller, one variate per call.
  const double u1 = 1.0 - uniform01();  // (0, 1]
  const double u2 = uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::optional<OpinionDistribution> parse_distribution(std::string_view name) {
  if (name == "uniform") return OpinionDistribution::uniform;
  if (name == "powerlaw" || name == "power-law") return OpinionDistribution::powerlaw;
  if (name == "normal") return OpinionDistribution::normal;
  if (name == "exponential") return OpinionDistribution::exponential;
  return std::nullopt;
}

const char* to_string(OpinionDistribution d) {
  switch (d) {
    case OpinionDistribution::uniform: return "uniform";
    case OpinionDistribution::powerlaw: return "powerlaw";
    case OpinionDistribution::normal: return "normal";
    case OpinionDistribution::exponential: return "exponential";
  }
  return "unknown";
}

std::vector<double> generate_opinions(std::size_t n, OpinionDistribution dist, std::uint64_t seed,
                                      const OpinionParams& params) {
  if (n == 0) throw InputError("opinion count must be at least 1");
  Rng rng(seed);
  std::vector<double> s(n);
  switch (dist) {
    case OpinionDistribution::uniform:
      for (double& x : s) x = rng.uniform(-1.0, 1.0);
      break;
    case OpinionDistribution::normal:
      for (double& x : s) x = std::clamp(params.normal_sigma * rng.standard_normal(), -1.0, 1.0);
      break;
    case OpinionDistribution::exponential:
      for (double& x : s) x = -std::log(1.0 - rng.uniform01()) / params.exponential_rate;
      rescale_to_unit_interval(s);
      break;
    case OpinionDistribution::powerlaw: {
      // Pareto with x_min = 1: density ~ x^{-exponent}.
      const double tail = 1.0 / (params.powerlaw_exponent - 1.0);
      for (double& x : s) x = std::pow(1.0 - rng.uniform01(), -tail);
      rescale_to_unit_interval(s);
      break;
    }
  }
  return s;
}

StubbornnessVector random_stubbornness(std::size_t n, double lo, double hi, std::uint64_t seed) {
  if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
    throw InputError("stubbornness range must satisfy 0 < lo <= hi");
  }
  Rng rng(seed);
  std::vector<double> k(n);
  for (double& x : k) x = rng.uniform(lo, hi);
  return StubbornnessVector(std::move(k));
}

Graph random_regular_graph(std::size_t n, std::size_t degree, std::uint64_t seed) {
  if (degree < 2 || degree % 2 != 0) throw InputError("regular degree must be even and >= 2");
  if (n <= degree) throw InputError("regular graph needs n > degree");
  Rng rng(seed);
  std::vector<std::size_t> perm(n);
  std::vector<Edge> edges;
  edges.reserve(n * degree / 2);
  for (std::size_t c = 0; c < degree / 2; ++c) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    for (std::size_t i = 0; i < n; ++i) edges.push_back({perm[i], perm[(i + 1) % n], 1.0});
  }
  return Graph::from_indexed_edges(n, edges);
}

Graph preferential_attachment_graph(std::size_t n, std::size_t attach, std::uint64_t seed) {
  if (attach == 0) throw InputError("attachment count must be positive");
  if (n <= attach) throw InputError("preferential attachment needs n > attach");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::vector<std::size_t> endpoints;  // node repeated once per incident edge
  // Seed clique on attach + 1 nodes.
  for (std::size_t i = 0; i <= attach; ++i) {
    for (std::size_t j = i + 1; j <= attach; ++j) {
      edges.push_back({i, j, 1.0});
      endpoints.push_back(i);
      endpoints.push_back(j);
    }
  }
  std::vector<std::size_t> targets;
  for (std::size_t v = attach + 1; v < n; ++v) {
    targets.clear();
    while (targets.size() < attach) {
      const std::size_t t = endpoints[rng.below(endpoints.size())];
      if (std::find(targets.begin(), targets.end(), t) == targets.end()) targets.push_back(t);
    }
    for (std::size_t t : targets) {
      edges.push_back({v, t, 1.0});
      endpoints.push_back(v);
      endpoints.push_back(t);
    }
  }
  return Graph::from_indexed_edges(n, edges);
}

Graph random_connected_graph(std::size_t n, double p, double w_lo, double w_hi,
                             std::uint64_t seed) {
  if (n == 0) throw InputError("graph must have at least one node");
  if (!(w_lo > 0.0) || !(w_hi >= w_lo)) throw InputError("weight range must satisfy 0 < lo <= hi");
  Rng rng(seed);
  std::vector<Edge> edges;
  std::vector<std::vector<bool>> present(n, std::vector<bool>(n, false));
  // Random recursive tree keeps the graph connected.
  for (std::size_t v = 1; v < n; ++v) {
    const std::size_t u = rng.below(v);
    edges.push_back({u, v, rng.uniform(w_lo, w_hi)});
    present[u][v] = true;
  }
  for (std::size_t u = 0; u < n; ++u) {
    for (std::size_t v = u + 1; v < n; ++v) {
      if (present[u][v]) continue;
      if (rng.uniform01() < p) edges.push_back({u, v, rng.uniform(w_lo, w_hi)});
    }
  }
  return Graph::from_indexed_edges(n, edges);
}

}  // namespace fjs

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fjs/graph.hpp"

namespace fjs {

enum class OpinionDistribution { uniform, powerlaw, normal, exponential };

std::optional<OpinionDistribution> parse_distribution(std::string_view name);
const char* to_string(OpinionDistribution d);

// Sampler parameters. The defaults are configuration, not measured values.
struct OpinionParams {
  double normal_sigma = 1.0 / 3.0;  // normal(0, sigma), clamped to [-1, 1]
  double exponential_rate = 1.0;    // min-max rescaled, then mapped to [-1, 1]
  double powerlaw_exponent = 2.5;   // Pareto tail, min-max rescaled
};

// n opinions in [-1, 1], fully determined by (distribution, seed, params).
std::vector<double> generate_opinions(std::size_t n, OpinionDistribution dist, std::uint64_t seed,
                                      const OpinionParams& params = {});

// Uniform stubbornness on [lo, hi], fully determined by seed.
StubbornnessVector random_stubbornness(std::size_t n, double lo, double hi, std::uint64_t seed);

// Union of degree/2 random Hamiltonian cycles: every node has degree
// `degree` up to the rare merged duplicate. degree must be even and >= 2.
Graph random_regular_graph(std::size_t n, std::size_t degree, std::uint64_t seed);

// Preferential attachment: each new node links to `attach` distinct
// existing nodes chosen proportionally to degree.
Graph preferential_attachment_graph(std::size_t n, std::size_t attach, std::uint64_t seed);

// Connected random graph: a random spanning tree plus each remaining pair
// independently with probability p. Weights uniform on [w_lo, w_hi].
Graph random_connected_graph(std::size_t n, double p, double w_lo, double w_hi,
                             std::uint64_t seed);

// mt19937_64 (fully specified by the standard) with hand-written transforms,
// so sampled sequences do not depend on the library's distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  std::uint64_t next_u64();
  double uniform01();  // [0, 1)
  double uniform(double lo, double hi);
  std::size_t below(std::size_t bound);  // [0, bound)
  double standard_normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace fjs

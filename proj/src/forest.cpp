#include "fjs/forest.hpp"

#include <numeric>
#include <string>

#include "fjs/error.hpp"

namespace fjs {
namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { reset(); }

  void reset() { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // False when a and b were already connected.
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent_[a] = b;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

MappedDigraph::MappedDigraph(const Graph& g, const StubbornnessVector& k)
    : out_arcs_(g.node_count()) {
  check_dimensions(g, k);
  for (const Edge& e : g.edges()) {
    out_arcs_[e.u].push_back({e.u, e.v, e.w / k[e.u]});
    out_arcs_[e.v].push_back({e.v, e.u, e.w / k[e.v]});
    arc_count_ += 2;
  }
}

Eigen::MatrixXd MappedDigraph::laplacian() const {
  const auto n = static_cast<Eigen::Index>(node_count());
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (const auto& arcs : out_arcs_) {
    for (const Arc& a : arcs) {
      lap(a.tail, a.tail) += a.weight;
      lap(a.tail, a.head) -= a.weight;
    }
  }
  return lap;
}

ForestEnumeration enumerate_forests(const MappedDigraph& d) {
  const std::size_t n = d.node_count();
  if (n > kForestMaxNodes) {
    throw SizeGuardError("forest enumeration needs n <= " + std::to_string(kForestMaxNodes) +
                         ", got " + std::to_string(n));
  }
  std::uint64_t candidates = 1;
  for (std::size_t i = 0; i < n; ++i) {
    candidates *= d.out_arcs(i).size() + 1;
    if (candidates > kForestMaxCandidates) {
      throw SizeGuardError("forest enumeration exceeds " + std::to_string(kForestMaxCandidates) +
                           " candidate arc subsets");
    }
  }

  ForestEnumeration out;
  const auto dim = static_cast<Eigen::Index>(n);
  out.root_weight = Eigen::MatrixXd::Zero(dim, dim);

  // choice[i] == 0: node i is a root; otherwise it keeps out-arc choice[i]-1.
  std::vector<std::size_t> choice(n, 0);
  std::vector<std::size_t> next(n);
  std::vector<std::size_t> root(n);
  DisjointSets sets(n);

  for (std::uint64_t c = 0; c < candidates; ++c) {
    sets.reset();
    bool acyclic = true;
    double weight = 1.0;
    for (std::size_t i = 0; i < n && acyclic; ++i) {
      if (choice[i] == 0) {
        next[i] = i;
        continue;
      }
      const Arc& a = d.out_arcs(i)[choice[i] - 1];
      next[i] = a.head;
      weight *= a.weight;
      acyclic = sets.unite(i, a.head);
    }
    if (acyclic) {
      ++out.forest_count;
      out.total_weight += weight;
      for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = i;
        while (next[r] != r) r = next[r];
        root[i] = r;
      }
      for (std::size_t i = 0; i < n; ++i) out.root_weight(i, root[i]) += weight;
    }
    // Mixed-radix increment.
    for (std::size_t i = 0; i < n; ++i) {
      if (++choice[i] <= d.out_arcs(i).size()) break;
      choice[i] = 0;
    }
  }
  return out;
}

Eigen::MatrixXd forest_matrix(const ForestEnumeration& e) {
  return e.root_weight / e.total_weight;
}

Eigen::MatrixXd forest_matrix(const MappedDigraph& d) {
  return forest_matrix(enumerate_forests(d));
}

}  // namespace fjs

#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fjs/graph.hpp"

namespace fjs {

struct Arc {
  std::size_t tail = 0;  // arc tail -> head
  std::size_t head = 0;
  double weight = 0.0;
};

// Digraph with arcs i -> j of weight w_ij / k_i and j -> i of weight
// w_ij / k_j for every undirected edge. Its Laplacian is K^{-1} L.
class MappedDigraph {
 public:
  MappedDigraph(const Graph& g, const StubbornnessVector& k);

  std::size_t node_count() const noexcept { return out_arcs_.size(); }
  std::size_t arc_count() const noexcept { return arc_count_; }
  const std::vector<Arc>& out_arcs(std::size_t i) const { return out_arcs_.at(i); }

  // Dense out-degree Laplacian (row i: out-weight on the diagonal, minus arc
  // weights off the diagonal).
  Eigen::MatrixXd laplacian() const;

 private:
  std::vector<std::vector<Arc>> out_arcs_;
  std::size_t arc_count_ = 0;
};

struct ForestEnumeration {
  double total_weight = 0.0;  // sum over all spanning forests, empty forest = 1
  // root_weight(i, j): total weight of forests in which following out-arcs
  // from i ends at root j.
  Eigen::MatrixXd root_weight;
  std::uint64_t forest_count = 0;
};

inline constexpr std::size_t kForestMaxNodes = 12;
inline constexpr std::uint64_t kForestMaxCandidates = 10000000;

// Every arc subset in which each node keeps at most one out-arc and no cycle
// is formed. Throws SizeGuardError when n > 12 or prod_i (outdeg_i + 1) > 1e7.
ForestEnumeration enumerate_forests(const MappedDigraph& d);

// Phi_ij = root_weight(i, j) / total_weight; equals (I + K^{-1} L)^{-1}.
Eigen::MatrixXd forest_matrix(const MappedDigraph& d);
Eigen::MatrixXd forest_matrix(const ForestEnumeration& e);

}  // namespace fjs

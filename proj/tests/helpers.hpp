#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "fjs/graph.hpp"
#include "oracle.hpp"

namespace testing_support {

inline fjs::Graph to_graph(std::size_t n, const std::vector<oracle::RawEdge>& raw) {
  std::vector<fjs::Edge> edges;
  for (const auto& e : raw) edges.push_back({e.u, e.v, e.w});
  return fjs::Graph::from_indexed_edges(n, edges);
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

inline Eigen::VectorXd to_eigen(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline fjs::Graph two_node_path() {
  const std::vector<fjs::Edge> e{{0, 1, 1.0}};
  return fjs::Graph::from_indexed_edges(2, e);
}

}  // namespace testing_support

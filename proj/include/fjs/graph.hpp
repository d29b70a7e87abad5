#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fjs {

using NodeId = std::int64_t;

// One input edge as read from a file or handed over by a caller. `line` is
// the 1-based source line used in diagnostics (0 when not file-backed).
struct EdgeTriple {
  NodeId u = 0;
  NodeId v = 0;
  double w = 1.0;
  std::size_t line = 0;
};

struct Edge {
  std::size_t u = 0;
  std::size_t v = 0;
  double w = 0.0;
};

// Immutable weighted undirected graph.
//
// External node ids are remapped to [0, n) in order of first appearance.
// Stored edges satisfy u < v, are sorted lexicographically, carry strictly
// positive finite weights, and parallel input edges are merged by summing
// their weights in input order. Self-loops are dropped and counted.
//
// Adjacency is kept in CSR form with neighbors sorted by index; the weighted
// degree of node i is the CSR row sum taken in that same order, so
// laplacian_apply(1) is exactly zero.
class Graph {
 public:
  Graph() = default;

  // Builds from external-id triples. Ids in `declared_nodes` that no edge
  // mentions become isolated nodes numbered after all edge endpoints.
  static Graph build(std::span<const EdgeTriple> edges,
                     std::span<const NodeId> declared_nodes = {});

  // Builds from already-dense indices; node ids are the indices themselves.
  static Graph from_indexed_edges(std::size_t n, std::span<const Edge> edges);

  std::size_t node_count() const noexcept { return ids_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t dropped_self_loops() const noexcept { return dropped_self_loops_; }
  std::size_t merged_parallel_edges() const noexcept { return merged_parallel_; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const double> degrees() const noexcept { return degree_; }

  std::span<const std::size_t> row_offsets() const noexcept { return row_ptr_; }
  std::span<const std::size_t> neighbor_indices() const noexcept { return col_idx_; }
  std::span<const double> neighbor_weights() const noexcept { return values_; }

  std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
    return {col_idx_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }
  std::span<const double> neighbor_weights(std::size_t i) const noexcept {
    return {values_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
  }

  // Node id <-> index map.
  std::span<const NodeId> node_ids() const noexcept { return ids_; }
  NodeId node_id(std::size_t index) const { return ids_.at(index); }
  // Returns node_count() when the id is unknown.
  std::size_t index_of(NodeId id) const;

  // Zero for edgeless graphs.
  double w_min() const noexcept { return w_min_; }
  double w_max() const noexcept { return w_max_; }
  double d_max() const noexcept { return d_max_; }

  // FNV-1a over the canonical edge list and the id table.
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  void finalize();

  std::vector<NodeId> ids_;
  std::vector<std::size_t> id_order_;  // indices sorted by id, for lookup
  std::vector<Edge> edges_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<double> values_;
  std::vector<double> degree_;
  double w_min_ = 0.0;
  double w_max_ = 0.0;
  double d_max_ = 0.0;
  std::size_t dropped_self_loops_ = 0;
  std::size_t merged_parallel_ = 0;
  std::uint64_t fingerprint_ = 0;
};

// y = L x with L = D - A.
void laplacian_apply(const Graph& g, std::span<const double> x, std::span<double> y);
std::vector<double> laplacian_apply(const Graph& g, std::span<const double> x);

// Signed edge-node incidence B (row e = e_u - e_v for stored edge u < v) and
// the edge-weight diagonal W.
class IncidenceView {
 public:
  explicit IncidenceView(const Graph& g) : g_(&g) {}

  std::size_t rows() const noexcept { return g_->edge_count(); }
  std::size_t cols() const noexcept { return g_->node_count(); }

  // out[e] = x[u] - x[v]
  void apply(std::span<const double> x, std::span<double> out) const;
  // out = B^T y
  void apply_transpose(std::span<const double> y, std::span<double> out) const;
  // out = B^T W B x
  void compose_laplacian(std::span<const double> x, std::span<double> out) const;
  // ||W^{1/2} B x||^2
  double weighted_norm_squared(std::span<const double> x) const;

 private:
  const Graph* g_;
};

// Per-node stubbornness k_i > 0.
class StubbornnessVector {
 public:
  StubbornnessVector() = default;
  explicit StubbornnessVector(std::vector<double> k);
  static StubbornnessVector uniform(std::size_t n, double value);

  std::size_t size() const noexcept { return k_.size(); }
  double operator[](std::size_t i) const noexcept { return k_[i]; }
  std::span<const double> values() const noexcept { return k_; }
  double k_min() const noexcept { return k_min_; }
  double k_max() const noexcept { return k_max_; }
  double total() const noexcept { return total_; }

 private:
  std::vector<double> k_;
  double k_min_ = 0.0;
  double k_max_ = 0.0;
  double total_ = 0.0;
};

// Bracket of the spectrum of L + K.
struct SpectrumBounds {
  double lower = 0.0;        // k_min
  double upper = 0.0;        // k_max + 2 d_max (Gershgorin)
  double coarse_upper = 0.0;  // k_max + n * w_max, used by the delta budget
};

SpectrumBounds eigen_bounds(const Graph& g, const StubbornnessVector& k);

// Throws InputError when |k| != n.
void check_dimensions(const Graph& g, const StubbornnessVector& k);
void check_dimensions(const Graph& g, std::span<const double> x, const char* what);

}  // namespace fjs

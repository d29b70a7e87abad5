#include "fjs/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>
#include <unordered_map>

#include "fjs/error.hpp"
#include "fjs/parallel.hpp"

namespace fjs {
namespace {

void check_weight(double w, std::size_t line) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    std::string msg = "edge weight must be positive and finite, got " + std::to_string(w);
    if (line != 0) msg += " on line " + std::to_string(line);
    throw InputError(msg);
  }
}

struct FnvHasher {
  std::uint64_t state = 14695981039346656037ull;

  template <class T>
  void add(const T& value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (unsigned char b : bytes) {
      state ^= b;
      state *= 1099511628211ull;
    }
  }
};

// Sorts canonical (u < v) edges by endpoint pair and merges duplicates,
// summing weights in input order (stable sort).
std::vector<Edge> merge_parallel(std::vector<Edge> edges, std::size_t& merged) {
  std::stable_sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  std::vector<Edge> out;
  out.reserve(edges.size());
  merged = 0;
  for (const Edge& e : edges) {
    if (!out.empty() && out.back().u == e.u && out.back().v == e.v) {
      out.back().w += e.w;
      ++merged;
    } else {
      out.push_back(e);
    }
  }
  return out;
}

}  // namespace

Graph Graph::build(std::span<const EdgeTriple> edges,
                   std::span<const NodeId> declared_nodes) {
  if (edges.empty() && declared_nodes.empty()) {
    throw InputError("graph input is empty: no edges and no declared nodes");
  }

  Graph g;
  std::unordered_map<NodeId, std::size_t> index;
  index.reserve(edges.size() + declared_nodes.size());
  auto intern = [&](NodeId id) {
    auto [it, inserted] = index.try_emplace(id, g.ids_.size());
    if (inserted) g.ids_.push_back(id);
    return it->second;
  };

  std::vector<Edge> canonical;
  canonical.reserve(edges.size());
  for (const EdgeTriple& t : edges) {
    check_weight(t.w, t.line);
    const std::size_t a = intern(t.u);
    const std::size_t b = intern(t.v);
    if (a == b) {
      ++g.dropped_self_loops_;
      continue;
    }
    canonical.push_back({std::min(a, b), std::max(a, b), t.w});
  }
  for (NodeId id : declared_nodes) intern(id);
  g.edges_ = merge_parallel(std::move(canonical), g.merged_parallel_);
  g.finalize();
  return g;
}

Graph Graph::from_indexed_edges(std::size_t n, std::span<const Edge> edges) {
  if (n == 0) throw InputError("graph must have at least one node");
  Graph g;
  g.ids_.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.ids_[i] = static_cast<NodeId>(i);

  std::vector<Edge> canonical;
  canonical.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u >= n || e.v >= n) throw InputError("edge endpoint out of range");
    check_weight(e.w, 0);
    if (e.u == e.v) {
      ++g.dropped_self_loops_;
      continue;
    }
    canonical.push_back({std::min(e.u, e.v), std::max(e.u, e.v), e.w});
  }
  g.edges_ = merge_parallel(std::move(canonical), g.merged_parallel_);
  g.finalize();
  return g;
}

void Graph::finalize() {
  const std::size_t n = ids_.size();

  row_ptr_.assign(n + 1, 0);
  for (const Edge& e : edges_) {
    ++row_ptr_[e.u + 1];
    ++row_ptr_[e.v + 1];
  }
  for (std::size_t i = 0; i < n; ++i) row_ptr_[i + 1] += row_ptr_[i];

  // Edges are sorted by (u, v), so pushing in edge order leaves every row
  // sorted by neighbor index.
  col_idx_.resize(row_ptr_[n]);
  values_.resize(row_ptr_[n]);
  std::vector<std::size_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
  for (const Edge& e : edges_) {
    col_idx_[cursor[e.u]] = e.v;
    values_[cursor[e.u]++] = e.w;
    col_idx_[cursor[e.v]] = e.u;
    values_[cursor[e.v]++] = e.w;
  }

  degree_.assign(n, 0.0);
  d_max_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) sum += values_[p];
    degree_[i] = sum;
    d_max_ = std::max(d_max_, sum);
  }

  if (!edges_.empty()) {
    w_min_ = edges_.front().w;
    w_max_ = edges_.front().w;
    for (const Edge& e : edges_) {
      w_min_ = std::min(w_min_, e.w);
      w_max_ = std::max(w_max_, e.w);
    }
  }

  id_order_.resize(n);
  for (std::size_t i = 0; i < n; ++i) id_order_[i] = i;
  std::sort(id_order_.begin(), id_order_.end(),
            [this](std::size_t a, std::size_t b) { return ids_[a] < ids_[b]; });

  FnvHasher h;
  h.add(static_cast<std::uint64_t>(n));
  for (NodeId id : ids_) h.add(id);
  for (const Edge& e : edges_) {
    h.add(static_cast<std::uint64_t>(e.u));
    h.add(static_cast<std::uint64_t>(e.v));
    h.add(e.w);
  }
  fingerprint_ = h.state;
}

std::size_t Graph::index_of(NodeId id) const {
  auto it = std::lower_bound(id_order_.begin(), id_order_.end(), id,
                             [this](std::size_t idx, NodeId v) { return ids_[idx] < v; });
  if (it == id_order_.end() || ids_[*it] != id) return node_count();
  return *it;
}

void check_dimensions(const Graph& g, const StubbornnessVector& k) {
  if (k.size() != g.node_count()) {
    throw InputError("stubbornness vector has " + std::to_string(k.size()) +
                     " entries, graph has " + std::to_string(g.node_count()) + " nodes");
  }
}

void check_dimensions(const Graph& g, std::span<const double> x, const char* what) {
  if (x.size() != g.node_count()) {
    throw InputError(std::string(what) + " has " + std::to_string(x.size()) +
                     " entries, graph has " + std::to_string(g.node_count()) + " nodes");
  }
}

void laplacian_apply(const Graph& g, std::span<const double> x, std::span<double> y) {
  check_dimensions(g, x, "input vector");
  check_dimensions(g, y, "output vector");
  const auto rows = g.row_offsets();
  const auto cols = g.neighbor_indices();
  const auto vals = g.neighbor_weights();
  const auto deg = g.degrees();
  parallel_for(g.node_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double sum = 0.0;
      for (std::size_t p = rows[i]; p < rows[i + 1]; ++p) sum += vals[p] * x[cols[p]];
      y[i] = deg[i] * x[i] - sum;
    }
  });
}

std::vector<double> laplacian_apply(const Graph& g, std::span<const double> x) {
  std::vector<double> y(g.node_count());
  laplacian_apply(g, x, y);
  return y;
}

void IncidenceView::apply(std::span<const double> x, std::span<double> out) const {
  check_dimensions(*g_, x, "input vector");
  if (out.size() != rows()) throw InputError("incidence output size mismatch");
  const auto edges = g_->edges();
  for (std::size_t e = 0; e < edges.size(); ++e) out[e] = x[edges[e].u] - x[edges[e].v];
}

void IncidenceView::apply_transpose(std::span<const double> y, std::span<double> out) const {
  if (y.size() != rows()) throw InputError("incidence input size mismatch");
  check_dimensions(*g_, out, "output vector");
  std::fill(out.begin(), out.end(), 0.0);
  const auto edges = g_->edges();
  for (std::size_t e = 0; e < edges.size(); ++e) {
    out[edges[e].u] += y[e];
    out[edges[e].v] -= y[e];
  }
}

void IncidenceView::compose_laplacian(std::span<const double> x, std::span<double> out) const {
  std::vector<double> bx(rows());
  apply(x, bx);
  const auto edges = g_->edges();
  for (std::size_t e = 0; e < edges.size(); ++e) bx[e] *= edges[e].w;
  apply_transpose(bx, out);
}

double IncidenceView::weighted_norm_squared(std::span<const double> x) const {
  check_dimensions(*g_, x, "input vector");
  double sum = 0.0;
  for (const Edge& e : g_->edges()) {
    const double diff = x[e.u] - x[e.v];
    sum += e.w * diff * diff;
  }
  return sum;
}

StubbornnessVector::StubbornnessVector(std::vector<double> k) : k_(std::move(k)) {
  if (k_.empty()) throw InputError("stubbornness vector is empty");
  k_min_ = k_.front();
  k_max_ = k_.front();
  for (std::size_t i = 0; i < k_.size(); ++i) {
    const double v = k_[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InputError("stubbornness must be positive and finite, got " + std::to_string(v) +
                       " at index " + std::to_string(i));
    }
    k_min_ = std::min(k_min_, v);
    k_max_ = std::max(k_max_, v);
    total_ += v;
  }
}

StubbornnessVector StubbornnessVector::uniform(std::size_t n, double value) {
  return StubbornnessVector(std::vector<double>(n, value));
}

SpectrumBounds eigen_bounds(const Graph& g, const StubbornnessVector& k) {
  check_dimensions(g, k);
  SpectrumBounds b;
  b.lower = k.k_min();
  b.upper = k.k_max() + 2.0 * g.d_max();
  b.coarse_upper = k.k_max() + static_cast<double>(g.node_count()) * g.w_max();
  return b;
}

}  // namespace fjs

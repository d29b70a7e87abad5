#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fjs/graph.hpp"

namespace fjs {

// Edge list: one edge per line, `u v [w]`, weight defaulting to 1.0. Lines
// whose first non-blank character is `#` or `%` are comments (SNAP and
// Koblenz headers). A line with a single id declares an isolated node.
// Columns after the weight are ignored.
Graph parse_edge_list(std::istream& in, const std::string& source = "<stream>");
Graph read_edge_list(const std::filesystem::path& path);

// `node k` per line; every graph node must be listed exactly once.
StubbornnessVector parse_stubbornness(std::istream& in, const Graph& g,
                                      const std::string& source = "<stream>");
StubbornnessVector read_stubbornness(const std::filesystem::path& path, const Graph& g);

// `node value` per line with value in [-1, 1]; every graph node exactly once.
std::vector<double> parse_opinions(std::istream& in, const Graph& g,
                                   const std::string& source = "<stream>");
std::vector<double> read_opinions(const std::filesystem::path& path, const Graph& g);

// Writes `id value` lines using the id table of g (or 0..n-1 when g is null).
void write_node_values(std::ostream& out, std::span<const NodeId> ids,
                       std::span<const double> values);

}  // namespace fjs

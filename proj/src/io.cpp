#include "fjs/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <string_view>

#include "fjs/error.hpp"

namespace fjs {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

bool is_comment_or_blank(const std::vector<std::string_view>& fields) {
  return fields.empty() || fields.front().front() == '#' || fields.front().front() == '%';
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

NodeId parse_id(std::string_view token, const std::string& source, std::size_t line) {
  NodeId value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InputError(where(source, line) + ": invalid node id '" + std::string(token) + "'");
  }
  return value;
}

double parse_real(std::string_view token, const std::string& source, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw InputError(where(source, line) + ": invalid number '" + std::string(token) + "'");
  }
  return value;
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open file: " + path.string());
  return in;
}

// Reads `node value` lines into a dense per-index vector.
std::vector<double> parse_node_values(std::istream& in, const Graph& g,
                                      const std::string& source, const char* what) {
  const std::size_t n = g.node_count();
  std::vector<double> values(n, 0.0);
  std::vector<bool> seen(n, false);
  std::size_t count = 0;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto fields = split_fields(line);
    if (is_comment_or_blank(fields)) continue;
    if (fields.size() < 2) {
      throw InputError(where(source, lineno) + ": expected `node " + what + "`");
    }
    const NodeId id = parse_id(fields[0], source, lineno);
    const std::size_t idx = g.index_of(id);
    if (idx == n) {
      throw InputError(where(source, lineno) + ": node " + std::to_string(id) +
                       " is not in the graph");
    }
    if (seen[idx]) {
      throw InputError(where(source, lineno) + ": node " + std::to_string(id) +
                       " listed twice");
    }
    seen[idx] = true;
    values[idx] = parse_real(fields[1], source, lineno);
    ++count;
  }
  if (count != n) {
    throw InputError(source + ": " + std::to_string(count) + " of " + std::to_string(n) +
                     " nodes have a " + what);
  }
  return values;
}

}  // namespace

Graph parse_edge_list(std::istream& in, const std::string& source) {
  std::vector<EdgeTriple> edges;
  std::vector<NodeId> declared;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const auto fields = split_fields(line);
    if (is_comment_or_blank(fields)) continue;
    if (fields.size() == 1) {
      declared.push_back(parse_id(fields[0], source, lineno));
      continue;
    }
    EdgeTriple t;
    t.u = parse_id(fields[0], source, lineno);
    t.v = parse_id(fields[1], source, lineno);
    t.w = fields.size() >= 3 ? parse_real(fields[2], source, lineno) : 1.0;
    t.line = lineno;
    if (!(t.w > 0.0) || !std::isfinite(t.w)) {
      throw InputError(where(source, lineno) + ": edge weight must be positive and finite, got '" +
                       std::string(fields[2]) + "'");
    }
    edges.push_back(t);
  }
  if (edges.empty() && declared.empty()) {
    throw InputError(source + ": no edges or nodes found");
  }
  return Graph::build(edges, declared);
}

Graph read_edge_list(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse_edge_list(in, path.string());
}

StubbornnessVector parse_stubbornness(std::istream& in, const Graph& g,
                                      const std::string& source) {
  auto values = parse_node_values(in, g, source, "stubbornness");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
      throw InputError(source + ": stubbornness of node " + std::to_string(g.node_id(i)) +
                       " must be positive and finite");
    }
  }
  return StubbornnessVector(std::move(values));
}

StubbornnessVector read_stubbornness(const std::filesystem::path& path, const Graph& g) {
  auto in = open_or_throw(path);
  return parse_stubbornness(in, g, path.string());
}

std::vector<double> parse_opinions(std::istream& in, const Graph& g, const std::string& source) {
  auto values = parse_node_values(in, g, source, "opinion");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= -1.0 && values[i] <= 1.0)) {
      throw InputError(source + ": opinion of node " + std::to_string(g.node_id(i)) +
                       " is outside [-1, 1]");
    }
  }
  return values;
}

std::vector<double> read_opinions(const std::filesystem::path& path, const Graph& g) {
  auto in = open_or_throw(path);
  return parse_opinions(in, g, path.string());
}

void write_node_values(std::ostream& out, std::span<const NodeId> ids,
                       std::span<const double> values) {
  const auto old_precision = out.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const NodeId id = ids.empty() ? static_cast<NodeId>(i) : ids[i];
    out << id << ' ' << values[i] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fjs

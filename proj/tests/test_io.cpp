#include <doctest.h>

#include <functional>
#include <sstream>

#include "fjs/error.hpp"
#include "fjs/io.hpp"

using namespace fjs;

namespace {

Graph parse(const std::string& text) {
  std::istringstream in(text);
  return parse_edge_list(in, "mem");
}

bool message_contains(const std::function<void()>& f, const std::string& needle) {
  try {
    f();
  } catch (const InputError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("edge list comments, default weights and extra columns") {
  const Graph g = parse(
      "# SNAP style header\n"
      "% Koblenz style header\n"
      "\n"
      "1 2\n"
      "2\t3 2.5\n"
      "3 4 1.5 1234567890\n");
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 3);
  CHECK(g.edges()[0].w == 1.0);
  CHECK(g.edges()[1].w == 2.5);
  CHECK(g.edges()[2].w == 1.5);
}

TEST_CASE("single token lines declare isolated nodes") {
  const Graph g = parse("1 2\n7\n");
  CHECK(g.node_count() == 3);
  CHECK(g.node_id(2) == 7);
  CHECK(g.degrees()[2] == 0.0);
  const Graph lone = parse("42\n");
  CHECK(lone.node_count() == 1);
  CHECK(lone.edge_count() == 0);
}

TEST_CASE("malformed edge lists name the line") {
  CHECK(message_contains([] { parse("1 2\n2 3 -1\n"); }, "mem:2"));
  CHECK(message_contains([] { parse("1 2\n2 3 0\n"); }, "mem:2"));
  CHECK(message_contains([] { parse("1 2\n2 x\n"); }, "mem:2"));
  CHECK(message_contains([] { parse("1 2 abc\n"); }, "mem:1"));
  CHECK(message_contains([] { parse("1 2 nan\n"); }, "mem:1"));
  CHECK_THROWS_AS(parse("# nothing here\n"), InputError);
  CHECK_THROWS_AS(parse(""), InputError);
}

TEST_CASE("missing files are input errors") {
  CHECK(message_contains([] { read_edge_list("/nonexistent/graph.txt"); }, "cannot open"));
}

TEST_CASE("stubbornness files cover every node exactly once") {
  const Graph g = parse("10 20\n20 30\n");
  {
    std::istringstream in("30 3\n10 1\n20 2\n");
    const auto k = parse_stubbornness(in, g, "k");
    CHECK(k[0] == 1.0);
    CHECK(k[1] == 2.0);
    CHECK(k[2] == 3.0);
  }
  {
    std::istringstream in("10 1\n20 2\n");
    CHECK_THROWS_AS(parse_stubbornness(in, g, "k"), InputError);
  }
  {
    std::istringstream in("10 1\n20 2\n20 2\n30 1\n");
    CHECK_THROWS_AS(parse_stubbornness(in, g, "k"), InputError);
  }
  {
    std::istringstream in("10 1\n20 2\n99 1\n");
    CHECK_THROWS_AS(parse_stubbornness(in, g, "k"), InputError);
  }
  {
    std::istringstream in("10 1\n20 0\n30 1\n");
    CHECK_THROWS_AS(parse_stubbornness(in, g, "k"), InputError);
  }
}

TEST_CASE("opinions must lie in [-1, 1]") {
  const Graph g = parse("1 2\n");
  {
    std::istringstream in("1 -1\n2 1\n");
    const auto s = parse_opinions(in, g, "s");
    CHECK(s == std::vector<double>{-1.0, 1.0});
  }
  {
    std::istringstream in("1 -1.5\n2 1\n");
    CHECK_THROWS_AS(parse_opinions(in, g, "s"), InputError);
  }
}

TEST_CASE("node values round-trip through text") {
  const Graph g = parse("5 9\n");
  const std::vector<double> v{0.1, -1.0 / 3.0};
  std::ostringstream out;
  write_node_values(out, g.node_ids(), v);
  std::istringstream in(out.str());
  const auto back = parse_opinions(in, g, "roundtrip");
  CHECK(back == v);
}

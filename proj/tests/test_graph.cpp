#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gradalign/graph.hpp"
#include "gradalign/graph_io.hpp"
#include "gradalign/synthetic.hpp"

using namespace gradalign;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  auto dir = fs::temp_directory_path() / "gradalign_graph_tests";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  out << content;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("build collapses duplicate edges and rejects self-loops") {
  Graph g = Graph::build(2, {{0, 1}, {1, 0}});
  CHECK(g.edge_count() == 1);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
  CHECK_THROWS_AS(Graph::build(2, {{0, 0}}), ContractError);
  CHECK_THROWS_AS(Graph::build(2, {{0, 2}}), ContractError);
}

TEST_CASE("load_graph defaults attributes to all-ones") {
  auto dir = temp_dir();
  write_file(dir / "ab.edges", "a b\nb c\n");
  Graph g = load_graph((dir / "ab.edges").string());
  REQUIRE(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.attribute_dim() == 1);
  CHECK(g.attributes() == Eigen::MatrixXd::Ones(3, 1));
  CHECK(g.label(0) == "a");
  CHECK(g.index_of("c") == 2);
}

TEST_CASE("load_graph drops self-loops with a count and collapses duplicates") {
  auto dir = temp_dir();
  write_file(dir / "loops.edges", "# comment\n0 1\n1 0\n2 2\n\n1 2\n");
  LoadStats stats;
  Graph g = load_graph((dir / "loops.edges").string(), "", &stats);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(stats.self_loops_dropped == 1);
  CHECK(stats.duplicate_edges == 1);
}

TEST_CASE("load_graph reports malformed lines with their number") {
  auto dir = temp_dir();
  write_file(dir / "bad.edges", "0 1\n0 1 2\n");
  try {
    load_graph((dir / "bad.edges").string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("attribute file round-trips exact values and adds isolated nodes") {
  auto dir = temp_dir();
  write_file(dir / "five.edges", "n0 n1\nn1 n2\nn2 n3\nn3 n4\n");
  const std::string attrs =
      "n0 0.125 -3.5 0.1\n"
      "n1 1 2 3\n"
      "n2 -0.3333333333333333 0 1e-8\n"
      "n3 4 5 6.000000000000001\n"
      "n4 0 0 0\n";
  write_file(dir / "five.attrs", attrs);
  Graph g = load_graph((dir / "five.edges").string(), (dir / "five.attrs").string());
  REQUIRE(g.node_count() == 5);
  REQUIRE(g.attribute_dim() == 3);
  CHECK(g.attributes()(0, 0) == 0.125);
  CHECK(g.attributes()(2, 0) == -0.3333333333333333);
  CHECK(g.attributes()(3, 2) == 6.000000000000001);

  // byte-level fixture round trip through save_attributes
  save_attributes(g, (dir / "five.out.attrs").string());
  Graph g2 = load_graph((dir / "five.edges").string(),
                        (dir / "five.out.attrs").string());
  CHECK(g2.attributes() == g.attributes());

  write_file(dir / "extra.attrs", attrs + "n5 7 8 9\n");
  Graph g3 = load_graph((dir / "five.edges").string(), (dir / "extra.attrs").string());
  CHECK(g3.node_count() == 6);  // n5 isolated
  CHECK(g3.degree(5) == 0);

  write_file(dir / "short.attrs", "n0 1 2 3\n");
  CHECK_THROWS_AS(
      load_graph((dir / "five.edges").string(), (dir / "short.attrs").string()),
      ConsistencyError);
  write_file(dir / "ragged.attrs", attrs + "n5 7 8\n");
  CHECK_THROWS_AS(
      load_graph((dir / "five.edges").string(), (dir / "ragged.attrs").string()),
      ParseError);
}

TEST_CASE("serialization is a fixed point of load") {
  auto dir = temp_dir();
  write_file(dir / "mixed.edges", "x q\nq z\nz x\nw q\n");
  Graph g = load_graph((dir / "mixed.edges").string());
  save_edge_list(g, (dir / "mixed.r1.edges").string());
  Graph g1 = load_graph((dir / "mixed.r1.edges").string());
  save_edge_list(g1, (dir / "mixed.r2.edges").string());
  CHECK(read_file(dir / "mixed.r1.edges") == read_file(dir / "mixed.r2.edges"));
  CHECK(g1.edge_count() == g.edge_count());
}

TEST_CASE("neighbors matches an adjacency-matrix row scan") {
  Graph path = Graph::build(3, {{0, 1}, {1, 2}});
  CHECK(path.neighbors(1) == std::vector<int>{0, 2});
  CHECK(Graph::build(2, {}).neighbors(0).empty());
  CHECK_THROWS_AS(path.neighbors(3), ContractError);

  Graph g = erdos_renyi(20, 0.2, 99);
  Eigen::MatrixXd a = g.adjacency_matrix();
  for (int u = 0; u < 20; ++u) {
    std::vector<int> brute;
    for (int v = 0; v < 20; ++v)
      if (a(u, v) != 0.0) brute.push_back(v);
    CHECK(g.neighbors(u) == brute);
    CHECK(!std::binary_search(g.neighbors(u).begin(), g.neighbors(u).end(), u));
  }
}

TEST_CASE("ground truth files resolve tokens in both graphs") {
  auto dir = temp_dir();
  write_file(dir / "s.edges", "a b\nb c\n");
  write_file(dir / "t.edges", "x y\ny z\n");
  write_file(dir / "gt.txt", "a x\nb y\nc z\n");
  Graph s = load_graph((dir / "s.edges").string());
  Graph t = load_graph((dir / "t.edges").string());
  GroundTruth gt = load_ground_truth((dir / "gt.txt").string(), s, t);
  REQUIRE(gt.size() == 3);
  CHECK(gt.pairs[0] == std::pair<int, int>{0, 0});

  save_ground_truth(gt, s, t, (dir / "gt.out.txt").string());
  GroundTruth gt2 = load_ground_truth((dir / "gt.out.txt").string(), s, t);
  CHECK(gt2.pairs == gt.pairs);

  write_file(dir / "gt.dup.txt", "a x\na y\n");
  CHECK_THROWS_AS(load_ground_truth((dir / "gt.dup.txt").string(), s, t),
                  ContractError);
}

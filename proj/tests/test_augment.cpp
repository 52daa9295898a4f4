#include <catch2/catch_amalgamated.hpp>

#include <limits>

#include "gradalign/matcher.hpp"
#include "gradalign/metrics.hpp"
#include "gradalign/synthetic.hpp"

using namespace gradalign;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Counterpart networks where the source has edge (A,B) but the target is
// missing (a,b): ids A=0, B=1, C=2 / a=0, b=1, c=2.
struct MissingEdge {
  Graph source = Graph::build(3, {{0, 1}, {1, 2}});
  Graph target = Graph::build(3, {{1, 2}});
  NodeMapping mapping{3, 3};
};

}  // namespace

TEST_CASE("candidate edges are counterparts missing on one side") {
  MissingEdge fx;
  fx.mapping.add(0, 0, 0);
  fx.mapping.add(1, 1, 0);
  AugmentState state(fx.source, fx.target, 0.5);
  CandidateEdges cand = candidate_edges(state, fx.mapping);
  CHECK(cand.target == std::vector<std::pair<int, int>>{{0, 1}});
  CHECK(cand.source.empty());

  // empty mapping: nothing is potentially confident
  NodeMapping none(3, 3);
  CandidateEdges empty = candidate_edges(state, none);
  CHECK(empty.source.empty());
  CHECK(empty.target.empty());
}

TEST_CASE("candidates match an exhaustive pair-scan oracle") {
  Graph g_s = erdos_renyi(12, 0.3, 201);
  Graph g_t = erdos_renyi(12, 0.3, 202);
  NodeMapping mapping(12, 12);
  Rng rng(203);
  auto src = rng.permutation(12), dst = rng.permutation(12);
  for (int i = 0; i < 8; ++i) mapping.add(src[i], dst[i], i);
  AugmentState state(g_s, g_t, 0.5);
  CandidateEdges cand = candidate_edges(state, mapping);

  std::vector<std::pair<int, int>> expect_s, expect_t;
  for (int u1 = 0; u1 < 12; ++u1)
    for (int u2 = u1 + 1; u2 < 12; ++u2) {
      if (!mapping.has_source(u1) || !mapping.has_source(u2)) continue;
      const int v1 = mapping.target_of(u1), v2 = mapping.target_of(u2);
      if (!g_s.has_edge(u1, u2) && g_t.has_edge(v1, v2))
        expect_s.emplace_back(u1, u2);
      if (g_s.has_edge(u1, u2) && !g_t.has_edge(v1, v2))
        expect_t.emplace_back(std::min(v1, v2), std::max(v1, v2));
    }
  std::sort(expect_t.begin(), expect_t.end());
  CHECK(cand.source == expect_s);
  CHECK(cand.target == expect_t);
}

TEST_CASE("augmentation adds an edge only when both endpoints are confident") {
  MissingEdge fx;
  fx.mapping.add(0, 0, 0);
  fx.mapping.add(1, 1, 0);

  SECTION("both endpoints above tau: the missing counterpart appears") {
    AugmentState state(fx.source, fx.target, 0.5);
    Eigen::MatrixXd fused = Eigen::MatrixXd::Zero(3, 3);
    fused(0, 0) = 0.9;  // S(A, a)
    fused(1, 1) = 0.8;  // S(B, b)
    const int added = augment(state, fx.mapping, fused, 1);
    CHECK(added == 1);
    CHECK(state.target.has_edge(0, 1));
    REQUIRE(state.added.size() == 1);
    CHECK(state.added[0].graph == 't');
    CHECK(state.added[0].iteration == 1);
    CHECK(!state.source.has_edge(0, 2));  // untouched elsewhere
  }
  SECTION("one endpoint at or below tau blocks the addition") {
    AugmentState state(fx.source, fx.target, 0.5);
    Eigen::MatrixXd fused = Eigen::MatrixXd::Zero(3, 3);
    fused(0, 0) = 0.9;
    fused(1, 1) = 0.5;  // not strictly above
    CHECK(augment(state, fx.mapping, fused, 1) == 0);
    CHECK(!state.target.has_edge(0, 1));
    CHECK(state.added.empty());
  }
  SECTION("infinite tau never adds") {
    AugmentState state(fx.source, fx.target, kInf);
    Eigen::MatrixXd fused = Eigen::MatrixXd::Constant(3, 3, 1e9);
    CHECK(augment(state, fx.mapping, fused, 1) == 0);
    CHECK(state.target.edges() == fx.target.edges());
  }
}

TEST_CASE("tau zero with positive scores aligns the induced edge sets") {
  Graph g_s = erdos_renyi(14, 0.25, 205);
  Graph g_t = erdos_renyi(14, 0.25, 206);
  NodeMapping mapping(14, 14);
  for (int i = 0; i < 14; ++i) mapping.add(i, i, 0);
  AugmentState state(g_s, g_t, 0.0);
  Eigen::MatrixXd fused = Eigen::MatrixXd::Constant(14, 14, 0.5);
  augment(state, mapping, fused, 1);
  // counterpart edges now agree on the aligned subgraph
  for (int u = 0; u < 14; ++u)
    for (int v = u + 1; v < 14; ++v)
      CHECK(state.source.has_edge(u, v) == state.target.has_edge(u, v));
  // and the originals are preserved
  for (auto [u, v] : g_s.edges()) CHECK(state.source.has_edge(u, v));
  for (auto [u, v] : g_t.edges()) CHECK(state.target.has_edge(u, v));
}

TEST_CASE("edge sets grow monotonically across iterations") {
  Graph g_s = erdos_renyi(10, 0.3, 207);
  Graph g_t = erdos_renyi(10, 0.3, 208);
  NodeMapping mapping(10, 10);
  for (int i = 0; i < 10; ++i) mapping.add(i, i, 0);
  AugmentState state(g_s, g_t, 0.0);
  Eigen::MatrixXd fused = Eigen::MatrixXd::Constant(10, 10, 1.0);
  int prev_s = state.source.edge_count(), prev_t = state.target.edge_count();
  for (int it = 1; it <= 3; ++it) {
    augment(state, mapping, fused, it);
    CHECK(state.source.edge_count() >= prev_s);
    CHECK(state.target.edge_count() >= prev_t);
    prev_s = state.source.edge_count();
    prev_t = state.target.edge_count();
  }
  // second pass has nothing left to add
  CHECK(augment(state, mapping, fused, 4) == 0);
}

TEST_CASE("align_ea with infinite tau reproduces align bitwise") {
  Graph base = erdos_renyi(40, 0.15, 210).with_attributes(random_attributes(40, 5, 211));
  NoisyCopy copy = make_noisy_copy(base, 0.1, 0.1, 212);
  auto [seeds, eval] = split_seeds(copy.truth, 0.1, 213);

  AlignConfig cfg;
  cfg.hidden_dim = 12;
  cfg.epochs = 10;
  cfg.iterations = 5;
  cfg.rng_seed = 214;
  cfg.tau = kInf;
  AlignResult plain = align(base, copy.graph, seeds, cfg);
  AlignResult ea = align_ea(base, copy.graph, seeds, cfg);
  CHECK(ea.augmented_edges.empty());
  CHECK(plain.mapping.pairs() == ea.mapping.pairs());
  CHECK(plain.final_similarity.scores == ea.final_similarity.scores);
}

TEST_CASE("zero-noise isomorphic copies never gain false edges") {
  Graph base = erdos_renyi(30, 0.15, 215).with_attributes(random_attributes(30, 5, 216));
  NoisyCopy copy = make_noisy_copy(base, 0.0, 0.0, 217);
  auto [seeds, eval] = split_seeds(copy.truth, 0.1, 218);
  AlignConfig cfg;
  cfg.hidden_dim = 12;
  cfg.epochs = 15;
  cfg.iterations = 5;
  cfg.tau = 0.7;
  AlignResult ea = align_ea(base, copy.graph, seeds, cfg);
  CHECK(accuracy(ea.mapping, copy.truth) == 1.0);
  // all-correct alignment of an isomorphic pair leaves no counterpart gaps
  CHECK(ea.augmented_edges.empty());
}

#include <catch2/catch_amalgamated.hpp>

#include "gradalign/matcher.hpp"
#include "gradalign/metrics.hpp"
#include "gradalign/synthetic.hpp"

using namespace gradalign;

namespace {

SimilarityMatrix from_values(std::initializer_list<std::initializer_list<double>> rows) {
  Eigen::MatrixXd m(rows.size(), rows.begin()->size());
  int i = 0;
  for (auto& r : rows) {
    int j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return SimilarityMatrix(std::move(m));
}

std::vector<std::pair<int, int>> picked_pairs(const SelectionResult& r) {
  std::vector<std::pair<int, int>> out;
  for (auto& p : r.picked) out.emplace_back(p.source, p.target);
  return out;
}

// exact-copy instance: identical structure, unique attributes, permuted ids
struct CopyInstance {
  Graph source, target;
  GroundTruth seeds, truth;
};

CopyInstance exact_copy_instance(int n, std::uint64_t seed) {
  Graph base = erdos_renyi(n, 0.12, seed).with_attributes(
      random_attributes(n, 6, derive_seed(seed, 9)));
  NoisyCopy copy = make_noisy_copy(base, 0.0, 0.0, derive_seed(seed, 1));
  auto [seeds, eval] = split_seeds(copy.truth, 0.1, derive_seed(seed, 2));
  return {base, copy.graph, seeds, copy.truth};
}

}  // namespace

TEST_CASE("match plan derives the per-round count from the iteration knob") {
  CHECK(MatchPlan::make(270, 15).per_round == 20);  // ceil(270/14)
  CHECK(MatchPlan::make(271, 15).per_round == 20);
  CHECK(MatchPlan::make(281, 15).per_round == 21);
  CHECK(MatchPlan::make(10, 2).per_round == 10);
  CHECK(MatchPlan::make(10, 1).per_round == 10);  // single shot
  CHECK(MatchPlan::make(0, 15).per_round == 0);
  CHECK_THROWS_AS(MatchPlan::make(-1, 5), ContractError);
}

TEST_CASE("greedy selection kills rows and columns as it picks") {
  SECTION("diagonal dominance") {
    SimilarityMatrix sim = from_values({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    auto r = select_top_n(sim, 3);
    CHECK(picked_pairs(r) ==
          std::vector<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 2}});
    CHECK(!r.shortfall);
  }
  SECTION("greedy takes 5 then 3") {
    SimilarityMatrix sim = from_values({{5, 1}, {4, 3}});
    auto r = select_top_n(sim, 2);
    CHECK(picked_pairs(r) == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  }
  SECTION("all-equal scores break ties lexicographically") {
    SimilarityMatrix sim = from_values({{2, 2}, {2, 2}});
    auto r = select_top_n(sim, 2);
    CHECK(picked_pairs(r) == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  }
  SECTION("insufficient live cells flags a shortfall") {
    SimilarityMatrix sim = from_values({{1, 2}, {3, 4}});
    sim.row_alive[0] = 0;
    auto r = select_top_n(sim, 2);
    CHECK(r.picked.size() == 1);
    CHECK(r.shortfall);
  }
}

TEST_CASE("zero-fused cells fall back to the secondary ordering") {
  SECTION("all-zero fused follows the embedding scores") {
    SimilarityMatrix sim = from_values({{0, 0}, {0, 0}});
    Eigen::MatrixXd emb(2, 2);
    emb << 2, 1, 1, 2;
    auto r = select_top_n(sim, 2, &emb);
    CHECK(picked_pairs(r) == std::vector<std::pair<int, int>>{{0, 0}, {1, 1}});
  }
  SECTION("a positive fused cell outranks any zero cell") {
    SimilarityMatrix sim = from_values({{0, 0.01}, {0, 0}});
    Eigen::MatrixXd emb(2, 2);
    emb << 100, 0, 100, 100;
    auto r = select_top_n(sim, 1, &emb);
    CHECK(picked_pairs(r) == std::vector<std::pair<int, int>>{{0, 1}});
  }
  SECTION("mixed matrix matches an explicit two-key sort oracle") {
    SimilarityMatrix sim = from_values({{0, 0.5, 0}, {0.2, 0, 0}, {0, 0, 0}});
    Eigen::MatrixXd emb(3, 3);
    emb << 9, 1, 4, 1, 8, 2, 7, 3, 5;
    auto ranked = rank_cells(sim, &emb);
    // oracle: sort (positive desc by fused, then zero desc by emb), ties (u,v)
    std::vector<std::tuple<int, double, int, int>> key;
    for (int u = 0; u < 3; ++u)
      for (int v = 0; v < 3; ++v) {
        const double fused = sim.scores(u, v);
        key.emplace_back(fused > 0 ? 0 : 1, fused > 0 ? -fused : -emb(u, v), u, v);
      }
    std::sort(key.begin(), key.end());
    REQUIRE(ranked.size() == key.size());
    for (std::size_t i = 0; i < key.size(); ++i) {
      CHECK(ranked[i].source == std::get<2>(key[i]));
      CHECK(ranked[i].target == std::get<3>(key[i]));
    }
  }
}

TEST_CASE("exact copy with unique attributes is recovered perfectly") {
  CopyInstance inst = exact_copy_instance(60, 2024);
  AlignConfig cfg;
  cfg.hidden_dim = 24;
  cfg.epochs = 30;
  cfg.iterations = 5;
  cfg.rng_seed = 1;
  AlignResult result = align(inst.source, inst.target, inst.seeds, cfg);
  CHECK(accuracy(result.mapping, inst.truth) == 1.0);
  CHECK(result.mapping.size() == 60);
  CHECK(!result.shortfall);
}

TEST_CASE("returned mapping is an injection containing every seed") {
  CopyInstance inst = exact_copy_instance(40, 77);
  AlignConfig cfg;
  cfg.hidden_dim = 12;
  cfg.epochs = 10;
  cfg.iterations = 4;
  cfg.pair_budget = 20;
  AlignResult result = align(inst.source, inst.target, inst.seeds, cfg);
  CHECK(result.mapping.size() == inst.seeds.size() + 20);
  std::vector<char> used(40, 0);
  for (auto [s, t, origin] : result.mapping.pairs()) {
    CHECK(!used[t]);
    used[t] = 1;
  }
  for (auto [s, t] : inst.seeds.pairs) {
    CHECK(result.mapping.target_of(s) == t);
    CHECK(result.mapping.is_seed(s));
  }
  // discovered pairs carry the iteration that found them
  int max_origin = 0;
  for (auto [s, t, origin] : result.mapping.pairs())
    max_origin = std::max(max_origin, origin);
  CHECK(max_origin >= 1);
  CHECK(max_origin <= result.rounds);
}

TEST_CASE("zero pair budget returns the seeds untouched") {
  CopyInstance inst = exact_copy_instance(30, 5);
  AlignConfig cfg;
  cfg.hidden_dim = 8;
  cfg.epochs = 5;
  cfg.pair_budget = 0;
  AlignResult result = align(inst.source, inst.target, inst.seeds, cfg);
  CHECK(result.mapping.size() == inst.seeds.size());
  AlignConfig bad = cfg;
  bad.pair_budget = 31;
  CHECK_THROWS_AS(align(inst.source, inst.target, inst.seeds, bad), ContractError);
}

TEST_CASE("single-iteration variant equals one-shot selection") {
  CopyInstance inst = exact_copy_instance(30, 6);
  AlignConfig cfg;
  cfg.hidden_dim = 8;
  cfg.epochs = 10;
  cfg.iterations = 1;
  AlignResult one_shot = align(inst.source, inst.target, inst.seeds, cfg);

  AlignConfig ab = cfg;
  ab.iterations = 15;  // ablation-1 overrides it back to one round
  ab.variant = Variant::ablation_1;
  AlignResult ablation = align(inst.source, inst.target, inst.seeds, ab);
  CHECK(one_shot.mapping.pairs() == ablation.mapping.pairs());
  CHECK(one_shot.final_similarity.scores == ablation.final_similarity.scores);
  CHECK(one_shot.rounds == 1);
}

TEST_CASE("empty seeds bootstrap from the embedding similarity alone") {
  CopyInstance inst = exact_copy_instance(24, 8);
  GroundTruth no_seeds;
  AlignConfig cfg;
  cfg.hidden_dim = 8;
  cfg.epochs = 10;
  cfg.iterations = 1;  // the bootstrap round is everything
  AlignResult result = align(inst.source, inst.target, no_seeds, cfg);
  CHECK(result.mapping.size() == 24);

  // the same selection replayed directly from S_emb
  LayerStack hs = forward(inst.source, result.params, cfg.aggregator);
  LayerStack ht = forward(inst.target, result.params, cfg.aggregator);
  SimilarityMatrix emb = embedding_similarity(hs, ht, true);
  auto expected = select_top_n(emb, 24, &emb.scores);
  for (std::size_t i = 0; i < expected.picked.size(); ++i) {
    auto [s, t, origin] = result.mapping.pairs()[i];
    CHECK(result.mapping.target_of(expected.picked[i].source) ==
          expected.picked[i].target);
  }
}

TEST_CASE("alignment is deterministic end to end") {
  CopyInstance inst = exact_copy_instance(36, 9);
  AlignConfig cfg;
  cfg.hidden_dim = 10;
  cfg.epochs = 12;
  cfg.iterations = 6;
  cfg.rng_seed = 99;
  AlignResult a = align(inst.source, inst.target, inst.seeds, cfg);
  AlignResult b = align(inst.source, inst.target, inst.seeds, cfg);
  CHECK(a.mapping.pairs() == b.mapping.pairs());
  CHECK(a.final_similarity.scores == b.final_similarity.scores);
}

TEST_CASE("a smaller source network is handled by internal reorientation") {
  // target larger than source: alpha still resolves to small/large
  Graph small = erdos_renyi(15, 0.2, 31).with_attributes(random_attributes(15, 4, 32));
  NoisyCopy big_copy = make_noisy_copy(erdos_renyi(20, 0.2, 33), 0.0, 0.0, 34);
  Graph big = big_copy.graph.with_attributes(random_attributes(20, 4, 35));
  GroundTruth seeds;
  seeds.pairs = {{0, 3}, {5, 7}};
  AlignConfig cfg;
  cfg.hidden_dim = 8;
  cfg.epochs = 5;
  cfg.iterations = 3;
  AlignResult r = align(small, big, seeds, cfg);
  CHECK(r.resolved_alpha == Catch::Approx(15.0 / 20.0));
  CHECK(r.final_similarity.rows() == 15);
  CHECK(r.final_similarity.cols() == 20);
  CHECK(r.mapping.size() == 15);  // capacity-limited budget
  CHECK(r.mapping.target_of(0) == 3);
  CHECK(r.mapping.is_seed(0));
}

TEST_CASE("masked cells never resurface across iterations") {
  CopyInstance inst = exact_copy_instance(30, 12);
  AlignConfig cfg;
  cfg.hidden_dim = 8;
  cfg.epochs = 8;
  cfg.iterations = 5;
  AlignResult r = align(inst.source, inst.target, inst.seeds, cfg);
  // final masks: everything aligned is dead
  for (auto [s, t, origin] : r.mapping.pairs()) {
    CHECK(r.final_similarity.row_alive[s] == 0);
    CHECK(r.final_similarity.col_alive[t] == 0);
  }
}

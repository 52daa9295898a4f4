#pragma once

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "gradalign/augment.hpp"
#include "gradalign/config.hpp"
#include "gradalign/encoder.hpp"
#include "gradalign/graph.hpp"
#include "gradalign/similarity.hpp"

namespace gradalign {

/// How a pair budget is spread over matching iterations: N pairs per round
/// with N = ceil(P / (iter - 1)); the last round may align fewer. A single
/// iteration aligns everything at once.
struct MatchPlan {
  int pair_budget = 0;
  int iterations = 1;
  int per_round = 0;

  static MatchPlan make(int pair_budget, int iterations) {
    detail::require(pair_budget >= 0, "pair budget must be >= 0");
    detail::require(iterations >= 1, "iteration count must be >= 1");
    MatchPlan plan{pair_budget, iterations, pair_budget};
    if (iterations >= 2)
      plan.per_round = (pair_budget + iterations - 2) / (iterations - 1);
    return plan;
  }
};

struct RankedCell {
  int source, target;
  double score;      // primary (fused) score
  bool positive;     // primary score > 0
};

/// Priority order of live cells: cells with positive primary score first,
/// ranked by that score; zero-or-below cells after them, ranked by the
/// secondary matrix when given (the embedding-similarity fallback tier) and
/// otherwise left in index order. All ties break by (row, col) ascending.
inline std::vector<RankedCell> rank_cells(const SimilarityMatrix& sim,
                                          const Eigen::MatrixXd* secondary) {
  detail::require(!secondary || (secondary->rows() == sim.rows() &&
                                 secondary->cols() == sim.cols()),
                  "secondary matrix shape disagrees");
  std::vector<RankedCell> cells;
  cells.reserve(static_cast<std::size_t>(sim.rows()) * sim.cols());
  std::vector<double> keys;
  keys.reserve(cells.capacity());
  for (int u = 0; u < sim.rows(); ++u) {
    if (!sim.row_alive[u]) continue;
    for (int v = 0; v < sim.cols(); ++v) {
      if (!sim.col_alive[v]) continue;
      const double score = sim.scores(u, v);
      const bool positive = score > 0.0;
      cells.push_back({u, v, score, positive});
      keys.push_back(positive ? score : (secondary ? (*secondary)(u, v) : 0.0));
    }
  }
  std::vector<int> order(cells.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (cells[a].positive != cells[b].positive) return cells[a].positive;
    if (keys[a] != keys[b]) return keys[a] > keys[b];
    if (cells[a].source != cells[b].source) return cells[a].source < cells[b].source;
    return cells[a].target < cells[b].target;
  });
  std::vector<RankedCell> out;
  out.reserve(cells.size());
  for (int i : order) out.push_back(cells[i]);
  return out;
}

struct Selection {
  int source, target;
  double score;
};

struct SelectionResult {
  std::vector<Selection> picked;
  bool shortfall = false;  // fewer live rows/cols than requested pairs
};

/// Greedy top-n: repeatedly take the best-ranked live cell and kill its row
/// and column (the masks are updated in place). Runs short only when the
/// live submatrix is exhausted, which the result flags.
inline SelectionResult select_top_n(SimilarityMatrix& sim, int n,
                                    const Eigen::MatrixXd* secondary = nullptr) {
  detail::require(n >= 0, "selection count must be >= 0");
  SelectionResult result;
  if (n == 0) return result;
  for (const auto& cell : rank_cells(sim, secondary)) {
    if (!sim.row_alive[cell.source] || !sim.col_alive[cell.target]) continue;
    result.picked.push_back({cell.source, cell.target, cell.score});
    sim.row_alive[cell.source] = 0;
    sim.col_alive[cell.target] = 0;
    if (static_cast<int>(result.picked.size()) == n) break;
  }
  result.shortfall = static_cast<int>(result.picked.size()) < n;
  return result;
}

struct AlignResult {
  NodeMapping mapping;
  SimilarityMatrix final_similarity;  // fused matrix after the last update
  EncoderParams params;               // trained encoder (unused by ablation-2)
  std::vector<AugmentedEdge> augmented_edges;
  TrainReport train_report;
  double resolved_alpha = 0.0;
  int rounds = 0;
  bool shortfall = false;
};

namespace detail {

inline AlignResult run_alignment(const Graph& source_in, const Graph& target_in,
                                 const GroundTruth& seeds_in, AlignConfig cfg) {
  cfg.validate();
  require(source_in.attribute_dim() == target_in.attribute_dim(),
          "graphs must share the attribute dimension");
  if (cfg.variant == Variant::ablation_1) cfg.iterations = 1;

  // The Tversky parameterization assumes n_s >= n_t; smaller-source inputs
  // are swapped here and the outputs re-oriented on the way out.
  const bool swapped = source_in.node_count() < target_in.node_count();
  const Graph& g_s = swapped ? target_in : source_in;
  const Graph& g_t = swapped ? source_in : target_in;
  GroundTruth seeds = swapped ? seeds_in.flipped() : seeds_in;
  const int ns = g_s.node_count(), nt = g_t.node_count();
  seeds.validate(ns, nt);
  const double alpha = cfg.resolve_alpha(ns, nt);

  const bool use_embedding = cfg.variant != Variant::ablation_2;
  const bool use_tversky = cfg.variant != Variant::ablation_3;
  const bool edge_augmentation = cfg.variant == Variant::grad_align_ea;

  AlignResult result;
  result.resolved_alpha = alpha;

  AugmentState state;
  const Graph* cur_s = &g_s;
  const Graph* cur_t = &g_t;
  if (edge_augmentation) {
    state = AugmentState(g_s, g_t, cfg.tau);
    cur_s = &state.source;
    cur_t = &state.target;
  }

  LayerStack stack_s, stack_t;
  SimilarityMatrix emb;
  if (use_embedding) {
    result.params = train(g_s, g_t, cfg, &result.train_report);
    stack_s = forward(g_s, result.params, cfg.aggregator);
    stack_t = forward(g_t, result.params, cfg.aggregator);
    emb = embedding_similarity(stack_s, stack_t, cfg.normalize_embeddings);
  }

  NodeMapping mapping(ns, nt);
  for (auto [s, t] : seeds.pairs) mapping.add(s, t, 0);

  const int capacity = std::min(ns, nt) - mapping.size();
  const int budget = cfg.pair_budget.value_or(capacity);
  require(budget <= capacity,
          "pair budget exceeds the number of unaligned node pairs");
  const MatchPlan plan = MatchPlan::make(budget, cfg.iterations);

  auto apply_masks = [&](SimilarityMatrix& sim) {
    for (int s = 0; s < ns; ++s) sim.row_alive[s] = !mapping.has_source(s);
    for (int t = 0; t < nt; ++t) sim.col_alive[t] = !mapping.has_target(t);
  };

  // Empty seeds bootstrap: the first-iteration matrix is S_emb itself.
  bool pure_embedding_round = !use_tversky || (use_embedding && mapping.size() == 0);
  auto rebuild = [&]() -> SimilarityMatrix {
    SimilarityMatrix sim;
    if (pure_embedding_round) {
      sim = emb;
    } else if (!use_embedding) {
      sim = tversky_similarity(*cur_s, *cur_t, mapping, alpha, cfg.beta);
    } else {
      sim = fuse(emb, tversky_similarity(*cur_s, *cur_t, mapping, alpha, cfg.beta));
    }
    apply_masks(sim);
    return sim;
  };

  SimilarityMatrix current = rebuild();
  int aligned = 0;
  int iteration = 1;
  while (aligned < budget) {
    const Eigen::MatrixXd* secondary = nullptr;
    if (use_embedding && (pure_embedding_round || cfg.zero_fallback))
      secondary = &emb.scores;

    const int want = std::min(plan.per_round, budget - aligned);
    auto selection = select_top_n(current, want, secondary);
    for (const auto& pick : selection.picked)
      mapping.add(pick.source, pick.target, iteration);
    aligned += static_cast<int>(selection.picked.size());
    result.rounds = iteration;
    if (selection.shortfall) result.shortfall = true;

    if (edge_augmentation) {
      const int added = augment(state, mapping, current.scores, iteration);
      if (added > 0 && use_embedding) {
        TrainReport refresh;
        if (cfg.ea_fine_tune)
          result.params = train_from(result.params, state.source, state.target,
                                     cfg, cfg.refresh_epochs, &refresh);
        else
          result.params = train(state.source, state.target, cfg, &refresh);
        stack_s = forward(state.source, result.params, cfg.aggregator);
        stack_t = forward(state.target, result.params, cfg.aggregator);
        emb = embedding_similarity(stack_s, stack_t, cfg.normalize_embeddings);
      }
    }

    ++iteration;
    pure_embedding_round = !use_tversky;
    current = rebuild();
    if (selection.picked.empty()) break;  // no live cells left
  }

  result.augmented_edges = std::move(state.added);
  if (swapped) {
    mapping = mapping.flipped();
    SimilarityMatrix flipped(current.scores.transpose());
    flipped.row_alive = current.col_alive;
    flipped.col_alive = current.row_alive;
    current = std::move(flipped);
    for (auto& e : result.augmented_edges) e.graph = e.graph == 's' ? 't' : 's';
  }
  result.mapping = std::move(mapping);
  result.final_similarity = std::move(current);
  return result;
}

}  // namespace detail

/// Grad-Align: trains the shared encoder once, computes the embedding
/// similarity once, then alternates top-N selection with Tversky updates
/// until the pair budget is exhausted. Returns the mapping together with
/// the final fused matrix used for Precision@q ranking.
inline AlignResult align(const Graph& source, const Graph& target,
                         const GroundTruth& seeds, const AlignConfig& cfg) {
  return detail::run_alignment(source, target, seeds, cfg);
}

/// Grad-Align-EA: same loop, but each iteration augments confident
/// counterpart edges in both networks and refreshes the encoder so the
/// embedding similarity becomes iteration-dependent.
inline AlignResult align_ea(const Graph& source, const Graph& target,
                            const GroundTruth& seeds, AlignConfig cfg) {
  cfg.variant = Variant::grad_align_ea;
  return detail::run_alignment(source, target, seeds, cfg);
}

}  // namespace gradalign

#pragma once

#include <utility>
#include <vector>

#include "gradalign/graph.hpp"
#include "gradalign/similarity.hpp"

namespace gradalign {

struct AugmentedEdge {
  int iteration;
  char graph;  // 's' or 't'
  int u, v;
};

/// Evolving edge sets of both networks during Grad-Align-EA. Edge sets only
/// grow; every addition is logged with the iteration that produced it so a
/// run can be replayed from the log.
struct AugmentState {
  Graph source;
  Graph target;
  double tau = 0.7;
  std::vector<AugmentedEdge> added;

  AugmentState() = default;
  AugmentState(Graph s, Graph t, double threshold)
      : source(std::move(s)), target(std::move(t)), tau(threshold) {}
};

struct CandidateEdges {
  std::vector<std::pair<int, int>> source;  // missing in E_s, counterpart in E_t
  std::vector<std::pair<int, int>> target;  // missing in E_t, counterpart in E_s
};

/// Potentially confident edges: pairs of aligned nodes missing from one
/// network whose counterpart edge exists in the other. Found by scanning
/// each network's edges between aligned endpoints, so the cost stays linear
/// in the edge counts.
inline CandidateEdges candidate_edges(const AugmentState& state,
                                      const NodeMapping& mapping) {
  CandidateEdges out;
  for (auto [y1, y2] : state.target.edges()) {
    const int x1 = mapping.source_of(y1), x2 = mapping.source_of(y2);
    if (x1 < 0 || x2 < 0) continue;
    if (!state.source.has_edge(x1, x2))
      out.source.emplace_back(std::min(x1, x2), std::max(x1, x2));
  }
  for (auto [x1, x2] : state.source.edges()) {
    const int y1 = mapping.target_of(x1), y2 = mapping.target_of(x2);
    if (y1 < 0 || y2 < 0) continue;
    if (!state.target.has_edge(y1, y2))
      out.target.emplace_back(std::min(y1, y2), std::max(y1, y2));
  }
  std::sort(out.source.begin(), out.source.end());
  std::sort(out.target.begin(), out.target.end());
  return out;
}

/// Adds every candidate edge whose two endpoints both have fused scores
/// above tau for their own aligned pairs, and logs the additions. Returns
/// the number of edges added across both networks.
inline int augment(AugmentState& state, const NodeMapping& mapping,
                   const Eigen::MatrixXd& fused_scores, int iteration) {
  const auto candidates = candidate_edges(state, mapping);

  auto confident_s = [&](int u) {
    return fused_scores(u, mapping.target_of(u)) > state.tau;
  };
  auto confident_t = [&](int v) {
    return fused_scores(mapping.source_of(v), v) > state.tau;
  };

  std::vector<std::pair<int, int>> add_s, add_t;
  for (auto [u1, u2] : candidates.source)
    if (confident_s(u1) && confident_s(u2)) add_s.emplace_back(u1, u2);
  for (auto [v1, v2] : candidates.target)
    if (confident_t(v1) && confident_t(v2)) add_t.emplace_back(v1, v2);

  if (!add_s.empty()) {
    auto edges = state.source.edges();
    for (auto [u1, u2] : add_s) {
      edges.emplace_back(u1, u2);
      state.added.push_back({iteration, 's', u1, u2});
    }
    state.source = Graph::build(state.source.node_count(), std::move(edges),
                                state.source.attributes(), state.source.labels());
  }
  if (!add_t.empty()) {
    auto edges = state.target.edges();
    for (auto [v1, v2] : add_t) {
      edges.emplace_back(v1, v2);
      state.added.push_back({iteration, 't', v1, v2});
    }
    state.target = Graph::build(state.target.node_count(), std::move(edges),
                                state.target.attributes(), state.target.labels());
  }
  return static_cast<int>(add_s.size() + add_t.size());
}

}  // namespace gradalign

#pragma once

#include <unordered_set>
#include <utility>
#include <vector>

#include "gradalign/graph.hpp"
#include "gradalign/rng.hpp"

namespace gradalign {

struct NoisyCopy {
  Graph graph;
  GroundTruth truth;           // pairs (base id, copy id) for every node
  std::vector<int> permutation;  // copy id of base node u
};

/// Noisy-copy generator for benchmark instances: removes
/// floor(edge_noise * |E|) edges drawn uniformly without replacement,
/// zeroes the attribute rows of floor(attr_noise * n) uniformly chosen
/// nodes, and relabels the copy by a random permutation. The returned
/// ground truth pairs every base node with its image, so the pair count
/// is preserved regardless of noise.
inline NoisyCopy make_noisy_copy(const Graph& g, double edge_noise,
                                 double attr_noise, std::uint64_t seed) {
  detail::require(edge_noise >= 0.0 && edge_noise <= 1.0,
                  "edge_noise must lie in [0,1]");
  detail::require(attr_noise >= 0.0 && attr_noise <= 1.0,
                  "attr_noise must lie in [0,1]");
  Rng rng(seed);
  const int n = g.node_count();

  auto kept = g.edges();
  rng.shuffle(kept);
  const int remove = static_cast<int>(edge_noise * g.edge_count());
  kept.resize(kept.size() - remove);

  std::vector<int> zero_order = rng.permutation(n);
  const int zero = static_cast<int>(attr_noise * n);

  std::vector<int> perm = rng.permutation(n);

  std::vector<std::pair<int, int>> copy_edges;
  copy_edges.reserve(kept.size());
  for (auto [u, v] : kept) copy_edges.emplace_back(perm[u], perm[v]);

  Eigen::MatrixXd attrs(n, g.attribute_dim());
  for (int u = 0; u < n; ++u) attrs.row(perm[u]) = g.attributes().row(u);
  for (int i = 0; i < zero; ++i) attrs.row(perm[zero_order[i]]).setZero();

  NoisyCopy out;
  out.graph = Graph::build(n, std::move(copy_edges), std::move(attrs));
  out.permutation = perm;
  out.truth.pairs.reserve(n);
  for (int u = 0; u < n; ++u) out.truth.pairs.emplace_back(u, perm[u]);
  return out;
}

/// Splits correspondences into floor(t * M) prior seeds and the evaluation
/// remainder, drawn uniformly; both halves come back sorted by source id.
inline std::pair<GroundTruth, GroundTruth> split_seeds(const GroundTruth& gt,
                                                       double t,
                                                       std::uint64_t seed) {
  detail::require(t >= 0.0 && t <= 1.0, "seed fraction must lie in [0,1]");
  Rng rng(seed);
  std::vector<int> order = rng.permutation(gt.size());
  const int k = static_cast<int>(t * gt.size());
  GroundTruth seeds, eval;
  for (int i = 0; i < gt.size(); ++i)
    (i < k ? seeds : eval).pairs.push_back(gt.pairs[order[i]]);
  std::sort(seeds.pairs.begin(), seeds.pairs.end());
  std::sort(eval.pairs.begin(), eval.pairs.end());
  return {std::move(seeds), std::move(eval)};
}

/// G(n, p): each pair independently with probability p.
inline Graph erdos_renyi(int n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng.uniform01() < p) edges.emplace_back(u, v);
  return Graph::build(n, std::move(edges));
}

/// G(n, m): exactly m distinct edges drawn uniformly.
inline Graph erdos_renyi_gnm(int n, int m, std::uint64_t seed) {
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  detail::require(m >= 0 && m <= max_edges, "edge count out of range");
  Rng rng(seed);
  std::unordered_set<long long> chosen;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(m);
  while (static_cast<int>(edges.size()) < m) {
    int u = static_cast<int>(rng.below(n));
    int v = static_cast<int>(rng.below(n));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    long long key = static_cast<long long>(u) * n + v;
    if (chosen.insert(key).second) edges.emplace_back(u, v);
  }
  return Graph::build(n, std::move(edges));
}

/// Uniform [0,1) attribute rows; with d >= 2 rows are distinct with
/// probability one, which the exact-recovery benchmarks rely on.
inline Eigen::MatrixXd random_attributes(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd a(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.uniform01();
  return a;
}

}  // namespace gradalign

#pragma once

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "gradalign/config.hpp"
#include "gradalign/graph.hpp"
#include "gradalign/similarity.hpp"

namespace gradalign {

/// Fraction of ground-truth correspondences the mapping got right. With
/// `exclude_seeds` (the default) pairs whose source node was a prior seed
/// count in neither the numerator nor the denominator. No evaluated pairs
/// (everything seeded) reads as vacuously perfect.
inline double accuracy(const NodeMapping& mapping, const GroundTruth& gt,
                       bool exclude_seeds = true) {
  detail::require(!gt.empty(), "ground truth must be nonempty");
  int correct = 0, evaluated = 0;
  for (auto [s, t] : gt.pairs) {
    detail::require(s >= 0 && s < mapping.source_size(),
                    "ground-truth source id out of range");
    if (exclude_seeds && mapping.is_seed(s)) continue;
    ++evaluated;
    if (mapping.target_of(s) == t) ++correct;
  }
  return evaluated == 0 ? 1.0 : static_cast<double>(correct) / evaluated;
}

/// Fraction of ground-truth pairs (s, t) whose target lands among the q
/// largest entries of row s of the final similarity matrix, ties broken by
/// ascending column index. Ranks raw scores; masks are ignored here.
inline double precision_at_q(const SimilarityMatrix& sim, const GroundTruth& gt,
                             int q) {
  detail::require(q >= 1, "q must be >= 1");
  detail::require(!gt.empty(), "ground truth must be nonempty");
  if (q > sim.cols()) {
    std::cerr << "warning: q = " << q << " exceeds " << sim.cols()
              << " columns; clamping\n";
    q = sim.cols();
  }
  int hits = 0;
  for (auto [s, t] : gt.pairs) {
    detail::require(s >= 0 && s < sim.rows() && t >= 0 && t < sim.cols(),
                    "ground-truth pair out of range");
    const double score = sim.scores(s, t);
    int ahead = 0;
    for (int v = 0; v < sim.cols(); ++v) {
      if (v == t) continue;
      const double other = sim.scores(s, v);
      if (other > score || (other == score && v < t)) ++ahead;
    }
    if (ahead < q) ++hits;
  }
  return static_cast<double>(hits) / gt.size();
}

/// One evaluated run: metrics, wall clock, and the resolved configuration
/// that produced them.
struct EvalReport {
  Variant variant = Variant::grad_align;
  double acc = 0.0;
  std::map<int, double> precision_at;
  double runtime_seconds = 0.0;
  std::vector<std::pair<std::string, std::string>> config_echo;
  std::uint64_t seed = 0;
};

}  // namespace gradalign

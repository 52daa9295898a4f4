#pragma once

#include <ostream>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "gradalign/encoder.hpp"
#include "gradalign/graph.hpp"

namespace gradalign {

/// Dense n_s x n_t score matrix with liveness masks. Rows and columns of
/// already-aligned nodes are masked out so ranking-based selection never
/// revisits them; scores themselves stay defined for every cell (the final
/// matrix is ranked over full rows for Precision@q).
struct SimilarityMatrix {
  Eigen::MatrixXd scores;
  std::vector<char> row_alive;
  std::vector<char> col_alive;

  SimilarityMatrix() = default;
  explicit SimilarityMatrix(Eigen::MatrixXd s)
      : scores(std::move(s)),
        row_alive(scores.rows(), 1),
        col_alive(scores.cols(), 1) {}

  int rows() const { return static_cast<int>(scores.rows()); }
  int cols() const { return static_cast<int>(scores.cols()); }
};

/// Growing partial one-to-one correspondence between source and target
/// nodes. Each entry remembers the iteration that produced it (0 = prior
/// seed); seeds can never be overwritten, and both directions stay
/// mutually consistent injections by construction.
class NodeMapping {
 public:
  NodeMapping() = default;
  NodeMapping(int n_source, int n_target)
      : forward_(n_source, -1), inverse_(n_target, -1), origin_(n_source, -1) {}

  int source_size() const { return static_cast<int>(forward_.size()); }
  int target_size() const { return static_cast<int>(inverse_.size()); }
  int size() const { return aligned_; }

  bool has_source(int s) const { return forward_[s] >= 0; }
  bool has_target(int t) const { return inverse_[t] >= 0; }
  int target_of(int s) const { return forward_[s]; }
  int source_of(int t) const { return inverse_[t]; }

  /// Iteration index that aligned source `s`; 0 for seeds, -1 if unaligned.
  int origin(int s) const { return origin_[s]; }
  bool is_seed(int s) const { return origin_[s] == 0; }

  void add(int s, int t, int origin_iteration) {
    detail::require(s >= 0 && s < source_size() && t >= 0 && t < target_size(),
                    "mapping pair out of range");
    detail::require(forward_[s] < 0 && inverse_[t] < 0,
                    "mapping must stay one-to-one");
    detail::require(origin_iteration >= 0, "origin iteration must be >= 0");
    forward_[s] = t;
    inverse_[t] = s;
    origin_[s] = origin_iteration;
    ++aligned_;
  }

  /// Aligned pairs (source, target, origin iteration), sorted by source id.
  std::vector<std::tuple<int, int, int>> pairs() const {
    std::vector<std::tuple<int, int, int>> out;
    out.reserve(aligned_);
    for (int s = 0; s < source_size(); ++s)
      if (forward_[s] >= 0) out.emplace_back(s, forward_[s], origin_[s]);
    return out;
  }

  NodeMapping flipped() const {
    NodeMapping out(target_size(), source_size());
    for (int s = 0; s < source_size(); ++s)
      if (forward_[s] >= 0) out.add(forward_[s], s, origin_[s]);
    return out;
  }

 private:
  std::vector<int> forward_;
  std::vector<int> inverse_;
  std::vector<int> origin_;
  int aligned_ = 0;
};

/// Tversky index from set cardinalities:
/// |X n Y| / (|X n Y| + alpha |X - Y| + beta |Y - X|), and 0 when the
/// denominator vanishes (two empty sets). alpha = beta = 1 is the Jaccard
/// index.
inline double tversky_score(int intersection, int only_x, int only_y,
                            double alpha, double beta) {
  const double denom = intersection + alpha * only_x + beta * only_y;
  return denom == 0.0 ? 0.0 : intersection / denom;
}

/// Multi-layer embedding similarity sum_l H_s^(l) H_t^(l)^T. With
/// `normalize` on (the default) every representation row is scaled to unit
/// Euclidean norm first (zero rows stay zero) and the summed result is
/// clamped at 0, which bounds each layer's contribution and makes the
/// fused scores comparable against the confidence threshold.
inline SimilarityMatrix embedding_similarity(const LayerStack& stack_s,
                                             const LayerStack& stack_t,
                                             bool normalize = true) {
  detail::require(stack_s.layer_count() == stack_t.layer_count(),
                  "stacks disagree on layer count");
  detail::require(stack_s.layer_count() >= 1, "empty layer stack");

  auto unit_rows = [](const Eigen::MatrixXd& h) {
    Eigen::MatrixXd out = h;
    for (int i = 0; i < out.rows(); ++i) {
      const double norm = out.row(i).norm();
      if (norm > 0.0) out.row(i) /= norm;
    }
    return out;
  };

  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(stack_s.reps[0].rows(),
                                                 stack_t.reps[0].rows());
  for (int l = 0; l < stack_s.layer_count(); ++l) {
    detail::require(stack_s.reps[l].cols() == stack_t.reps[l].cols(),
                    "stacks disagree on hidden dimension");
    if (normalize)
      scores += unit_rows(stack_s.reps[l]) * unit_rows(stack_t.reps[l]).transpose();
    else
      scores += stack_s.reps[l] * stack_t.reps[l].transpose();
  }
  if (normalize) scores = scores.cwiseMax(0.0);
  return SimilarityMatrix(std::move(scores));
}

/// Iteration-indexed Tversky similarity. For a pair (u, v):
///   T_u = images under the mapping of u's already-aligned neighbors,
///   X_u = (unaligned neighbors of u) united with T_u,  Y_v = N_t(v).
/// Unaligned source neighbors can never hit Y_v, so |X n Y| counts exactly
/// the aligned cross-network neighbor pairs and |X_u| = deg(u). The matrix
/// is assembled by accumulating, per aligned pair (x, y), one hit for every
/// (u, v) in N_s(x) x N_t(y).
inline SimilarityMatrix tversky_similarity(const Graph& g_s, const Graph& g_t,
                                           const NodeMapping& mapping,
                                           double alpha, double beta) {
  detail::require(alpha > 0.0 && beta > 0.0, "alpha and beta must be positive");
  const int ns = g_s.node_count(), nt = g_t.node_count();
  detail::require(mapping.source_size() == ns && mapping.target_size() == nt,
                  "mapping does not match the graphs");

  Eigen::MatrixXi shared = Eigen::MatrixXi::Zero(ns, nt);
  for (int x = 0; x < ns; ++x) {
    const int y = mapping.target_of(x);
    if (y < 0) continue;
    for (int u : g_s.neighbors(x))
      for (int v : g_t.neighbors(y)) shared(u, v) += 1;
  }

  Eigen::MatrixXd scores(ns, nt);
  for (int u = 0; u < ns; ++u) {
    const int deg_u = g_s.degree(u);
    for (int v = 0; v < nt; ++v) {
      const int acn = shared(u, v);
      scores(u, v) =
          tversky_score(acn, deg_u - acn, g_t.degree(v) - acn, alpha, beta);
    }
  }
  return SimilarityMatrix(std::move(scores));
}

/// Jaccard ablation: the alpha = beta = 1 special case.
inline SimilarityMatrix jaccard_similarity(const Graph& g_s, const Graph& g_t,
                                           const NodeMapping& mapping) {
  return tversky_similarity(g_s, g_t, mapping, 1.0, 1.0);
}

/// Text dump for oracle cross-checks: one line per row, space-separated
/// decimals, exact round-trip formatting.
inline void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j)
      os << (j ? " " : "") << detail::format_double(m(i, j));
    os << "\n";
  }
}

/// Element-wise product of the two perceptions; masks must agree and are
/// carried through.
inline SimilarityMatrix fuse(const SimilarityMatrix& emb,
                             const SimilarityMatrix& tve) {
  detail::require(emb.rows() == tve.rows() && emb.cols() == tve.cols(),
                  "similarity shapes disagree");
  detail::require(emb.row_alive == tve.row_alive && emb.col_alive == tve.col_alive,
                  "similarity masks disagree");
  SimilarityMatrix out(emb.scores.cwiseProduct(tve.scores));
  out.row_alive = emb.row_alive;
  out.col_alive = emb.col_alive;
  return out;
}

}  // namespace gradalign

#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gradalign/error.hpp"

namespace gradalign {

/// Undirected, unweighted, attributed graph with dense 0-based node ids.
///
/// Nodes may carry external string tokens (preserved from input files) so
/// that alignment results can be reported in the original naming. Edges are
/// stored both as sorted adjacency lists and as a canonical (u < v) edge
/// list. Instances are immutable after construction and safe to share
/// across threads.
class Graph {
 public:
  Graph() = default;

  /// Builds a graph from an explicit edge set.
  ///
  /// Duplicate edges (in either orientation) collapse to one. Self-loops are
  /// rejected; file loaders drop them before calling this. An empty
  /// `attributes` matrix defaults to the all-ones n x 1 column; empty
  /// `labels` default to decimal tokens "0".."n-1".
  static Graph build(int n, std::vector<std::pair<int, int>> edge_pairs,
                     Eigen::MatrixXd attributes = {},
                     std::vector<std::string> labels = {}) {
    detail::require(n > 0, "graph must have at least one node");
    Graph g;
    g.n_ = n;
    g.adjacency_.assign(n, {});
    for (auto& [u, v] : edge_pairs) {
      detail::require(u >= 0 && u < n && v >= 0 && v < n,
                      "edge endpoint out of range");
      detail::require(u != v, "self-loops are not allowed");
      if (u > v) std::swap(u, v);
    }
    std::sort(edge_pairs.begin(), edge_pairs.end());
    edge_pairs.erase(std::unique(edge_pairs.begin(), edge_pairs.end()),
                     edge_pairs.end());
    g.edges_ = std::move(edge_pairs);
    for (auto [u, v] : g.edges_) {
      g.adjacency_[u].push_back(v);
      g.adjacency_[v].push_back(u);
    }
    for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());

    if (attributes.size() == 0) {
      g.attributes_ = Eigen::MatrixXd::Ones(n, 1);
    } else {
      detail::require(attributes.rows() == n,
                      "attribute matrix must have one row per node");
      detail::require(attributes.cols() >= 1,
                      "attribute matrix needs at least one column");
      g.attributes_ = std::move(attributes);
    }

    if (labels.empty()) {
      labels.reserve(n);
      for (int i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    }
    detail::require(static_cast<int>(labels.size()) == n,
                    "label count must match node count");
    g.labels_ = std::move(labels);
    for (int i = 0; i < n; ++i) {
      bool fresh = g.label_index_.emplace(g.labels_[i], i).second;
      detail::require(fresh, "duplicate node label: " + g.labels_[i]);
    }
    return g;
  }

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int attribute_dim() const { return static_cast<int>(attributes_.cols()); }

  /// One-hop neighborhood of `u`, sorted ascending; never contains `u`.
  const std::vector<int>& neighbors(int u) const {
    detail::require(u >= 0 && u < n_, "node id out of range");
    return adjacency_[u];
  }

  int degree(int u) const { return static_cast<int>(neighbors(u).size()); }

  bool has_edge(int u, int v) const {
    const auto& nb = neighbors(u);
    detail::require(v >= 0 && v < n_, "node id out of range");
    return std::binary_search(nb.begin(), nb.end(), v);
  }

  /// Canonical edge list: every pair satisfies u < v, sorted ascending.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  const Eigen::MatrixXd& attributes() const { return attributes_; }

  const std::string& label(int u) const {
    detail::require(u >= 0 && u < n_, "node id out of range");
    return labels_[u];
  }
  const std::vector<std::string>& labels() const { return labels_; }

  std::optional<int> index_of(const std::string& token) const {
    auto it = label_index_.find(token);
    if (it == label_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Dense adjacency matrix (0/1, zero diagonal).
  Eigen::MatrixXd adjacency_matrix() const {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_, n_);
    for (auto [u, v] : edges_) {
      a(u, v) = 1.0;
      a(v, u) = 1.0;
    }
    return a;
  }

  /// Copy of this graph with the attribute matrix replaced.
  Graph with_attributes(Eigen::MatrixXd attributes) const {
    return build(n_, edges_, std::move(attributes), labels_);
  }

 private:
  int n_ = 0;
  std::vector<std::vector<int>> adjacency_;
  std::vector<std::pair<int, int>> edges_;
  Eigen::MatrixXd attributes_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> label_index_;
};

/// Known cross-network node correspondences (source id, target id).
struct GroundTruth {
  std::vector<std::pair<int, int>> pairs;

  int size() const { return static_cast<int>(pairs.size()); }
  bool empty() const { return pairs.empty(); }

  /// Both coordinates must be injective: no node appears twice on a side.
  void validate(int n_source, int n_target) const {
    std::vector<char> seen_s(n_source, 0), seen_t(n_target, 0);
    for (auto [s, t] : pairs) {
      detail::require(s >= 0 && s < n_source && t >= 0 && t < n_target,
                      "ground-truth pair out of range");
      detail::require(!seen_s[s] && !seen_t[t],
                      "ground-truth pairs must be one-to-one");
      seen_s[s] = seen_t[t] = 1;
    }
  }

  GroundTruth flipped() const {
    GroundTruth out;
    out.pairs.reserve(pairs.size());
    for (auto [s, t] : pairs) out.pairs.emplace_back(t, s);
    return out;
  }
};

}  // namespace gradalign

#pragma once

#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "gradalign/graph.hpp"

namespace gradalign {

struct LoadStats {
  int self_loops_dropped = 0;
  int duplicate_edges = 0;
};

namespace detail {

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

inline bool is_comment_or_blank(const std::string& line) {
  for (char c : line) {
    if (c == '#') return true;
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;  // blank
}

inline std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  return in;
}

}  // namespace detail

/// Reads an edge-list file (two whitespace-separated tokens per line,
/// `#` comment lines ignored) plus an optional attribute file (token then
/// d reals per line). Nodes get dense ids in order of first appearance;
/// nodes seen only in the attribute file become isolated. Without an
/// attribute file every node gets the all-ones vector (d = 1).
inline Graph load_graph(const std::string& edge_file,
                        const std::string& attr_file = {},
                        LoadStats* stats = nullptr) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> ids;
  auto id_of = [&](const std::string& tok) {
    auto [it, fresh] = ids.emplace(tok, static_cast<int>(labels.size()));
    if (fresh) labels.push_back(tok);
    return it->second;
  };

  LoadStats local;
  std::vector<std::pair<int, int>> edges;
  {
    auto in = detail::open_or_throw(edge_file);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::is_comment_or_blank(line)) continue;
      auto toks = detail::split_tokens(line);
      if (toks.size() != 2)
        throw ParseError(edge_file, lineno, "expected exactly two node tokens");
      int u = id_of(toks[0]);
      int v = id_of(toks[1]);
      if (u == v) {
        ++local.self_loops_dropped;
        continue;
      }
      edges.emplace_back(u, v);
    }
  }

  Eigen::MatrixXd attrs;
  if (!attr_file.empty()) {
    auto in = detail::open_or_throw(attr_file);
    std::string line;
    int lineno = 0;
    std::vector<std::pair<int, std::vector<double>>> rows;
    int dim = -1;
    while (std::getline(in, line)) {
      ++lineno;
      if (detail::is_comment_or_blank(line)) continue;
      auto toks = detail::split_tokens(line);
      if (toks.size() < 2)
        throw ParseError(attr_file, lineno, "expected node token and values");
      int u = id_of(toks[0]);
      std::vector<double> vals;
      vals.reserve(toks.size() - 1);
      for (std::size_t i = 1; i < toks.size(); ++i) {
        try {
          std::size_t pos = 0;
          vals.push_back(std::stod(toks[i], &pos));
          if (pos != toks[i].size()) throw std::invalid_argument(toks[i]);
        } catch (const std::exception&) {
          throw ParseError(attr_file, lineno, "bad numeric value '" + toks[i] + "'");
        }
      }
      if (dim == -1) dim = static_cast<int>(vals.size());
      if (static_cast<int>(vals.size()) != dim)
        throw ParseError(attr_file, lineno, "inconsistent attribute dimension");
      rows.emplace_back(u, std::move(vals));
    }
    const int n = static_cast<int>(labels.size());
    if (static_cast<int>(rows.size()) != n)
      throw ConsistencyError("attribute rows (" + std::to_string(rows.size()) +
                             ") do not cover the node set (" + std::to_string(n) + ")");
    attrs = Eigen::MatrixXd::Zero(n, dim);
    std::vector<char> seen(n, 0);
    for (auto& [u, vals] : rows) {
      if (seen[u])
        throw ConsistencyError("duplicate attribute row for node " + labels[u]);
      seen[u] = 1;
      for (int j = 0; j < dim; ++j) attrs(u, j) = vals[j];
    }
  }

  if (labels.empty()) throw ConsistencyError(edge_file + ": no nodes found");

  const int node_count = static_cast<int>(labels.size());
  const std::size_t raw = edges.size();
  Graph g = Graph::build(node_count, std::move(edges), std::move(attrs),
                         std::move(labels));
  local.duplicate_edges = static_cast<int>(raw) - g.edge_count();
  if (stats) *stats = local;
  return g;
}

/// Writes the canonical edge list: per edge the two tokens in lexicographic
/// order, lines sorted lexicographically. Loading the result and saving it
/// again reproduces the file byte for byte.
inline void save_edge_list(const Graph& g, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(g.edges().size());
  for (auto [u, v] : g.edges()) {
    const std::string &a = g.label(u), &b = g.label(v);
    lines.push_back(a <= b ? a + " " + b : b + " " + a);
  }
  std::sort(lines.begin(), lines.end());
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  for (const auto& l : lines) out << l << "\n";
}

/// Writes one attribute row per node, sorted by token.
inline void save_attributes(const Graph& g, const std::string& path) {
  std::vector<int> order(g.node_count());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return g.label(a) < g.label(b); });
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  for (int u : order) {
    out << g.label(u);
    for (int j = 0; j < g.attribute_dim(); ++j)
      out << " " << detail::format_double(g.attributes()(u, j));
    out << "\n";
  }
}

/// Ground-truth file: one `source_token target_token` pair per line.
inline GroundTruth load_ground_truth(const std::string& path,
                                     const Graph& source, const Graph& target) {
  auto in = detail::open_or_throw(path);
  GroundTruth gt;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::is_comment_or_blank(line)) continue;
    auto toks = detail::split_tokens(line);
    if (toks.size() != 2)
      throw ParseError(path, lineno, "expected source and target tokens");
    auto s = source.index_of(toks[0]);
    auto t = target.index_of(toks[1]);
    if (!s) throw ConsistencyError(path + ": unknown source node " + toks[0]);
    if (!t) throw ConsistencyError(path + ": unknown target node " + toks[1]);
    gt.pairs.emplace_back(*s, *t);
  }
  gt.validate(source.node_count(), target.node_count());
  return gt;
}

inline void save_ground_truth(const GroundTruth& gt, const Graph& source,
                              const Graph& target, const std::string& path) {
  std::vector<std::string> lines;
  lines.reserve(gt.pairs.size());
  for (auto [s, t] : gt.pairs)
    lines.push_back(source.label(s) + " " + target.label(t));
  std::sort(lines.begin(), lines.end());
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  for (const auto& l : lines) out << l << "\n";
}

}  // namespace gradalign

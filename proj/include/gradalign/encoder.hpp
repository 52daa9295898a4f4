#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gradalign/config.hpp"
#include "gradalign/graph.hpp"
#include "gradalign/rng.hpp"

namespace gradalign {

/// One shared parameter set encodes both networks; that weight sharing is
/// what makes representations of corresponding nodes coincide on isomorphic
/// inputs. GIN layers hold the two perceptron stages (w1: in x h, w2: h x h)
/// of the update MLP; GCN layers use w1 only.
struct EncoderParams {
  struct Layer {
    Eigen::MatrixXd w1;
    Eigen::MatrixXd w2;
  };

  Model model = Model::gin;
  double epsilon = 0.0;  // GIN self-weight, fixed (not trained)
  std::vector<Layer> layers;

  int layer_count() const { return static_cast<int>(layers.size()); }
  int input_dim() const { return static_cast<int>(layers.front().w1.rows()); }
  int hidden_dim() const { return static_cast<int>(layers.front().w1.cols()); }
};

using ParamGradients = std::vector<EncoderParams::Layer>;

/// Per-layer hidden representations H^(1)..H^(L) for one graph.
struct LayerStack {
  std::vector<Eigen::MatrixXd> reps;

  int layer_count() const { return static_cast<int>(reps.size()); }
};

/// Per-layer reconstruction targets: the symmetric degree normalization of
/// the aggregated matrix sum_{k<=l} (A+I)^k.
struct AggregatedAdjacency {
  std::vector<Eigen::MatrixXd> targets;

  int layer_count() const { return static_cast<int>(targets.size()); }
};

/// Glorot-uniform initialization from a caller-owned seeded stream.
inline EncoderParams init_params(Model model, int input_dim, int hidden_dim,
                                 int layer_count, Rng& rng) {
  detail::require(input_dim >= 1 && hidden_dim >= 1 && layer_count >= 1,
                  "encoder dimensions must be positive");
  auto fill = [&rng](Eigen::MatrixXd& w, int rows, int cols) {
    const double limit = std::sqrt(6.0 / (rows + cols));
    w.resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) w(i, j) = rng.uniform(-limit, limit);
  };
  EncoderParams p;
  p.model = model;
  p.layers.resize(layer_count);
  for (int l = 0; l < layer_count; ++l) {
    const int in = l == 0 ? input_dim : hidden_dim;
    fill(p.layers[l].w1, in, hidden_dim);
    if (model == Model::gin) fill(p.layers[l].w2, hidden_dim, hidden_dim);
  }
  return p;
}

inline AggregatedAdjacency build_targets(const Graph& g, int layer_count) {
  detail::require(layer_count >= 1, "layer count must be >= 1");
  const int n = g.node_count();
  Eigen::MatrixXd a_hat = g.adjacency_matrix();
  a_hat += Eigen::MatrixXd::Identity(n, n);

  AggregatedAdjacency out;
  out.targets.reserve(layer_count);
  Eigen::MatrixXd power = a_hat;
  Eigen::MatrixXd aggregated = a_hat;
  for (int l = 0; l < layer_count; ++l) {
    if (l > 0) {
      power = power * a_hat;
      aggregated += power;
    }
    Eigen::VectorXd scale = aggregated.rowwise().sum().cwiseSqrt().cwiseInverse();
    out.targets.push_back(scale.asDiagonal() * aggregated * scale.asDiagonal());
  }
  return out;
}

namespace detail {

/// Message-passing operators of one graph, prebuilt so the training loop
/// does not reassemble sparse matrices every epoch.
struct GraphOps {
  const Graph* graph = nullptr;
  Eigen::SparseMatrix<double> adjacency;  // A
  Eigen::SparseMatrix<double> gcn_prop;   // D^-1/2 (A+I) D^-1/2
  Eigen::VectorXd inv_degree;             // 0 for isolated nodes

  static GraphOps build(const Graph& g, Model model) {
    GraphOps ops;
    ops.graph = &g;
    const int n = g.node_count();
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * g.edge_count());
    for (auto [u, v] : g.edges()) {
      trips.emplace_back(u, v, 1.0);
      trips.emplace_back(v, u, 1.0);
    }
    ops.adjacency.resize(n, n);
    ops.adjacency.setFromTriplets(trips.begin(), trips.end());

    ops.inv_degree.resize(n);
    for (int u = 0; u < n; ++u) {
      int d = g.degree(u);
      ops.inv_degree(u) = d > 0 ? 1.0 / d : 0.0;
    }

    if (model == Model::gcn) {
      Eigen::VectorXd scale(n);
      for (int u = 0; u < n; ++u)
        scale(u) = 1.0 / std::sqrt(static_cast<double>(g.degree(u)) + 1.0);
      std::vector<Eigen::Triplet<double>> pt;
      pt.reserve(2 * g.edge_count() + n);
      for (auto [u, v] : g.edges()) {
        pt.emplace_back(u, v, scale(u) * scale(v));
        pt.emplace_back(v, u, scale(u) * scale(v));
      }
      for (int u = 0; u < n; ++u) pt.emplace_back(u, u, scale(u) * scale(u));
      ops.gcn_prop.resize(n, n);
      ops.gcn_prop.setFromTriplets(pt.begin(), pt.end());
    }
    return ops;
  }
};

/// Everything the backward pass needs from one forward evaluation.
struct ForwardTrace {
  struct Layer {
    Eigen::MatrixXd input;      // H^(l-1)
    Eigen::MatrixXd aggregate;  // GIN: Z = (1+eps) H + AGG(H); GCN: prop * H
    Eigen::MatrixXd preact;     // before the final nonlinearity / w2 stage
    Eigen::MatrixXd hidden;     // GIN only: relu(Z w1)
    Eigen::MatrixXi argmax;     // max aggregator routing, else empty
  };
  std::vector<Layer> layers;
  LayerStack stack;
};

inline void check_finite(const Eigen::MatrixXd& m, int layer) {
  if (!m.allFinite())
    throw NumericError("non-finite values in encoder layer " +
                       std::to_string(layer + 1));
}

inline Eigen::MatrixXd aggregate_neighbors(const GraphOps& ops,
                                           const Eigen::MatrixXd& h,
                                           Aggregator agg,
                                           Eigen::MatrixXi* argmax_out) {
  switch (agg) {
    case Aggregator::sum:
      return ops.adjacency * h;
    case Aggregator::mean:
      return ops.inv_degree.asDiagonal() * (ops.adjacency * h);
    case Aggregator::max: {
      const Graph& g = *ops.graph;
      const int n = g.node_count(), f = static_cast<int>(h.cols());
      Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, f);
      Eigen::MatrixXi arg = Eigen::MatrixXi::Constant(n, f, -1);
      for (int u = 0; u < n; ++u) {
        bool first = true;
        for (int v : g.neighbors(u)) {
          for (int j = 0; j < f; ++j) {
            if (first || h(v, j) > out(u, j)) {
              out(u, j) = h(v, j);
              arg(u, j) = v;
            }
          }
          first = false;
        }
      }
      if (argmax_out) *argmax_out = std::move(arg);
      return out;
    }
  }
  return {};
}

inline ForwardTrace forward_with_trace(const GraphOps& ops,
                                       const EncoderParams& params,
                                       Aggregator agg) {
  const Graph& g = *ops.graph;
  detail::require(params.layer_count() >= 1, "encoder has no layers");
  detail::require(g.attribute_dim() == params.input_dim(),
                  "attribute dimension does not match encoder input layer");
  ForwardTrace trace;
  trace.layers.resize(params.layer_count());
  trace.stack.reps.resize(params.layer_count());

  Eigen::MatrixXd h = g.attributes();
  for (int l = 0; l < params.layer_count(); ++l) {
    auto& t = trace.layers[l];
    t.input = h;
    if (params.model == Model::gin) {
      t.aggregate = aggregate_neighbors(ops, h, agg, &t.argmax);
      t.aggregate += (1.0 + params.epsilon) * h;
      t.preact = t.aggregate * params.layers[l].w1;
      t.hidden = t.preact.cwiseMax(0.0);
      h = t.hidden * params.layers[l].w2;
    } else {
      t.aggregate = ops.gcn_prop * h;
      t.preact = t.aggregate * params.layers[l].w1;
      h = t.preact.cwiseMax(0.0);
    }
    check_finite(h, l);
    trace.stack.reps[l] = h;
  }
  return trace;
}

}  // namespace detail

/// Runs the chosen message-passing model over all layers. h^0 is the node
/// attribute row; the GIN update is MLP((1+eps) h_u + aggregate over N_u)
/// with ReLU between the perceptron stages, the GCN update is the
/// symmetric-normalized propagation followed by ReLU.
inline LayerStack forward(const Graph& g, const EncoderParams& params,
                          Aggregator agg = Aggregator::sum) {
  auto ops = detail::GraphOps::build(g, params.model);
  return detail::forward_with_trace(ops, params, agg).stack;
}

/// Sum over layers of || target_l - H_l H_l^T ||_F for one graph. The norm
/// is not squared unless asked for; `squared` exists for sensitivity checks.
inline double stack_loss(const LayerStack& stack,
                         const AggregatedAdjacency& targets,
                         bool squared = false) {
  detail::require(stack.layer_count() == targets.layer_count(),
                  "stack and targets disagree on layer count");
  double total = 0.0;
  for (int l = 0; l < stack.layer_count(); ++l) {
    const Eigen::MatrixXd& h = stack.reps[l];
    detail::require(h.rows() == targets.targets[l].rows(),
                    "stack and targets disagree on node count");
    double ss = (targets.targets[l] - h * h.transpose()).squaredNorm();
    total += squared ? ss : std::sqrt(ss);
  }
  return total;
}

/// Layer-wise reconstruction loss over both graphs.
inline double reconstruction_loss(const LayerStack& stack_s,
                                  const LayerStack& stack_t,
                                  const AggregatedAdjacency& targets_s,
                                  const AggregatedAdjacency& targets_t,
                                  bool squared = false) {
  return stack_loss(stack_s, targets_s, squared) +
         stack_loss(stack_t, targets_t, squared);
}

namespace detail {

// d loss / d H_l. The unsquared norm is nonsmooth at a zero residual, so a
// 1e-12 guard enters the gradient denominator (the loss value itself is
// computed without it).
inline Eigen::MatrixXd loss_grad_wrt_rep(const Eigen::MatrixXd& h,
                                         const Eigen::MatrixXd& target,
                                         bool squared) {
  Eigen::MatrixXd residual = target - h * h.transpose();
  if (squared) return -4.0 * residual * h;
  const double norm = std::sqrt(residual.squaredNorm() + 1e-12);
  return (-2.0 / norm) * residual * h;
}

inline void backward_graph(const GraphOps& ops, const EncoderParams& params,
                           Aggregator agg, const ForwardTrace& trace,
                           const AggregatedAdjacency& targets, bool squared,
                           ParamGradients& grads) {
  const int layer_count = params.layer_count();
  Eigen::MatrixXd grad_out = loss_grad_wrt_rep(
      trace.stack.reps[layer_count - 1], targets.targets[layer_count - 1], squared);

  for (int l = layer_count - 1; l >= 0; --l) {
    const auto& t = trace.layers[l];
    const auto& layer = params.layers[l];
    Eigen::MatrixXd grad_agg;  // gradient wrt t.aggregate
    if (params.model == Model::gin) {
      grads[l].w2 += t.hidden.transpose() * grad_out;
      Eigen::MatrixXd grad_hidden = grad_out * layer.w2.transpose();
      Eigen::MatrixXd grad_pre =
          ((t.preact.array() > 0.0).cast<double>() * grad_hidden.array()).matrix();
      grads[l].w1 += t.aggregate.transpose() * grad_pre;
      grad_agg = grad_pre * layer.w1.transpose();
    } else {
      Eigen::MatrixXd grad_pre =
          ((t.preact.array() > 0.0).cast<double>() * grad_out.array()).matrix();
      grads[l].w1 += t.aggregate.transpose() * grad_pre;
      grad_agg = grad_pre * layer.w1.transpose();
    }

    if (l == 0) break;
    Eigen::MatrixXd grad_in;
    if (params.model == Model::gin) {
      switch (agg) {
        case Aggregator::sum:
          grad_in = ops.adjacency * grad_agg;
          break;
        case Aggregator::mean:
          grad_in = ops.adjacency * (ops.inv_degree.asDiagonal() * grad_agg);
          break;
        case Aggregator::max: {
          grad_in = Eigen::MatrixXd::Zero(grad_agg.rows(), grad_agg.cols());
          for (int u = 0; u < grad_agg.rows(); ++u)
            for (int j = 0; j < grad_agg.cols(); ++j)
              if (t.argmax(u, j) >= 0) grad_in(t.argmax(u, j), j) += grad_agg(u, j);
          break;
        }
      }
      grad_in += (1.0 + params.epsilon) * grad_agg;
    } else {
      grad_in = ops.gcn_prop * grad_agg;
    }
    grad_out = grad_in + loss_grad_wrt_rep(trace.stack.reps[l - 1],
                                           targets.targets[l - 1], squared);
  }
}

}  // namespace detail

struct LossAndGradients {
  double loss = 0.0;
  ParamGradients gradients;
  LayerStack stack_s, stack_t;
};

/// Exact reverse-mode gradients of the reconstruction loss with respect to
/// every weight matrix, accumulated over both graphs (shared weights).
inline LossAndGradients evaluate_loss_and_gradients(
    const Graph& g_s, const Graph& g_t, const EncoderParams& params,
    Aggregator agg, const AggregatedAdjacency& targets_s,
    const AggregatedAdjacency& targets_t, bool squared = false) {
  LossAndGradients out;
  out.gradients.resize(params.layer_count());
  for (int l = 0; l < params.layer_count(); ++l) {
    out.gradients[l].w1 = Eigen::MatrixXd::Zero(params.layers[l].w1.rows(),
                                                params.layers[l].w1.cols());
    if (params.model == Model::gin)
      out.gradients[l].w2 = Eigen::MatrixXd::Zero(params.layers[l].w2.rows(),
                                                  params.layers[l].w2.cols());
  }

  auto ops_s = detail::GraphOps::build(g_s, params.model);
  auto ops_t = detail::GraphOps::build(g_t, params.model);
  auto trace_s = detail::forward_with_trace(ops_s, params, agg);
  auto trace_t = detail::forward_with_trace(ops_t, params, agg);
  out.loss = stack_loss(trace_s.stack, targets_s, squared) +
             stack_loss(trace_t.stack, targets_t, squared);
  detail::backward_graph(ops_s, params, agg, trace_s, targets_s, squared,
                         out.gradients);
  detail::backward_graph(ops_t, params, agg, trace_t, targets_t, squared,
                         out.gradients);
  out.stack_s = std::move(trace_s.stack);
  out.stack_t = std::move(trace_t.stack);
  return out;
}

struct TrainReport {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int epochs_run = 0;
  bool early_stop = false;
};

/// Adam training loop starting from the given parameters. Runs at most
/// `epochs` steps and stops early once the relative loss improvement over a
/// 10-epoch window drops below 1e-4; the best parameters seen are returned,
/// so the result never scores worse than the starting point. Divergence
/// (non-finite loss) aborts with a diagnostic.
inline EncoderParams train_from(EncoderParams params, const Graph& g_s,
                                const Graph& g_t, const AlignConfig& cfg,
                                int epochs, TrainReport* report = nullptr) {
  detail::require(g_s.attribute_dim() == g_t.attribute_dim(),
                  "both graphs must share the attribute dimension");
  const auto targets_s = build_targets(g_s, params.layer_count());
  const auto targets_t = build_targets(g_t, params.layer_count());

  ParamGradients m(params.layer_count()), v(params.layer_count());
  for (int l = 0; l < params.layer_count(); ++l) {
    m[l].w1 = Eigen::MatrixXd::Zero(params.layers[l].w1.rows(),
                                    params.layers[l].w1.cols());
    v[l].w1 = m[l].w1;
    if (params.model == Model::gin) {
      m[l].w2 = Eigen::MatrixXd::Zero(params.layers[l].w2.rows(),
                                      params.layers[l].w2.cols());
      v[l].w2 = m[l].w2;
    }
  }
  constexpr double kBeta1 = 0.9, kBeta2 = 0.999, kEps = 1e-8;
  constexpr double kStopRelImprovement = 1e-4;
  constexpr int kStopWindow = 10;

  EncoderParams best = params;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  TrainReport local;

  auto adam_update = [&](Eigen::MatrixXd& w, Eigen::MatrixXd& mw,
                         Eigen::MatrixXd& vw, const Eigen::MatrixXd& grad,
                         int step) {
    mw = kBeta1 * mw + (1.0 - kBeta1) * grad;
    vw = kBeta2 * vw + (1.0 - kBeta2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(kBeta1, step);
    const double c2 = 1.0 - std::pow(kBeta2, step);
    w.array() -= cfg.learning_rate * (mw.array() / c1) /
                 ((vw.array() / c2).sqrt() + kEps);
  };

  for (int epoch = 0; epoch <= epochs; ++epoch) {
    auto eval = evaluate_loss_and_gradients(g_s, g_t, params, cfg.aggregator,
                                            targets_s, targets_t,
                                            cfg.squared_loss);
    if (!std::isfinite(eval.loss))
      throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                         "; retry with a lower learning rate");
    if (epoch == 0) local.initial_loss = eval.loss;
    if (eval.loss < best_loss) {
      best_loss = eval.loss;
      best = params;
    }
    history.push_back(eval.loss);
    if (epoch == epochs) break;
    if (static_cast<int>(history.size()) > kStopWindow) {
      const double before = history[history.size() - 1 - kStopWindow];
      if (before - eval.loss < kStopRelImprovement * std::abs(before)) {
        local.early_stop = true;
        break;
      }
    }
    for (int l = 0; l < params.layer_count(); ++l) {
      adam_update(params.layers[l].w1, m[l].w1, v[l].w1, eval.gradients[l].w1,
                  epoch + 1);
      if (params.model == Model::gin)
        adam_update(params.layers[l].w2, m[l].w2, v[l].w2, eval.gradients[l].w2,
                    epoch + 1);
    }
    local.epochs_run = epoch + 1;
  }

  local.final_loss = best_loss;
  if (report) *report = local;
  return best;
}

/// Fresh seeded initialization followed by training; with epochs = 0 the
/// seeded initialization comes back unchanged.
inline EncoderParams train(const Graph& g_s, const Graph& g_t,
                           const AlignConfig& cfg, TrainReport* report = nullptr) {
  cfg.validate();
  Rng rng(cfg.rng_seed);
  EncoderParams params = init_params(cfg.model, g_s.attribute_dim(),
                                     cfg.hidden_dim, cfg.layers, rng);
  if (cfg.epochs == 0) {
    if (report) *report = TrainReport{};
    return params;
  }
  return train_from(std::move(params), g_s, g_t, cfg, cfg.epochs, report);
}

/// Versioned text checkpoint: layer shapes plus row-major weights printed
/// with %.17g, which round-trips IEEE doubles exactly.
inline void save_params(const EncoderParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError(path, 0, "cannot open file for writing");
  out << "gradalign-params v1\n";
  out << "model " << to_string(params.model) << "\n";
  out << "epsilon " << detail::format_double(params.epsilon) << "\n";
  out << "layers " << params.layer_count() << "\n";
  auto dump = [&out](const Eigen::MatrixXd& w) {
    out << w.rows() << " " << w.cols() << "\n";
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j)
        out << (j ? " " : "") << detail::format_double(w(i, j));
      out << "\n";
    }
  };
  for (const auto& layer : params.layers) {
    dump(layer.w1);
    dump(layer.w2.size() ? layer.w2 : Eigen::MatrixXd(0, 0));
  }
}

inline EncoderParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::string magic, version;
  in >> magic >> version;
  if (magic != "gradalign-params" || version != "v1")
    throw ParseError(path, 1, "not a gradalign parameter file");
  EncoderParams params;
  std::string key, value;
  in >> key >> value;
  params.model = parse_model(value);
  in >> key >> params.epsilon;
  int layer_count = 0;
  in >> key >> layer_count;
  if (!in || layer_count < 1) throw ParseError(path, 4, "bad layer count");
  auto read_matrix = [&in, &path](Eigen::MatrixXd& w) {
    int rows = -1, cols = -1;
    in >> rows >> cols;
    if (!in || rows < 0 || cols < 0) throw ParseError(path, 0, "bad matrix shape");
    w.resize(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (!(in >> w(i, j))) throw ParseError(path, 0, "truncated matrix data");
  };
  params.layers.resize(layer_count);
  for (auto& layer : params.layers) {
    read_matrix(layer.w1);
    read_matrix(layer.w2);
  }
  return params;
}

}  // namespace gradalign

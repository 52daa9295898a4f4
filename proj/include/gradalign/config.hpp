#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradalign/error.hpp"

namespace gradalign {

enum class Model { gin, gcn };
enum class Aggregator { sum, mean, max };

enum class Variant {
  grad_align,     // full pipeline
  grad_align_ea,  // with per-iteration edge augmentation
  ablation_1,     // no gradual matching: everything at once (iter = 1)
  ablation_2,     // no embedding similarity: Tversky only
  ablation_3,     // no Tversky similarity: embeddings only
};

inline const char* to_string(Model m) { return m == Model::gin ? "gin" : "gcn"; }
inline const char* to_string(Aggregator a) {
  switch (a) {
    case Aggregator::sum: return "sum";
    case Aggregator::mean: return "mean";
    default: return "max";
  }
}
inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::grad_align: return "grad-align";
    case Variant::grad_align_ea: return "grad-align-ea";
    case Variant::ablation_1: return "ablation-1";
    case Variant::ablation_2: return "ablation-2";
    default: return "ablation-3";
  }
}

inline Model parse_model(const std::string& s) {
  if (s == "gin") return Model::gin;
  if (s == "gcn") return Model::gcn;
  throw ContractError("unknown model: " + s);
}
inline Aggregator parse_aggregator(const std::string& s) {
  if (s == "sum") return Aggregator::sum;
  if (s == "mean") return Aggregator::mean;
  if (s == "max") return Aggregator::max;
  throw ContractError("unknown aggregator: " + s);
}
inline Variant parse_variant(const std::string& s) {
  if (s == "grad-align") return Variant::grad_align;
  if (s == "grad-align-ea") return Variant::grad_align_ea;
  if (s == "ablation-1") return Variant::ablation_1;
  if (s == "ablation-2") return Variant::ablation_2;
  if (s == "ablation-3") return Variant::ablation_3;
  throw ContractError("unknown variant: " + s);
}

/// All hyperparameters of an alignment run. Defaults follow the pivot
/// configuration: two GIN layers with sum aggregation, hidden dimension 150,
/// Adam at 0.005, fifteen matching iterations, 10% prior seeds, tau 0.7,
/// and alpha resolved at run time to n_t / n_s unless set explicitly.
struct AlignConfig {
  int layers = 2;               // k
  int hidden_dim = 150;         // h
  double learning_rate = 0.005;
  int epochs = 100;
  Model model = Model::gin;
  Aggregator aggregator = Aggregator::sum;
  std::optional<double> alpha;  // empty = auto (n_t / n_s after ordering)
  double beta = 1.0;
  int iterations = 15;          // iter
  double seed_fraction = 0.1;   // t
  double tau = 0.7;
  Variant variant = Variant::grad_align;
  bool normalize_embeddings = true;
  bool zero_fallback = true;    // rank zero-fused cells by embedding score
  bool squared_loss = false;    // square the per-layer Frobenius norm
  bool ea_fine_tune = false;    // bounded fine-tune instead of a full retrain
  int refresh_epochs = 20;      // fine-tune budget after augmentation
  std::uint64_t rng_seed = 0;
  std::optional<int> pair_budget;  // empty = all remaining correspondences

  void validate() const {
    detail::require(layers >= 1, "layers must be >= 1");
    detail::require(hidden_dim >= 1, "hidden_dim must be >= 1");
    detail::require(learning_rate > 0.0, "learning_rate must be positive");
    detail::require(epochs >= 0, "epochs must be >= 0");
    detail::require(!alpha || *alpha > 0.0, "alpha must be positive");
    detail::require(beta > 0.0, "beta must be positive");
    detail::require(iterations >= 1, "iterations must be >= 1");
    detail::require(seed_fraction >= 0.0 && seed_fraction <= 1.0,
                    "seed fraction must lie in [0,1]");
    detail::require(refresh_epochs >= 0, "refresh_epochs must be >= 0");
    detail::require(!pair_budget || *pair_budget >= 0,
                    "pair budget must be >= 0");
  }

  double resolve_alpha(int n_source, int n_target) const {
    if (alpha) return *alpha;
    int hi = std::max(n_source, n_target), lo = std::min(n_source, n_target);
    return static_cast<double>(lo) / static_cast<double>(hi);
  }
};

/// Resolved key/value view of a config, used to echo the full
/// configuration into run artifacts.
inline std::vector<std::pair<std::string, std::string>> config_echo(
    const AlignConfig& cfg, double resolved_alpha) {
  auto fmt = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("variant", to_string(cfg.variant));
  kv.emplace_back("model", to_string(cfg.model));
  kv.emplace_back("aggregator", to_string(cfg.aggregator));
  kv.emplace_back("layers", std::to_string(cfg.layers));
  kv.emplace_back("hidden_dim", std::to_string(cfg.hidden_dim));
  kv.emplace_back("learning_rate", fmt(cfg.learning_rate));
  kv.emplace_back("epochs", std::to_string(cfg.epochs));
  kv.emplace_back("alpha", fmt(resolved_alpha));
  kv.emplace_back("beta", fmt(cfg.beta));
  kv.emplace_back("iterations", std::to_string(cfg.iterations));
  kv.emplace_back("seed_fraction", fmt(cfg.seed_fraction));
  kv.emplace_back("tau", fmt(cfg.tau));
  kv.emplace_back("normalize_embeddings", cfg.normalize_embeddings ? "1" : "0");
  kv.emplace_back("zero_fallback", cfg.zero_fallback ? "1" : "0");
  kv.emplace_back("squared_loss", cfg.squared_loss ? "1" : "0");
  kv.emplace_back("ea_fine_tune", cfg.ea_fine_tune ? "1" : "0");
  kv.emplace_back("refresh_epochs", std::to_string(cfg.refresh_epochs));
  kv.emplace_back("rng_seed", std::to_string(cfg.rng_seed));
  if (cfg.pair_budget)
    kv.emplace_back("pair_budget", std::to_string(*cfg.pair_budget));
  return kv;
}

}  // namespace gradalign

#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gradalign/matcher.hpp"
#include "gradalign/metrics.hpp"
#include "gradalign/synthetic.hpp"

namespace gradalign {

struct BenchPoint {
  double edge_noise = 0.0;
  double attr_noise = 0.0;
};

struct BenchRow {
  Variant variant = Variant::grad_align;
  double edge_noise = 0.0;
  double attr_noise = 0.0;
  std::uint64_t seed = 0;
  double acc = 0.0;
  double p_at_1 = 0.0, p_at_5 = 0.0, p_at_10 = 0.0;
  double runtime_s = 0.0;  // measured wall clock
  int iterations = 0;
  double alpha = 0.0;
  double tau = 0.0;
  bool failed = false;
  std::string error;
};

namespace detail {

inline double wall_seconds(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - from)
      .count();
}

}  // namespace detail

/// Scores a finished run against the full ground truth: seeds are excluded
/// from Acc, the Precision@q denominator is all ground-truth pairs.
inline EvalReport evaluate_result(const AlignResult& result,
                                  const GroundTruth& gt, const AlignConfig& cfg,
                                  double runtime_seconds,
                                  const std::vector<int>& qs = {1, 5, 10}) {
  EvalReport report;
  report.variant = cfg.variant;
  report.acc = accuracy(result.mapping, gt, /*exclude_seeds=*/true);
  for (int q : qs)
    report.precision_at[q] = precision_at_q(result.final_similarity, gt, q);
  report.runtime_seconds = runtime_seconds;
  report.config_echo = config_echo(cfg, result.resolved_alpha);
  report.seed = cfg.rng_seed;
  return report;
}

inline BenchRow to_bench_row(const EvalReport& report, double alpha, double tau,
                             int iterations) {
  BenchRow row;
  row.variant = report.variant;
  row.seed = report.seed;
  row.acc = report.acc;
  row.p_at_1 = report.precision_at.at(1);
  row.p_at_5 = report.precision_at.at(5);
  row.p_at_10 = report.precision_at.at(10);
  row.runtime_s = report.runtime_seconds;
  row.iterations = iterations;
  row.alpha = alpha;
  row.tau = tau;
  return row;
}

/// Runs one variant on a prepared instance and scores it.
inline BenchRow run_variant(const Graph& source, const Graph& target,
                            const GroundTruth& seeds, const GroundTruth& gt,
                            AlignConfig cfg, Variant variant,
                            AlignResult* result_out = nullptr) {
  cfg.variant = variant;
  const int iterations = variant == Variant::ablation_1 ? 1 : cfg.iterations;
  const auto start = std::chrono::steady_clock::now();
  try {
    AlignResult result = align(source, target, seeds, cfg);
    const double runtime = detail::wall_seconds(start);
    BenchRow row = to_bench_row(evaluate_result(result, gt, cfg, runtime),
                                result.resolved_alpha, cfg.tau, iterations);
    if (result_out) *result_out = std::move(result);
    return row;
  } catch (const std::exception& e) {
    BenchRow row;
    row.variant = variant;
    row.seed = cfg.rng_seed;
    row.iterations = iterations;
    row.tau = cfg.tau;
    row.alpha = cfg.resolve_alpha(source.node_count(), target.node_count());
    row.runtime_s = detail::wall_seconds(start);
    row.failed = true;
    row.error = e.what();
    return row;
  }
}

/// Synthetic noise sweep: per grid point and repeat, generates a noisy copy
/// of the base graph, splits prior seeds, runs every requested variant on
/// the same instance, and records one row each. Cells own RNG streams
/// derived from (base seed, cell, repeat), so `jobs` level parallelism
/// cannot change any result. Individual run faults land in their row and
/// the sweep continues.
inline std::vector<BenchRow> run_benchmark(const Graph& base,
                                           const std::vector<BenchPoint>& grid,
                                           const AlignConfig& cfg, int repeats,
                                           const std::vector<Variant>& variants,
                                           int jobs = 1) {
  detail::require(repeats >= 1, "repeats must be >= 1");
  detail::require(!grid.empty(), "grid must be nonempty");
  detail::require(!variants.empty(), "variant list must be nonempty");
  cfg.validate();

  const int cells = static_cast<int>(grid.size()) * repeats;
  std::vector<std::vector<BenchRow>> cell_rows(cells);

  auto run_cell = [&](int cell) {
    const int gi = cell / repeats, ri = cell % repeats;
    const std::uint64_t cell_seed = derive_seed(cfg.rng_seed, gi, ri);
    AlignConfig run_cfg = cfg;
    run_cfg.rng_seed = cell_seed;
    try {
      NoisyCopy copy = make_noisy_copy(base, grid[gi].edge_noise,
                                       grid[gi].attr_noise, cell_seed);
      auto [seeds, eval] =
          split_seeds(copy.truth, cfg.seed_fraction, derive_seed(cell_seed, 1));
      if (!run_cfg.pair_budget)
        run_cfg.pair_budget = copy.truth.size() - seeds.size();
      for (Variant v : variants) {
        BenchRow row = run_variant(base, copy.graph, seeds, copy.truth, run_cfg, v);
        row.edge_noise = grid[gi].edge_noise;
        row.attr_noise = grid[gi].attr_noise;
        cell_rows[cell].push_back(std::move(row));
      }
    } catch (const std::exception& e) {
      for (Variant v : variants) {
        BenchRow row;
        row.variant = v;
        row.edge_noise = grid[gi].edge_noise;
        row.attr_noise = grid[gi].attr_noise;
        row.seed = cell_seed;
        row.failed = true;
        row.error = e.what();
        cell_rows[cell].push_back(std::move(row));
      }
    }
  };

  if (jobs <= 1) {
    for (int c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
      pool.emplace_back([&, w] {
        for (int c = w; c < cells; c += jobs) run_cell(c);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<BenchRow> rows;
  rows.reserve(static_cast<std::size_t>(cells) * variants.size());
  for (auto& cr : cell_rows)
    for (auto& row : cr) rows.push_back(std::move(row));
  return rows;
}

/// CSV serialization. Wall-clock values are jitter, so the runtime column
/// prints 0.000 unless `measured_runtime` is set; everything else is
/// deterministic for a fixed seed. Per-group mean/stddev summaries go in as
/// trailing `#` comment lines, keeping the data-row count at
/// grid x repeats x variants exactly.
inline void write_benchmark_csv(std::ostream& os,
                                const std::vector<BenchRow>& rows,
                                bool measured_runtime = false,
                                bool summary = true) {
  os << "variant,edge_noise,attr_noise,seed,acc,p_at_1,p_at_5,p_at_10,"
        "runtime_s,iter,alpha,tau\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf,
                  "%s,%.6g,%.6g,%llu,%.6f,%.6f,%.6f,%.6f,%.3f,%d,%.6g,%.6g\n",
                  to_string(r.variant), r.edge_noise, r.attr_noise,
                  static_cast<unsigned long long>(r.seed), r.acc, r.p_at_1,
                  r.p_at_5, r.p_at_10, measured_runtime ? r.runtime_s : 0.0,
                  r.iterations, r.alpha, r.tau);
    os << buf;
    if (r.failed) os << "# error: " << r.error << "\n";
  }
  if (!summary) return;

  struct Group {
    std::string key;
    std::vector<double> acc;
    std::vector<double> runtime;
  };
  std::vector<Group> groups;
  for (const auto& r : rows) {
    if (r.failed) continue;
    std::snprintf(buf, sizeof buf, "%s,%.6g,%.6g", to_string(r.variant),
                  r.edge_noise, r.attr_noise);
    std::string key = buf;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const Group& g) { return g.key == key; });
    if (it == groups.end()) {
      groups.push_back({key, {}, {}});
      it = groups.end() - 1;
    }
    it->acc.push_back(r.acc);
    it->runtime.push_back(r.runtime_s);
  }
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
  };
  auto stddev = [&](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
  };
  for (const auto& g : groups) {
    std::snprintf(buf, sizeof buf, "# summary,%s,acc_mean=%.6f,acc_std=%.6f",
                  g.key.c_str(), mean(g.acc), stddev(g.acc));
    os << buf;
    if (measured_runtime) {
      std::snprintf(buf, sizeof buf, ",runtime_mean=%.3f", mean(g.runtime));
      os << buf;
    }
    os << "\n";
  }
}

struct AblationOutcome {
  Variant variant;
  BenchRow row;
};

/// Runs the full method and its three single-module removals plus the
/// edge-augmented variant on one shared instance and seed set.
inline std::vector<AblationOutcome> run_ablations(const Graph& source,
                                                  const Graph& target,
                                                  const GroundTruth& seeds,
                                                  const GroundTruth& gt,
                                                  const AlignConfig& cfg) {
  static constexpr Variant kAll[] = {Variant::grad_align, Variant::ablation_1,
                                     Variant::ablation_2, Variant::ablation_3,
                                     Variant::grad_align_ea};
  std::vector<AblationOutcome> out;
  for (Variant v : kAll)
    out.push_back({v, run_variant(source, target, seeds, gt, cfg, v)});
  return out;
}

}  // namespace gradalign

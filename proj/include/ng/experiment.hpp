#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ng/metrics.hpp"
#include "ng/model.hpp"

namespace ng {

struct SweepConfig {
  int n_agents = 100;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> c_values;
  int runs_per_cell = 1000;
  std::uint64_t master_seed = 0;
  std::uint64_t max_steps = 0;  // 0 = 1000 * n_agents
  std::uint64_t sample_stride = 1;
  int workers = 0;              // 0 = hardware concurrency
  ConsultMissMode consult_miss = ConsultMissMode::NoOp;
  bool collect_series = false;  // per-cell averaged time series

  void validate() const;
  std::uint64_t effective_max_steps() const;
};

struct MeanSd {
  double mean = 0.0;
  double sd = 0.0;

  friend bool operator==(const MeanSd&, const MeanSd&) = default;
};

// Cross-run average of the observables at one strided time, with runs that
// already converged contributing n_w = N, n_d = 1, s = 1 (consensus is
// absorbing, so these are the values an extended run would record).
struct SeriesPoint {
  std::uint64_t t = 0;
  double mean_n_w = 0.0;
  double mean_n_d = 0.0;
  double mean_s = 0.0;

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

// Aggregated statistics for one (lambda, C) combination. Means and standard
// deviations cover converged runs only; non_converged is reported separately.
struct SweepCell {
  std::size_t lambda_index = 0;
  std::size_t c_index = 0;
  int n_agents = 0;
  double lambda = 0.0;
  std::uint64_t c_words = 0;
  int runs = 0;
  int non_converged = 0;
  MeanSd t_conv;
  MeanSd max_nd;
  MeanSd t_max_nd;
  MeanSd max_nw;
  MeanSd t_max_nw;
  // Fraction of converged runs whose consensus word is a shared-memory word.
  double p_shared = 0.0;
  std::vector<SeriesPoint> series;  // empty unless collect_series
};

struct BoundReport {
  double lambda = 0.0;
  std::uint64_t c_words = 0;
  int n_agents = 0;
  double bound_value = 0.0;
  double observed_mean_max_nd = 0.0;
  bool satisfied = false;
};

enum class PeakStatistic { TConv, MaxNw };

// Seed for run i of any cell: output i+1 of the SplitMix64 stream started at
// master_seed. Deliberately independent of lambda and C, so all cells of a
// sweep see the same run seeds (common random numbers); at lambda = 0, where
// the shared memory is never read, cells with different C are then
// bit-identical.
std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index);

// Closed form of the distinct-word ceiling: (1 - lambda) * N/2 plus the
// shared-memory contribution min(C, lambda * N/2).
double nd_upper_bound(int n_agents, double lambda, std::uint64_t c_words);

// Executes runs_per_cell independent trials of the (lambda_index, c_index)
// combination and aggregates them. Runs may execute on several threads; the
// aggregation reduces stored per-run integer summaries in run-index order, so
// the result is bit-identical for any worker count.
SweepCell run_cell(const SweepConfig& config, std::size_t lambda_index,
                   std::size_t c_index);

using CellCallback = std::function<void(const SweepCell&)>;

// One cell per (lambda, C) in lambda-major order. The optional callback fires
// after each cell completes (progress reporting).
std::vector<SweepCell> run_sweep(const SweepConfig& config,
                                 const CellCallback& on_cell = {});

// bound_value = nd_upper_bound per cell; satisfied iff the observed mean
// max_nd does not exceed it by more than the slack factor.
std::vector<BoundReport> check_bound(std::span<const SweepCell> cells,
                                     double slack = 0.05);

// Grid lambda maximizing the cell mean of the chosen statistic for the given
// C; ties break toward the smaller lambda. Requires at least 3 lambda points.
double find_peak_lambda(std::span<const SweepCell> cells, PeakStatistic statistic,
                        std::uint64_t c_words);

}  // namespace ng

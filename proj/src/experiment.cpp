#include "ng/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

namespace ng {

namespace {

// Compact per-run record kept for the index-order reduction.
struct RunSummary {
  bool converged = false;
  bool in_shared = false;
  std::uint64_t t_conv = 0;
  std::uint64_t max_nd = 0;
  std::uint64_t t_max_nd = 0;
  std::uint64_t max_nw = 0;
  std::uint64_t t_max_nw = 0;
};

// Exact integer accumulation of one observable; mean/sd derived at the end.
struct Tally {
  std::uint64_t sum = 0;
  unsigned __int128 sum_sq = 0;

  void add(std::uint64_t v) {
    sum += v;
    sum_sq += static_cast<unsigned __int128>(v) * v;
  }

  MeanSd finish(std::uint64_t n) const {
    if (n == 0) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      return {nan, nan};
    }
    const long double mean = static_cast<long double>(sum) / static_cast<long double>(n);
    if (n < 2) return {static_cast<double>(mean), 0.0};
    long double ss = static_cast<long double>(sum_sq) -
                     static_cast<long double>(sum) * static_cast<long double>(sum) /
                         static_cast<long double>(n);
    if (ss < 0) ss = 0;
    const long double sd = std::sqrt(ss / static_cast<long double>(n - 1));
    return {static_cast<double>(mean), static_cast<double>(sd)};
  }
};

// Strided per-slot integer sums across runs. Runs that converged before a
// slot contribute padding at finalize time, so only sampled values are
// accumulated here. Integer sums make the merge order irrelevant.
struct SeriesAccumulator {
  std::vector<std::uint64_t> sum_nw, sum_nd, sum_s, samples;

  void merge(const std::vector<Observation>& series, std::uint64_t stride) {
    for (const Observation& obs : series) {
      if (obs.t % stride != 0) continue;  // off-stride convergence row
      const std::size_t slot = static_cast<std::size_t>(obs.t / stride) - 1;
      if (slot >= sum_nw.size()) {
        sum_nw.resize(slot + 1, 0);
        sum_nd.resize(slot + 1, 0);
        sum_s.resize(slot + 1, 0);
        samples.resize(slot + 1, 0);
      }
      sum_nw[slot] += obs.n_w;
      sum_nd[slot] += obs.n_d;
      sum_s[slot] += static_cast<std::uint64_t>(obs.s);
      ++samples[slot];
    }
  }

  std::vector<SeriesPoint> finish(int runs, int n_agents, std::uint64_t stride) const {
    std::vector<SeriesPoint> out;
    out.reserve(sum_nw.size());
    const auto r = static_cast<long double>(runs);
    for (std::size_t slot = 0; slot < sum_nw.size(); ++slot) {
      const auto padded = static_cast<long double>(runs - static_cast<int>(samples[slot]));
      SeriesPoint p;
      p.t = (slot + 1) * stride;
      p.mean_n_w = static_cast<double>(
          (static_cast<long double>(sum_nw[slot]) + padded * n_agents) / r);
      p.mean_n_d =
          static_cast<double>((static_cast<long double>(sum_nd[slot]) + padded) / r);
      p.mean_s =
          static_cast<double>((static_cast<long double>(sum_s[slot]) + padded) / r);
      out.push_back(p);
    }
    return out;
  }
};

int resolve_workers(int hint, int jobs) {
  int workers = hint;
  if (workers <= 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    workers = hw > 0 ? static_cast<int>(hw) : 1;
  }
  return std::clamp(workers, 1, std::max(1, jobs));
}

}  // namespace

void SweepConfig::validate() const {
  if (n_agents < 2)
    throw std::invalid_argument("n_agents: a pairwise game needs at least 2 agents, got " +
                                std::to_string(n_agents));
  if (lambdas.empty()) throw std::invalid_argument("lambdas: list must be non-empty");
  if (c_values.empty()) throw std::invalid_argument("c_values: list must be non-empty");
  if (runs_per_cell < 1)
    throw std::invalid_argument("runs_per_cell: must be >= 1, got " +
                                std::to_string(runs_per_cell));
  for (double lambda : lambdas)
    if (!(lambda >= 0.0 && lambda <= 1.0))
      throw std::invalid_argument("lambdas: every value must lie in [0, 1], got " +
                                  std::to_string(lambda));
  for (std::uint64_t c : c_values)
    if (c < 1) throw std::invalid_argument("c_values: every value must be >= 1, got 0");
  if (sample_stride < 1) throw std::invalid_argument("sample_stride: must be >= 1, got 0");
}

std::uint64_t SweepConfig::effective_max_steps() const {
  return max_steps != 0 ? max_steps : 1000ull * static_cast<std::uint64_t>(n_agents);
}

std::uint64_t derive_run_seed(std::uint64_t master_seed, std::uint64_t run_index) {
  return SplitMix64::at(master_seed, run_index);
}

double nd_upper_bound(int n_agents, double lambda, std::uint64_t c_words) {
  if (n_agents < 2)
    throw std::invalid_argument("n_agents: must be >= 2, got " + std::to_string(n_agents));
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda: must lie in [0, 1], got " + std::to_string(lambda));
  if (c_words < 1) throw std::invalid_argument("c_words: must be >= 1, got 0");
  const double half = 0.5 * static_cast<double>(n_agents);
  const double shared_part = std::min(static_cast<double>(c_words), lambda * half);
  return (1.0 - lambda) * half + shared_part;
}

SweepCell run_cell(const SweepConfig& config, std::size_t lambda_index, std::size_t c_index) {
  config.validate();
  if (lambda_index >= config.lambdas.size())
    throw std::out_of_range("lambda_index out of range");
  if (c_index >= config.c_values.size()) throw std::out_of_range("c_index out of range");

  const double lambda = config.lambdas[lambda_index];
  const std::uint64_t c_words = config.c_values[c_index];
  const int runs = config.runs_per_cell;

  std::vector<RunSummary> summaries(static_cast<std::size_t>(runs));
  SeriesAccumulator series_acc;
  std::mutex series_mutex;
  std::atomic<int> next_run{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto work = [&]() {
    try {
      for (;;) {
        const int i = next_run.fetch_add(1, std::memory_order_relaxed);
        if (i >= runs) return;
        GameConfig game;
        game.n_agents = config.n_agents;
        game.lambda = lambda;
        game.c_words = c_words;
        game.seed = derive_run_seed(config.master_seed, static_cast<std::uint64_t>(i));
        game.max_steps = config.max_steps;
        game.sample_stride = config.sample_stride;
        game.consult_miss = config.consult_miss;

        const RunResult run = track_run(game, {.record_series = config.collect_series});
        RunSummary& s = summaries[static_cast<std::size_t>(i)];
        s.converged = run.converged;
        s.in_shared = run.consensus_in_shared;
        s.t_conv = run.t_conv;
        s.max_nd = run.max_nd;
        s.t_max_nd = run.t_max_nd;
        s.max_nw = run.max_nw;
        s.t_max_nw = run.t_max_nw;
        if (config.collect_series) {
          std::lock_guard<std::mutex> lock(series_mutex);
          series_acc.merge(run.series, config.sample_stride);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next_run.store(runs);
    }
  };

  const int workers = resolve_workers(config.workers, runs);
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Reduce in run-index order; all observables are integers, so the stored
  // sums are exact and independent of completion order.
  SweepCell cell;
  cell.lambda_index = lambda_index;
  cell.c_index = c_index;
  cell.n_agents = config.n_agents;
  cell.lambda = lambda;
  cell.c_words = c_words;
  cell.runs = runs;

  Tally t_conv, max_nd, t_max_nd, max_nw, t_max_nw;
  std::uint64_t converged = 0;
  std::uint64_t in_shared = 0;
  for (const RunSummary& s : summaries) {
    if (!s.converged) {
      ++cell.non_converged;
      continue;
    }
    ++converged;
    if (s.in_shared) ++in_shared;
    t_conv.add(s.t_conv);
    max_nd.add(s.max_nd);
    t_max_nd.add(s.t_max_nd);
    max_nw.add(s.max_nw);
    t_max_nw.add(s.t_max_nw);
  }
  cell.t_conv = t_conv.finish(converged);
  cell.max_nd = max_nd.finish(converged);
  cell.t_max_nd = t_max_nd.finish(converged);
  cell.max_nw = max_nw.finish(converged);
  cell.t_max_nw = t_max_nw.finish(converged);
  cell.p_shared = converged == 0 ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(in_shared) / static_cast<double>(converged);
  if (config.collect_series)
    cell.series = series_acc.finish(runs, config.n_agents, config.sample_stride);
  return cell;
}

std::vector<SweepCell> run_sweep(const SweepConfig& config, const CellCallback& on_cell) {
  config.validate();
  std::vector<SweepCell> cells;
  cells.reserve(config.lambdas.size() * config.c_values.size());
  for (std::size_t li = 0; li < config.lambdas.size(); ++li) {
    for (std::size_t ci = 0; ci < config.c_values.size(); ++ci) {
      cells.push_back(run_cell(config, li, ci));
      if (on_cell) on_cell(cells.back());
    }
  }
  return cells;
}

std::vector<BoundReport> check_bound(std::span<const SweepCell> cells, double slack) {
  std::vector<BoundReport> reports;
  reports.reserve(cells.size());
  for (const SweepCell& cell : cells) {
    BoundReport report;
    report.lambda = cell.lambda;
    report.c_words = cell.c_words;
    report.n_agents = cell.n_agents;
    report.bound_value = nd_upper_bound(cell.n_agents, cell.lambda, cell.c_words);
    report.observed_mean_max_nd = cell.max_nd.mean;
    report.satisfied = cell.max_nd.mean <= report.bound_value * (1.0 + slack);
    reports.push_back(report);
  }
  return reports;
}

double find_peak_lambda(std::span<const SweepCell> cells, PeakStatistic statistic,
                        std::uint64_t c_words) {
  std::vector<std::pair<double, double>> points;  // (lambda, mean)
  for (const SweepCell& cell : cells) {
    if (cell.c_words != c_words) continue;
    const double mean =
        statistic == PeakStatistic::TConv ? cell.t_conv.mean : cell.max_nw.mean;
    points.emplace_back(cell.lambda, mean);
  }
  std::sort(points.begin(), points.end());
  if (points.size() < 3)
    throw std::invalid_argument("find_peak_lambda: need at least 3 lambda grid points for C=" +
                                std::to_string(c_words));
  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (points[i].second > points[best].second) best = i;  // ties keep the smaller lambda
  return points[best].first;
}

}  // namespace ng

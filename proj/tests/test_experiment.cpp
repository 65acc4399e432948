#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "ng/experiment.hpp"
#include "reference_model.hpp"

using namespace ng;

namespace {

SweepConfig make_sweep(int n, std::vector<double> lambdas, std::vector<std::uint64_t> cs,
                       int runs, std::uint64_t seed) {
  SweepConfig cfg;
  cfg.n_agents = n;
  cfg.lambdas = std::move(lambdas);
  cfg.c_values = std::move(cs);
  cfg.runs_per_cell = runs;
  cfg.master_seed = seed;
  return cfg;
}

bool bits_equal(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool stats_equal(const MeanSd& a, const MeanSd& b) {
  return bits_equal(a.mean, b.mean) && bits_equal(a.sd, b.sd);
}

// Statistics only; lambda/C labels and indices may differ.
bool same_cell_statistics(const SweepCell& a, const SweepCell& b) {
  return a.runs == b.runs && a.non_converged == b.non_converged &&
         stats_equal(a.t_conv, b.t_conv) && stats_equal(a.max_nd, b.max_nd) &&
         stats_equal(a.t_max_nd, b.t_max_nd) && stats_equal(a.max_nw, b.max_nw) &&
         stats_equal(a.t_max_nw, b.t_max_nw) && bits_equal(a.p_shared, b.p_shared) &&
         a.series == b.series;
}

SweepCell synthetic_cell(double lambda, std::uint64_t c, double t_conv_mean, double max_nw_mean) {
  SweepCell cell;
  cell.n_agents = 100;
  cell.lambda = lambda;
  cell.c_words = c;
  cell.t_conv.mean = t_conv_mean;
  cell.max_nw.mean = max_nw_mean;
  return cell;
}

}  // namespace

TEST_CASE("nd_upper_bound evaluates the two-case ceiling") {
  CHECK(nd_upper_bound(100, 0.0, 500) == doctest::Approx(50.0));
  CHECK(nd_upper_bound(100, 1.0, 5) == doctest::Approx(5.0));
  CHECK(nd_upper_bound(100, 0.5, 100) == doctest::Approx(50.0));  // 25 + min(100, 25)
  CHECK(nd_upper_bound(100, 1.0, 500) == doctest::Approx(50.0));  // 0 + min(500, 50)
  CHECK_THROWS_AS(nd_upper_bound(1, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(nd_upper_bound(100, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(nd_upper_bound(100, 0.5, 0), std::invalid_argument);
}

TEST_CASE("sweep config validation names the failing field") {
  CHECK_THROWS_AS(make_sweep(100, {}, {1}, 10, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_sweep(100, {0.0}, {}, 10, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_sweep(100, {0.0}, {1}, 0, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_sweep(100, {1.2}, {1}, 10, 0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(make_sweep(1, {0.0}, {1}, 10, 0).validate(), std::invalid_argument);
  CHECK_NOTHROW(make_sweep(100, {0.0}, {1}, 10, 0).validate());
}

TEST_CASE("derived run seeds within a cell never collide") {
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10000; ++i) seeds.insert(derive_run_seed(4711, i));
  CHECK(seeds.size() == 10000);
}

TEST_CASE("lambda=1, C=1: consensus is always the lone shared word") {
  const SweepConfig cfg = make_sweep(100, {1.0}, {1}, 50, 12);
  const SweepCell cell = run_cell(cfg, 0, 0);
  CHECK(cell.runs == 50);
  CHECK(cell.non_converged == 0);
  CHECK(cell.p_shared == 1.0);
  CHECK(cell.max_nd.mean == doctest::Approx(1.0));  // only word 0 ever exists
  CHECK(cell.max_nd.sd == doctest::Approx(0.0));
}

TEST_CASE("lambda=0: the consensus word is never a shared word") {
  const SweepCell cell = run_cell(make_sweep(30, {0.0}, {10}, 40, 9), 0, 0);
  CHECK(cell.non_converged == 0);
  CHECK(cell.p_shared == 0.0);
}

TEST_CASE("cell statistics match an independent rule-text simulator") {
  // Monte Carlo cross-check at N=4, lambda=0.5, C=2.
  const int runs = 10000;
  const SweepCell cell = run_cell(make_sweep(4, {0.5}, {2}, runs, 555), 0, 0);
  REQUIRE(cell.non_converged == 0);

  int ref_shared = 0;
  double ref_t_sum = 0.0, ref_t_sumsq = 0.0;
  for (int i = 0; i < runs; ++i) {
    const ref::Result r = ref::run(4, 0.5, 2, 777000 + static_cast<std::uint64_t>(i), 100000);
    REQUIRE(r.converged);
    if (r.consensus_in_shared) ++ref_shared;
    ref_t_sum += static_cast<double>(r.t_conv);
    ref_t_sumsq += static_cast<double>(r.t_conv) * static_cast<double>(r.t_conv);
  }

  // Two-sample checks at 3 sigma.
  const double p_ref = static_cast<double>(ref_shared) / runs;
  const double p_pool = (p_ref + cell.p_shared) / 2.0;
  const double p_sigma = std::sqrt(p_pool * (1.0 - p_pool) * 2.0 / runs);
  CHECK(std::abs(cell.p_shared - p_ref) <= 3.0 * p_sigma);

  const double ref_mean = ref_t_sum / runs;
  const double ref_var = (ref_t_sumsq - ref_t_sum * ref_t_sum / runs) / (runs - 1);
  const double t_sigma =
      std::sqrt(ref_var / runs + cell.t_conv.sd * cell.t_conv.sd / runs);
  CHECK(std::abs(cell.t_conv.mean - ref_mean) <= 3.0 * t_sigma);
}

TEST_CASE("run_sweep covers the grid in lambda-major order") {
  SweepConfig cfg = make_sweep(2, {0.0, 0.5, 1.0}, {1, 5}, 1, 3);
  const auto cells = run_sweep(cfg);
  REQUIRE(cells.size() == 6);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    CHECK(cells[i].lambda_index == i / 2);
    CHECK(cells[i].c_index == i % 2);
    CHECK(cells[i].lambda == cfg.lambdas[i / 2]);
    CHECK(cells[i].c_words == cfg.c_values[i % 2]);
  }
}

TEST_CASE("lambda=0 cells are bit-identical across C") {
  SweepConfig cfg = make_sweep(50, {0.0}, {1, 500}, 60, 2025);
  const auto cells = run_sweep(cfg);
  REQUIRE(cells.size() == 2);
  CHECK(same_cell_statistics(cells[0], cells[1]));
}

TEST_CASE("worker count does not change cell output") {
  SweepConfig one = make_sweep(50, {0.4}, {5}, 80, 31);
  one.collect_series = true;
  SweepConfig four = one;
  one.workers = 1;
  four.workers = 4;
  const SweepCell a = run_cell(one, 0, 0);
  const SweepCell b = run_cell(four, 0, 0);
  CHECK(same_cell_statistics(a, b));
  CHECK(!a.series.empty());
}

TEST_CASE("cell series averages pad converged runs with the consensus values") {
  SweepConfig cfg = make_sweep(3, {0.0}, {1}, 40, 77);
  cfg.collect_series = true;
  const SweepCell cell = run_cell(cfg, 0, 0);
  REQUIRE(!cell.series.empty());

  // Recompute the expected means from the individual runs.
  std::vector<RunResult> runs;
  for (int i = 0; i < cfg.runs_per_cell; ++i) {
    GameConfig game;
    game.n_agents = 3;
    game.lambda = 0.0;
    game.c_words = 1;
    game.seed = derive_run_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
    runs.push_back(track_run(game, {.record_series = true}));
  }
  std::uint64_t longest = 0;
  for (const RunResult& run : runs) longest = std::max(longest, run.t_conv);
  REQUIRE(cell.series.size() == longest);

  for (std::size_t slot = 0; slot < cell.series.size(); ++slot) {
    const std::uint64_t t = slot + 1;
    double nw = 0.0, nd = 0.0, s = 0.0;
    for (const RunResult& run : runs) {
      if (t <= run.t_conv) {
        const Observation& obs = run.series[slot];
        REQUIRE(obs.t == t);
        nw += static_cast<double>(obs.n_w);
        nd += static_cast<double>(obs.n_d);
        s += static_cast<double>(obs.s);
      } else {
        nw += 3.0;  // converged runs hold one word per agent from then on
        nd += 1.0;
        s += 1.0;
      }
    }
    CHECK(cell.series[slot].t == t);
    CHECK(cell.series[slot].mean_n_w == doctest::Approx(nw / cfg.runs_per_cell).epsilon(1e-12));
    CHECK(cell.series[slot].mean_n_d == doctest::Approx(nd / cfg.runs_per_cell).epsilon(1e-12));
    CHECK(cell.series[slot].mean_s == doctest::Approx(s / cfg.runs_per_cell).epsilon(1e-12));
  }
}

TEST_CASE("check_bound compares the observed mean against the slacked ceiling") {
  std::vector<SweepCell> cells;
  cells.push_back(synthetic_cell(0.0, 1, 2500.0, 300.0));
  cells[0].max_nd.mean = 50.0;  // bound 50, slack 52.5
  cells.push_back(synthetic_cell(0.0, 1, 2500.0, 300.0));
  cells[1].max_nd.mean = 53.0;
  const auto reports = check_bound(cells);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].bound_value == doctest::Approx(50.0));
  CHECK(reports[0].satisfied);
  CHECK_FALSE(reports[1].satisfied);
}

TEST_CASE("find_peak_lambda picks the grid maximum with ties toward smaller lambda") {
  std::vector<SweepCell> cells;
  cells.push_back(synthetic_cell(0.0, 1, 10.0, 5.0));
  cells.push_back(synthetic_cell(0.5, 1, 8.0, 9.0));
  cells.push_back(synthetic_cell(1.0, 1, 6.0, 7.0));
  cells.push_back(synthetic_cell(0.0, 10, 4.0, 1.0));
  cells.push_back(synthetic_cell(0.5, 10, 9.0, 1.0));
  cells.push_back(synthetic_cell(1.0, 10, 9.0, 1.0));

  CHECK(find_peak_lambda(cells, PeakStatistic::TConv, 1) == 0.0);   // decreasing curve
  CHECK(find_peak_lambda(cells, PeakStatistic::MaxNw, 1) == 0.5);   // interior peak
  CHECK(find_peak_lambda(cells, PeakStatistic::TConv, 10) == 0.5);  // tie -> smaller
  CHECK_THROWS_AS(find_peak_lambda(cells, PeakStatistic::TConv, 99), std::invalid_argument);
}

// ngsim: command-line front end for the shared-memory naming game.
// Subcommands: run (one seeded game), sweep (lambda x C grid of trials),
// bound (distinct-word ceiling, optionally checked against a sweep CSV).

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ng/experiment.hpp"
#include "ng/io.hpp"
#include "ng/metrics.hpp"
#include "ng/model.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

template <typename WriteFn>
void write_file(const std::string& path, WriteFn&& write) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
  write(os);
  os.flush();
  if (!os) throw std::runtime_error("failed while writing '" + path + "'");
}

struct RunFlags {
  int agents = 100;
  double lambda = 0.0;
  std::uint64_t shared_words = 1;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 0;
  std::uint64_t stride = 1;
  std::string miss_mode = "no-op";
  std::string series_path;
  std::string out_path;
};

int cmd_run(const RunFlags& flags) {
  ng::GameConfig config;
  config.n_agents = flags.agents;
  config.lambda = flags.lambda;
  config.c_words = flags.shared_words;
  config.seed = flags.seed;
  config.max_steps = flags.max_steps;
  config.sample_stride = flags.stride;
  config.consult_miss = ng::io::parse_consult_miss_mode(flags.miss_mode);
  config.validate();

  const ng::RunResult result =
      ng::track_run(config, {.record_series = !flags.series_path.empty()});

  if (!flags.series_path.empty())
    write_file(flags.series_path,
               [&](std::ostream& os) { ng::io::write_series_csv(os, config, result.series); });
  if (!flags.out_path.empty())
    write_file(flags.out_path,
               [&](std::ostream& os) { ng::io::write_run_summary(os, config, result); });

  if (result.converged) {
    std::cout << "converged t_conv=" << result.t_conv << " consensus_word=" << *result.consensus_word
              << " in_shared=" << (result.consensus_in_shared ? 1 : 0) << " max_nd=" << result.max_nd
              << "@" << result.t_max_nd << " max_nw=" << result.max_nw << "@" << result.t_max_nw
              << " (agents=" << config.n_agents << " lambda=" << ng::io::format_double(config.lambda)
              << " c=" << config.c_words << " seed=" << config.seed << ")\n";
    return kExitOk;
  }
  std::cout << "not converged after " << result.steps << " interactions"
            << " max_nd=" << result.max_nd << "@" << result.t_max_nd << " max_nw=" << result.max_nw
            << "@" << result.t_max_nw << "\n";
  return kExitNotConverged;
}

struct SweepFlags {
  int agents = 100;
  std::string lambda_text;
  std::string c_text;
  int runs = 1000;
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 0;
  std::uint64_t stride = 1;
  int workers = 0;
  std::string miss_mode = "no-op";
  std::string out_path;
  std::string cell_series_dir;
  std::string json_path;
};

int cmd_sweep(const SweepFlags& flags) {
  ng::SweepConfig config;
  config.n_agents = flags.agents;
  config.lambdas = ng::io::parse_lambda_list(flags.lambda_text);
  config.c_values = ng::io::parse_c_list(flags.c_text);
  config.runs_per_cell = flags.runs;
  config.master_seed = flags.seed;
  config.max_steps = flags.max_steps;
  config.sample_stride = flags.stride;
  config.workers = flags.workers;
  config.consult_miss = ng::io::parse_consult_miss_mode(flags.miss_mode);
  config.collect_series = !flags.cell_series_dir.empty();
  config.validate();

  const std::size_t total = config.lambdas.size() * config.c_values.size();
  std::size_t done = 0;
  const std::vector<ng::SweepCell> cells =
      ng::run_sweep(config, [&](const ng::SweepCell& cell) {
        ++done;
        std::cerr << "[" << done << "/" << total << "] lambda=" << ng::io::format_double(cell.lambda)
                  << " c=" << cell.c_words << " mean_t_conv=" << ng::io::format_double(cell.t_conv.mean)
                  << " non_converged=" << cell.non_converged << "\n";
      });

  write_file(flags.out_path,
             [&](std::ostream& os) { ng::io::write_sweep_csv(os, config, cells); });
  if (!flags.json_path.empty())
    write_file(flags.json_path,
               [&](std::ostream& os) { ng::io::write_sweep_json(os, config, cells); });
  if (!flags.cell_series_dir.empty()) {
    std::filesystem::create_directories(flags.cell_series_dir);
    for (const ng::SweepCell& cell : cells) {
      const std::string path = flags.cell_series_dir + "/cell_l" +
                               std::to_string(cell.lambda_index) + "_c" +
                               std::to_string(cell.c_index) + ".csv";
      write_file(path,
                 [&](std::ostream& os) { ng::io::write_cell_series_csv(os, config, cell); });
    }
  }
  std::cout << "sweep complete: " << cells.size() << " cells x " << config.runs_per_cell
            << " runs -> " << flags.out_path << "\n";
  return kExitOk;
}

struct BoundFlags {
  int agents = 100;
  bool agents_given = false;
  std::string lambda_text;
  std::string c_text;
  std::string against_path;
};

int cmd_bound(const BoundFlags& flags) {
  if (!flags.against_path.empty()) {
    std::ifstream is(flags.against_path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open sweep file '" + flags.against_path + "'");
    const ng::io::SweepFile file = ng::io::read_sweep_csv(is);
    const int n_agents = flags.agents_given ? flags.agents : file.config.n_agents;
    std::vector<ng::SweepCell> cells;
    cells.reserve(file.rows.size());
    for (const ng::io::SweepRow& row : file.rows) {
      ng::SweepCell cell;
      cell.n_agents = n_agents;
      cell.lambda = row.lambda;
      cell.c_words = row.c;
      cell.max_nd.mean = row.mean_max_nd;
      cells.push_back(cell);
    }
    std::cout << "lambda,c,n_agents,bound,observed_mean_max_nd,satisfied\n";
    for (const ng::BoundReport& report : ng::check_bound(cells)) {
      std::cout << ng::io::format_double(report.lambda) << ',' << report.c_words << ','
                << report.n_agents << ',' << ng::io::format_double(report.bound_value) << ','
                << ng::io::format_double(report.observed_mean_max_nd) << ','
                << (report.satisfied ? 1 : 0) << "\n";
    }
    return kExitOk;
  }

  if (flags.lambda_text.empty() || flags.c_text.empty())
    throw std::invalid_argument("bound needs --lambda and --shared-words (or --against)");
  const std::vector<double> lambdas = ng::io::parse_lambda_list(flags.lambda_text);
  const std::vector<std::uint64_t> c_values = ng::io::parse_c_list(flags.c_text);
  if (lambdas.size() == 1 && c_values.size() == 1) {
    std::cout << ng::io::format_double(ng::nd_upper_bound(flags.agents, lambdas[0], c_values[0]))
              << "\n";
    return kExitOk;
  }
  std::cout << "lambda,c,n_agents,bound\n";
  for (double lambda : lambdas)
    for (std::uint64_t c : c_values)
      std::cout << ng::io::format_double(lambda) << ',' << c << ',' << flags.agents << ','
                << ng::io::format_double(ng::nd_upper_bound(flags.agents, lambda, c)) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ngsim: naming game with a globally readable shared memory"};
  app.require_subcommand(1);

  RunFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "simulate one seeded game");
  run->add_option("--agents", run_flags.agents, "number of agents N");
  run->add_option("--lambda", run_flags.lambda, "shared-memory consult probability");
  run->add_option("--shared-words", run_flags.shared_words, "shared memory size C");
  run->add_option("--seed", run_flags.seed, "RNG seed");
  run->add_option("--max-steps", run_flags.max_steps, "interaction cap (0 = 1000*N)");
  run->add_option("--stride", run_flags.stride, "series sampling interval");
  run->add_option("--consult-miss-mode", run_flags.miss_mode, "no-op|collapse");
  run->add_option("--series", run_flags.series_path, "write t,n_w,n_d,s series CSV here");
  run->add_option("--out", run_flags.out_path, "write run summary here");

  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "aggregate trials over a lambda x C grid");
  sweep->add_option("--agents", sweep_flags.agents, "number of agents N");
  sweep->add_option("--lambda", sweep_flags.lambda_text, "comma list or start:stop:step range")
      ->required();
  sweep->add_option("--shared-words", sweep_flags.c_text, "comma list of C values")->required();
  sweep->add_option("--runs", sweep_flags.runs, "trials per (lambda, C) cell");
  sweep->add_option("--seed", sweep_flags.seed, "master seed");
  sweep->add_option("--max-steps", sweep_flags.max_steps, "interaction cap (0 = 1000*N)");
  sweep->add_option("--stride", sweep_flags.stride, "series sampling interval");
  sweep->add_option("--workers", sweep_flags.workers, "worker threads (0 = hardware)");
  sweep->add_option("--consult-miss-mode", sweep_flags.miss_mode, "no-op|collapse");
  sweep->add_option("--out", sweep_flags.out_path, "sweep CSV output path")->required();
  sweep->add_option("--cell-series", sweep_flags.cell_series_dir,
                    "directory for per-cell averaged series CSVs");
  sweep->add_option("--json", sweep_flags.json_path, "machine-readable summary mirroring the CSV");

  BoundFlags bound_flags;
  CLI::App* bound = app.add_subcommand("bound", "distinct-word ceiling (1-lambda)*N/2 + min(C, lambda*N/2)");
  bound->add_option("--agents", bound_flags.agents, "number of agents N")
      ->each([&](const std::string&) { bound_flags.agents_given = true; });
  bound->add_option("--lambda", bound_flags.lambda_text, "comma list or start:stop:step range");
  bound->add_option("--shared-words", bound_flags.c_text, "comma list of C values");
  bound->add_option("--against", bound_flags.against_path, "sweep CSV to check the bound against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (sweep->parsed()) return cmd_sweep(sweep_flags);
    return cmd_bound(bound_flags);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

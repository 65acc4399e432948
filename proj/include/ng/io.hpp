#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ng/experiment.hpp"
#include "ng/metrics.hpp"
#include "ng/model.hpp"

namespace ng::io {

// Shortest decimal form that parses back to the same bits (std::to_chars).
std::string format_double(double value);

std::string_view consult_miss_mode_name(ConsultMissMode mode);
ConsultMissMode parse_consult_miss_mode(std::string_view name);

// Lambda lists accept either a comma list ("0,0.25,0.5") or an inclusive
// range "start:stop:step" expanded on the decimal grid of its tokens, so
// "0:1:0.1" yields 0, 0.1, ..., 1 exactly as printed. Throws
// std::invalid_argument on malformed input.
std::vector<double> parse_lambda_list(std::string_view text);

// Comma list of shared-memory sizes, e.g. "1,5,10,50,100,500".
std::vector<std::uint64_t> parse_c_list(std::string_view text);

inline constexpr std::string_view kSweepCsvHeader =
    "lambda,c,runs,mean_t_conv,sd_t_conv,mean_max_nd,sd_max_nd,"
    "mean_t_max_nd,sd_t_max_nd,mean_max_nw,sd_max_nw,mean_t_max_nw,sd_t_max_nw,"
    "p_shared,non_converged";

// Every file starts with a "# config ..." comment carrying the resolved
// parameters (seed and mode switches included), so any output is
// self-reproducing. The writers are deterministic: identical inputs give
// byte-identical files.
void write_series_csv(std::ostream& os, const GameConfig& config,
                      std::span<const Observation> series);
void write_run_summary(std::ostream& os, const GameConfig& config, const RunResult& result);
void write_sweep_csv(std::ostream& os, const SweepConfig& config,
                     std::span<const SweepCell> cells);
void write_cell_series_csv(std::ostream& os, const SweepConfig& config, const SweepCell& cell);
void write_sweep_json(std::ostream& os, const SweepConfig& config,
                      std::span<const SweepCell> cells);

// Embedded-config parsers for the round trip output -> config -> rerun.
GameConfig parse_game_config_comment(std::istream& is);
SweepConfig parse_sweep_config_comment(std::istream& is);

// One parsed row of a sweep CSV; mirrors kSweepCsvHeader column for column.
struct SweepRow {
  double lambda = 0.0;
  std::uint64_t c = 0;
  int runs = 0;
  double mean_t_conv = 0.0, sd_t_conv = 0.0;
  double mean_max_nd = 0.0, sd_max_nd = 0.0;
  double mean_t_max_nd = 0.0, sd_t_max_nd = 0.0;
  double mean_max_nw = 0.0, sd_max_nw = 0.0;
  double mean_t_max_nw = 0.0, sd_t_max_nw = 0.0;
  double p_shared = 0.0;
  int non_converged = 0;
};

struct SweepFile {
  SweepConfig config;
  std::vector<SweepRow> rows;
};

// Reads a sweep CSV produced by write_sweep_csv (config comment, exact
// header, rows). Throws std::runtime_error on malformed content.
SweepFile read_sweep_csv(std::istream& is);

}  // namespace ng::io

#include "ng/io.hpp"

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace ng::io {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_double(std::string_view token) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::invalid_argument("not a number: '" + std::string(token) + "'");
  return value;
}

std::uint64_t parse_u64(std::string_view token) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw std::invalid_argument("not a non-negative integer: '" + std::string(token) + "'");
  return value;
}

// A decimal token as integer numerator over a power-of-ten scale, so range
// endpoints and steps combine without floating-point drift.
struct Decimal {
  std::int64_t numerator = 0;
  std::int64_t scale = 1;
};

Decimal parse_decimal(std::string_view token) {
  if (token.empty()) throw std::invalid_argument("empty number in range");
  bool negative = false;
  std::size_t i = 0;
  if (token[0] == '-') {
    negative = true;
    i = 1;
  }
  std::int64_t numerator = 0;
  std::int64_t scale = 1;
  bool seen_digit = false;
  bool seen_dot = false;
  for (; i < token.size(); ++i) {
    const char ch = token[i];
    if (ch == '.') {
      if (seen_dot) throw std::invalid_argument("malformed number: '" + std::string(token) + "'");
      seen_dot = true;
      continue;
    }
    if (ch < '0' || ch > '9')
      throw std::invalid_argument("malformed number: '" + std::string(token) + "'");
    seen_digit = true;
    numerator = numerator * 10 + (ch - '0');
    if (seen_dot) scale *= 10;
    if (scale > 1000000000000ll || numerator > (1ll << 53))
      throw std::invalid_argument("too many digits: '" + std::string(token) + "'");
  }
  if (!seen_digit) throw std::invalid_argument("malformed number: '" + std::string(token) + "'");
  return {negative ? -numerator : numerator, scale};
}

std::int64_t rescale(const Decimal& d, std::int64_t scale) {
  return d.numerator * (scale / d.scale);
}

std::vector<double> expand_range(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3)
    throw std::invalid_argument("range must be start:stop:step, got '" + std::string(text) + "'");
  const Decimal start = parse_decimal(parts[0]);
  const Decimal stop = parse_decimal(parts[1]);
  const Decimal step = parse_decimal(parts[2]);
  const std::int64_t scale = std::max({start.scale, stop.scale, step.scale});
  const std::int64_t lo = rescale(start, scale);
  const std::int64_t hi = rescale(stop, scale);
  const std::int64_t by = rescale(step, scale);
  if (by <= 0) throw std::invalid_argument("range step must be positive");
  if (hi < lo) throw std::invalid_argument("range stop is below start");
  if ((hi - lo) / by + 1 > 1000000) throw std::invalid_argument("range expands to too many values");
  std::vector<double> values;
  for (std::int64_t v = lo; v <= hi; v += by)
    values.push_back(static_cast<double>(v) / static_cast<double>(scale));
  return values;
}

void write_game_config_comment(std::ostream& os, const GameConfig& config) {
  os << "# config agents=" << config.n_agents << " lambda=" << format_double(config.lambda)
     << " c=" << config.c_words << " seed=" << config.seed
     << " max_steps=" << config.effective_max_steps() << " stride=" << config.sample_stride
     << " consult_miss_mode=" << consult_miss_mode_name(config.consult_miss) << "\n";
}

void write_sweep_config_comment(std::ostream& os, const SweepConfig& config) {
  os << "# config agents=" << config.n_agents << " lambdas=";
  for (std::size_t i = 0; i < config.lambdas.size(); ++i)
    os << (i ? "," : "") << format_double(config.lambdas[i]);
  os << " c=";
  for (std::size_t i = 0; i < config.c_values.size(); ++i)
    os << (i ? "," : "") << config.c_values[i];
  os << " runs=" << config.runs_per_cell << " seed=" << config.master_seed
     << " max_steps=" << config.effective_max_steps() << " stride=" << config.sample_stride
     << " consult_miss_mode=" << consult_miss_mode_name(config.consult_miss) << "\n";
}

// key=value tokens of the first "# config" line.
std::map<std::string, std::string, std::less<>> read_config_tokens(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("# config ", 0) != 0) {
      if (!line.empty() && line[0] == '#') continue;
      break;  // comments end before any config line was found
    }
    std::map<std::string, std::string, std::less<>> tokens;
    for (std::string_view part : split(std::string_view(line).substr(9), ' ')) {
      if (part.empty()) continue;
      const std::size_t eq = part.find('=');
      if (eq == std::string_view::npos)
        throw std::runtime_error("malformed config comment: '" + line + "'");
      tokens.emplace(std::string(part.substr(0, eq)), std::string(part.substr(eq + 1)));
    }
    return tokens;
  }
  throw std::runtime_error("no '# config' comment found");
}

std::string_view require(const std::map<std::string, std::string, std::less<>>& tokens,
                         std::string_view key) {
  const auto it = tokens.find(key);
  if (it == tokens.end())
    throw std::runtime_error("config comment is missing '" + std::string(key) + "'");
  return it->second;
}

void write_sweep_row(std::ostream& os, const SweepCell& cell) {
  os << format_double(cell.lambda) << ',' << cell.c_words << ',' << cell.runs << ','
     << format_double(cell.t_conv.mean) << ',' << format_double(cell.t_conv.sd) << ','
     << format_double(cell.max_nd.mean) << ',' << format_double(cell.max_nd.sd) << ','
     << format_double(cell.t_max_nd.mean) << ',' << format_double(cell.t_max_nd.sd) << ','
     << format_double(cell.max_nw.mean) << ',' << format_double(cell.max_nw.sd) << ','
     << format_double(cell.t_max_nw.mean) << ',' << format_double(cell.t_max_nw.sd) << ','
     << format_double(cell.p_shared) << ',' << cell.non_converged << "\n";
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string_view consult_miss_mode_name(ConsultMissMode mode) {
  return mode == ConsultMissMode::NoOp ? "no-op" : "collapse";
}

ConsultMissMode parse_consult_miss_mode(std::string_view name) {
  if (name == "no-op") return ConsultMissMode::NoOp;
  if (name == "collapse") return ConsultMissMode::Collapse;
  throw std::invalid_argument("consult-miss-mode must be 'no-op' or 'collapse', got '" +
                              std::string(name) + "'");
}

std::vector<double> parse_lambda_list(std::string_view text) {
  if (text.find(':') != std::string_view::npos) return expand_range(text);
  std::vector<double> values;
  for (std::string_view token : split(text, ',')) values.push_back(parse_double(token));
  return values;
}

std::vector<std::uint64_t> parse_c_list(std::string_view text) {
  std::vector<std::uint64_t> values;
  for (std::string_view token : split(text, ',')) values.push_back(parse_u64(token));
  return values;
}

void write_series_csv(std::ostream& os, const GameConfig& config,
                      std::span<const Observation> series) {
  os << "# ngsim run series\n";
  write_game_config_comment(os, config);
  os << "t,n_w,n_d,s\n";
  for (const Observation& obs : series)
    os << obs.t << ',' << obs.n_w << ',' << obs.n_d << ',' << obs.s << "\n";
}

void write_run_summary(std::ostream& os, const GameConfig& config, const RunResult& result) {
  os << "# ngsim run summary\n";
  write_game_config_comment(os, config);
  os << "key,value\n";
  os << "converged," << (result.converged ? 1 : 0) << "\n";
  os << "steps," << result.steps << "\n";
  if (result.converged) {
    os << "t_conv," << result.t_conv << "\n";
    os << "consensus_word," << *result.consensus_word << "\n";
    os << "consensus_in_shared," << (result.consensus_in_shared ? 1 : 0) << "\n";
  }
  os << "max_nd," << result.max_nd << "\n";
  os << "t_max_nd," << result.t_max_nd << "\n";
  os << "max_nw," << result.max_nw << "\n";
  os << "t_max_nw," << result.t_max_nw << "\n";
}

void write_sweep_csv(std::ostream& os, const SweepConfig& config,
                     std::span<const SweepCell> cells) {
  os << "# ngsim sweep\n";
  write_sweep_config_comment(os, config);
  os << kSweepCsvHeader << "\n";
  for (const SweepCell& cell : cells) write_sweep_row(os, cell);
}

void write_cell_series_csv(std::ostream& os, const SweepConfig& config, const SweepCell& cell) {
  os << "# ngsim cell series lambda=" << format_double(cell.lambda) << " c=" << cell.c_words
     << " lambda_index=" << cell.lambda_index << " c_index=" << cell.c_index << "\n";
  write_sweep_config_comment(os, config);
  os << "t,mean_n_w,mean_n_d,mean_s\n";
  for (const SeriesPoint& point : cell.series)
    os << point.t << ',' << format_double(point.mean_n_w) << ',' << format_double(point.mean_n_d)
       << ',' << format_double(point.mean_s) << "\n";
}

void write_sweep_json(std::ostream& os, const SweepConfig& config,
                      std::span<const SweepCell> cells) {
  nlohmann::ordered_json doc;
  doc["tool"] = "ngsim sweep";
  auto& cfg = doc["config"];
  cfg["agents"] = config.n_agents;
  cfg["lambdas"] = config.lambdas;
  cfg["c_values"] = config.c_values;
  cfg["runs_per_cell"] = config.runs_per_cell;
  cfg["master_seed"] = config.master_seed;
  cfg["max_steps"] = config.effective_max_steps();
  cfg["stride"] = config.sample_stride;
  cfg["consult_miss_mode"] = std::string(consult_miss_mode_name(config.consult_miss));

  doc["cells"] = nlohmann::ordered_json::array();
  for (const SweepCell& cell : cells) {
    nlohmann::ordered_json row;
    row["lambda_index"] = cell.lambda_index;
    row["c_index"] = cell.c_index;
    row["lambda"] = cell.lambda;
    row["c"] = cell.c_words;
    row["runs"] = cell.runs;
    row["non_converged"] = cell.non_converged;
    row["mean_t_conv"] = cell.t_conv.mean;
    row["sd_t_conv"] = cell.t_conv.sd;
    row["mean_max_nd"] = cell.max_nd.mean;
    row["sd_max_nd"] = cell.max_nd.sd;
    row["mean_t_max_nd"] = cell.t_max_nd.mean;
    row["sd_t_max_nd"] = cell.t_max_nd.sd;
    row["mean_max_nw"] = cell.max_nw.mean;
    row["sd_max_nw"] = cell.max_nw.sd;
    row["mean_t_max_nw"] = cell.t_max_nw.mean;
    row["sd_t_max_nw"] = cell.t_max_nw.sd;
    row["p_shared"] = cell.p_shared;
    doc["cells"].push_back(std::move(row));
  }

  if (config.lambdas.size() >= 3) {
    auto& peaks = doc["peak_lambda"];
    peaks["t_conv"] = nlohmann::ordered_json::array();
    peaks["max_nw"] = nlohmann::ordered_json::array();
    for (std::uint64_t c : config.c_values) {
      peaks["t_conv"].push_back(
          {{"c", c}, {"lambda_p", find_peak_lambda(cells, PeakStatistic::TConv, c)}});
      peaks["max_nw"].push_back(
          {{"c", c}, {"lambda_p", find_peak_lambda(cells, PeakStatistic::MaxNw, c)}});
    }
  }
  os << doc.dump(2) << "\n";
}

GameConfig parse_game_config_comment(std::istream& is) {
  const auto tokens = read_config_tokens(is);
  GameConfig config;
  config.n_agents = static_cast<int>(parse_u64(require(tokens, "agents")));
  config.lambda = parse_double(require(tokens, "lambda"));
  config.c_words = parse_u64(require(tokens, "c"));
  config.seed = parse_u64(require(tokens, "seed"));
  config.max_steps = parse_u64(require(tokens, "max_steps"));
  config.sample_stride = parse_u64(require(tokens, "stride"));
  config.consult_miss = parse_consult_miss_mode(require(tokens, "consult_miss_mode"));
  return config;
}

SweepConfig parse_sweep_config_comment(std::istream& is) {
  const auto tokens = read_config_tokens(is);
  SweepConfig config;
  config.n_agents = static_cast<int>(parse_u64(require(tokens, "agents")));
  config.lambdas = parse_lambda_list(require(tokens, "lambdas"));
  config.c_values = parse_c_list(require(tokens, "c"));
  config.runs_per_cell = static_cast<int>(parse_u64(require(tokens, "runs")));
  config.master_seed = parse_u64(require(tokens, "seed"));
  config.max_steps = parse_u64(require(tokens, "max_steps"));
  config.sample_stride = parse_u64(require(tokens, "stride"));
  config.consult_miss = parse_consult_miss_mode(require(tokens, "consult_miss_mode"));
  return config;
}

SweepFile read_sweep_csv(std::istream& is) {
  SweepFile file;
  file.config = parse_sweep_config_comment(is);
  std::string line;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kSweepCsvHeader)
        throw std::runtime_error("unexpected sweep CSV header: '" + line + "'");
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() != 15)
      throw std::runtime_error("sweep CSV row has " + std::to_string(fields.size()) +
                               " fields, expected 15");
    SweepRow row;
    row.lambda = parse_double(fields[0]);
    row.c = parse_u64(fields[1]);
    row.runs = static_cast<int>(parse_u64(fields[2]));
    row.mean_t_conv = parse_double(fields[3]);
    row.sd_t_conv = parse_double(fields[4]);
    row.mean_max_nd = parse_double(fields[5]);
    row.sd_max_nd = parse_double(fields[6]);
    row.mean_t_max_nd = parse_double(fields[7]);
    row.sd_t_max_nd = parse_double(fields[8]);
    row.mean_max_nw = parse_double(fields[9]);
    row.sd_max_nw = parse_double(fields[10]);
    row.mean_t_max_nw = parse_double(fields[11]);
    row.sd_t_max_nw = parse_double(fields[12]);
    row.p_shared = parse_double(fields[13]);
    row.non_converged = static_cast<int>(parse_u64(fields[14]));
    file.rows.push_back(row);
  }
  if (!header_seen) throw std::runtime_error("sweep CSV has no header row");
  return file;
}

}  // namespace ng::io

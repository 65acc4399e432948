#include "ng/metrics.hpp"

#include <unordered_set>

namespace ng {

std::uint64_t compute_nw(const GameState& state) {
  std::uint64_t total = 0;
  for (int a = 0; a < state.n_agents(); ++a) total += state.memory(a).size();
  return total;
}

std::uint64_t compute_nd(const GameState& state) {
  std::unordered_set<WordId> words;
  for (int a = 0; a < state.n_agents(); ++a)
    for (WordId w : state.memory(a)) words.insert(w);
  return words.size();
}

bool is_converged(const GameState& state) {
  const auto first = state.memory(0);
  if (first.size() != 1) return false;
  for (int a = 1; a < state.n_agents(); ++a) {
    const auto memory = state.memory(a);
    if (memory.size() != 1 || memory[0] != first[0]) return false;
  }
  return true;
}

Observation observe(const GameState& state, const StepOutcome& last_outcome) {
  return Observation{state.time(), compute_nw(state), compute_nd(state),
                     last_outcome.success ? 1 : 0};
}

RunResult track_run(const GameConfig& config, const TrackOptions& options) {
  config.validate();
  GameState state(config);
  WordCensus census;
  RunResult result;

  const std::uint64_t limit = config.effective_max_steps();
  const std::uint64_t stride = config.sample_stride;
  const auto n = static_cast<std::uint64_t>(config.n_agents);
  MemoryDelta delta;

  for (std::uint64_t t = 1; t <= limit; ++t) {
    delta.clear();
    const StepOutcome out = negotiate_step(state, &delta);
    census.apply(delta);

    const std::uint64_t nw = census.n_w();
    const std::uint64_t nd = census.n_d();
    if (nw > result.max_nw) {
      result.max_nw = nw;
      result.t_max_nw = t;
    }
    if (nd > result.max_nd) {
      result.max_nd = nd;
      result.t_max_nd = t;
    }

    const bool done = (nd == 1 && nw == n);
    if (options.record_series && (t % stride == 0 || done))
      result.series.push_back(Observation{t, nw, nd, out.success ? 1 : 0});

    if (done) {
      result.converged = true;
      result.t_conv = t;
      result.steps = t;
      result.consensus_word = state.memory(0)[0];
      result.consensus_in_shared = state.shared().contains(*result.consensus_word);
      return result;
    }
  }
  result.steps = limit;
  return result;
}

}  // namespace ng

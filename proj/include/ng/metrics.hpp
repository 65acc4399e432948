#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ng/model.hpp"

namespace ng {

// One sampled point of the three observables: total word count over all
// local memories, distinct word count, and the success indicator of the
// interaction at time t.
struct Observation {
  std::uint64_t t = 0;
  std::uint64_t n_w = 0;
  std::uint64_t n_d = 0;
  int s = 0;  // 0 or 1

  friend bool operator==(const Observation&, const Observation&) = default;
};

// Per-trial summary. Consensus fields are meaningful only when converged.
struct RunResult {
  bool converged = false;
  std::uint64_t t_conv = 0;   // valid when converged
  std::uint64_t steps = 0;    // interactions actually executed
  std::optional<WordId> consensus_word;
  bool consensus_in_shared = false;
  std::uint64_t max_nd = 0;
  std::uint64_t t_max_nd = 0;  // first time max_nd was attained
  std::uint64_t max_nw = 0;
  std::uint64_t t_max_nw = 0;
  std::vector<Observation> series;  // strided; empty unless requested
};

// Total word count: sum of local memory sizes.
std::uint64_t compute_nw(const GameState& state);

// Distinct word count: cardinality of the union of all local memories.
// Shared-memory words do not count until some agent holds them.
std::uint64_t compute_nd(const GameState& state);

// True iff every agent holds exactly one word and all those words are equal
// (equivalently n_w = N and n_d = 1).
bool is_converged(const GameState& state);

// Observation at the state's current time, via direct recomputation.
Observation observe(const GameState& state, const StepOutcome& last_outcome);

// Reference-counted multiset of the words held by agents. Fed with the
// MemoryDelta of each step it keeps n_w and n_d in O(delta) and must agree
// exactly with compute_nw/compute_nd at every instant.
class WordCensus {
 public:
  WordCensus() { counts_.reserve(64); }

  void add(WordId w) {
    ++total_;
    ++counts_[w];
  }

  void remove(WordId w) {
    auto it = counts_.find(w);
    --total_;
    if (--(it->second) == 0) counts_.erase(it);
  }

  void apply(const MemoryDelta& delta) {
    for (WordId w : delta.added) add(w);
    for (WordId w : delta.removed) remove(w);
  }

  std::uint64_t n_w() const { return total_; }
  std::uint64_t n_d() const { return counts_.size(); }

 private:
  std::unordered_map<WordId, std::uint32_t> counts_;
  std::uint64_t total_ = 0;
};

struct TrackOptions {
  bool record_series = false;
};

// Runs negotiate_step until convergence or the step cap, tracking running
// maxima of n_w and n_d (ties resolved to the earliest time) and, when
// requested, the strided Observation series. The final observation of a
// converged run is always recorded, even off-stride. Hitting the cap without
// convergence is reported via converged = false, not an error.
RunResult track_run(const GameConfig& config, const TrackOptions& options = {});

}  // namespace ng

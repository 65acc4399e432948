#pragma once

// Deliberately plain second implementation of the negotiation rules, used as
// an independent oracle for the main engine. Nothing is shared with the
// library path: std::set memories, std:: distribution templates, per-step
// direct recomputation of the observables.

#include <algorithm>
#include <cstdint>
#include <random>
#include <set>
#include <vector>

namespace ref {

struct Result {
  bool converged = false;
  std::uint64_t t_conv = 0;
  bool consensus_in_shared = false;
  std::uint64_t max_nd = 0;
  std::uint64_t max_nw = 0;
};

inline Result run(int n_agents, double lambda, std::uint64_t c_words, std::uint64_t seed,
                  std::uint64_t max_steps) {
  std::mt19937_64 rng(seed);
  std::vector<std::set<std::uint64_t>> memory(static_cast<std::size_t>(n_agents));
  std::uint64_t next_word = c_words;
  std::uniform_int_distribution<int> agent_dist(0, n_agents - 1);
  std::bernoulli_distribution consult(lambda);
  std::uniform_int_distribution<std::uint64_t> shared_dist(0, c_words - 1);

  Result result;
  for (std::uint64_t t = 1; t <= max_steps; ++t) {
    // Two distinct agents, speaker then hearer.
    const int speaker = agent_dist(rng);
    int hearer = agent_dist(rng);
    while (hearer == speaker) hearer = agent_dist(rng);
    auto& speaker_memory = memory[static_cast<std::size_t>(speaker)];
    auto& hearer_memory = memory[static_cast<std::size_t>(hearer)];

    // The speaker picks a word from its memory; if empty, it takes one from
    // the shared memory with probability lambda, otherwise invents one. The
    // chosen word always ends up in the speaker's memory.
    std::uint64_t word;
    if (speaker_memory.empty()) {
      word = consult(rng) ? shared_dist(rng) : next_word++;
      speaker_memory.insert(word);
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, speaker_memory.size() - 1);
      auto it = speaker_memory.begin();
      std::advance(it, pick(rng));
      word = *it;
    }

    if (hearer_memory.count(word) == 0) {
      // Failure: the hearer adds the transmitted word.
      hearer_memory.insert(word);
    } else {
      // Success. With probability lambda both agents consult the shared
      // memory and prune only if the word is in it; otherwise they prune
      // unconditionally.
      if (consult(rng)) {
        if (word < c_words) {
          speaker_memory = {word};
          hearer_memory = {word};
        }
      } else {
        speaker_memory = {word};
        hearer_memory = {word};
      }
    }

    // Direct observables.
    std::set<std::uint64_t> all_words;
    std::uint64_t total = 0;
    for (const auto& m : memory) {
      total += m.size();
      all_words.insert(m.begin(), m.end());
    }
    result.max_nd = std::max(result.max_nd, static_cast<std::uint64_t>(all_words.size()));
    result.max_nw = std::max(result.max_nw, total);

    bool converged = all_words.size() == 1 && total == static_cast<std::uint64_t>(n_agents);
    if (converged) {
      result.converged = true;
      result.t_conv = t;
      result.consensus_in_shared = *memory[0].begin() < c_words;
      return result;
    }
  }
  return result;
}

}  // namespace ref

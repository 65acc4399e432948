#include "ng/model.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>
#include <string>

namespace ng {

namespace {

bool contains(const std::vector<WordId>& memory, WordId w) {
  return std::find(memory.begin(), memory.end(), w) != memory.end();
}

}  // namespace

void GameConfig::validate() const {
  if (n_agents < 2)
    throw std::invalid_argument("n_agents: a pairwise game needs at least 2 agents, got " +
                                std::to_string(n_agents));
  if (c_words < 1)
    throw std::invalid_argument("c_words: the shared memory holds at least 1 word, got 0");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda: must lie in [0, 1], got " + std::to_string(lambda));
  if (sample_stride < 1)
    throw std::invalid_argument("sample_stride: must be >= 1, got 0");
}

std::uint64_t GameConfig::effective_max_steps() const {
  return max_steps != 0 ? max_steps : 1000ull * static_cast<std::uint64_t>(n_agents);
}

GameState::GameState(const GameConfig& config)
    : cfg_(config),
      shared_(config.c_words),
      t_(0),
      next_invented_(config.c_words),
      rng_(config.seed) {
  cfg_.validate();
  agents_.resize(static_cast<std::size_t>(cfg_.n_agents));
}

GameState::GameState(const GameConfig& config, std::vector<std::vector<WordId>> memories,
                     WordId next_invented_id)
    : cfg_(config),
      shared_(config.c_words),
      agents_(std::move(memories)),
      t_(0),
      next_invented_(next_invented_id),
      rng_(config.seed) {
  cfg_.validate();
  if (agents_.size() != static_cast<std::size_t>(cfg_.n_agents))
    throw std::invalid_argument("memories: expected exactly one memory per agent");
  if (next_invented_ < cfg_.c_words)
    throw std::invalid_argument("next_invented_id: must be >= c_words");
  for (const auto& memory : agents_) {
    for (std::size_t i = 0; i < memory.size(); ++i) {
      if (memory[i] >= next_invented_)
        throw std::invalid_argument("memories: word id beyond the invention counter");
      for (std::size_t j = i + 1; j < memory.size(); ++j)
        if (memory[i] == memory[j])
          throw std::invalid_argument("memories: duplicate word within one memory");
    }
  }
}

void GameState::collapse_to(int agent, WordId word, MemoryDelta* delta) {
  auto& memory = agents_[static_cast<std::size_t>(agent)];
  assert(contains(memory, word));
  if (delta) {
    for (WordId w : memory)
      if (w != word) delta->removed.push_back(w);
  }
  memory.assign(1, word);
}

GameState new_game(const GameConfig& config) { return GameState(config); }

std::pair<int, int> select_pair(GameState& state) {
  const auto n = static_cast<std::uint64_t>(state.n_agents());
  const int speaker = static_cast<int>(state.rng_.bounded(n));
  int hearer = static_cast<int>(state.rng_.bounded(n - 1));
  if (hearer >= speaker) ++hearer;
  return {speaker, hearer};
}

WordId invent_word(GameState& state) { return state.next_invented_++; }

SpeakerChoice speaker_select_word(GameState& state, int speaker, MemoryDelta* delta) {
  auto& memory = state.agents_[static_cast<std::size_t>(speaker)];
  if (!memory.empty())
    return {memory[state.rng_.bounded(memory.size())], WordSource::OwnMemory};

  WordId word;
  WordSource source;
  if (state.rng_.bernoulli(state.cfg_.lambda)) {
    word = state.shared_.pick_uniform(state.rng_);
    source = WordSource::SharedMemory;
  } else {
    word = invent_word(state);
    source = WordSource::Invented;
  }
  memory.push_back(word);
  if (delta) delta->added.push_back(word);
  return {word, source};
}

StepOutcome negotiate_between(GameState& state, int speaker, int hearer, MemoryDelta* delta) {
  assert(speaker != hearer);
  StepOutcome out;
  out.speaker = speaker;
  out.hearer = hearer;

  const SpeakerChoice choice = speaker_select_word(state, speaker, delta);
  out.word = choice.word;
  out.speaker_source = choice.source;

  auto& hearer_memory = state.agents_[static_cast<std::size_t>(hearer)];
  if (!contains(hearer_memory, out.word)) {
    // Failure: the hearer learns the transmitted word.
    hearer_memory.push_back(out.word);
    if (delta) delta->added.push_back(out.word);
  } else {
    out.success = true;
    if (state.rng_.bernoulli(state.cfg_.lambda)) {
      // One joint consult for both agents; the collapse is conditional on
      // the transmitted word actually being in the shared memory.
      out.consulted_shared = true;
      if (state.shared_.contains(out.word) ||
          state.cfg_.consult_miss == ConsultMissMode::Collapse) {
        state.collapse_to(speaker, out.word, delta);
        state.collapse_to(hearer, out.word, delta);
        out.collapse_applied = true;
      }
    } else {
      state.collapse_to(speaker, out.word, delta);
      state.collapse_to(hearer, out.word, delta);
      out.collapse_applied = true;
    }
  }
  ++state.t_;
  return out;
}

StepOutcome negotiate_step(GameState& state, MemoryDelta* delta) {
  const auto [speaker, hearer] = select_pair(state);
  return negotiate_between(state, speaker, hearer, delta);
}

}  // namespace ng

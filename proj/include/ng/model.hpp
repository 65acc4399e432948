#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ng/rng.hpp"

namespace ng {

// Opaque word token. The shared memory owns ids 0..C-1; invented words are
// minted from a strictly increasing counter that starts at C, so no two
// inventions in a run ever share an id and no invention collides with a
// shared word.
using WordId = std::uint64_t;

// Where the speaker's transmitted word came from. SharedMemory and Invented
// can only occur when the speaker's memory was empty before the step.
enum class WordSource { OwnMemory, SharedMemory, Invented };

// What a successful negotiation does when the agents consult the shared
// memory and the transmitted word is not in it: NoOp leaves both memories
// untouched (default); Collapse prunes them as if the word had been found.
enum class ConsultMissMode { NoOp, Collapse };

struct GameConfig {
  int n_agents = 100;
  double lambda = 0.0;            // probability of consulting the shared memory
  std::uint64_t c_words = 1;      // size of the shared memory
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 0;    // interaction cap; 0 = 1000 * n_agents
  std::uint64_t sample_stride = 1;
  ConsultMissMode consult_miss = ConsultMissMode::NoOp;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  std::uint64_t effective_max_steps() const;
};

// The immutable external vocabulary: exactly `size()` distinct words with ids
// 0..size()-1, fixed before the game starts. Agents have read access only.
class SharedMemory {
 public:
  explicit SharedMemory(std::uint64_t c_words) : c_(c_words) {}

  std::uint64_t size() const { return c_; }
  bool contains(WordId w) const { return w < c_; }
  WordId pick_uniform(Xoshiro256ss& rng) const { return rng.bounded(c_); }

 private:
  std::uint64_t c_;
};

// Record of one pairwise interaction.
struct StepOutcome {
  int speaker = 0;
  int hearer = 0;
  WordId word = 0;
  bool success = false;
  WordSource speaker_source = WordSource::OwnMemory;
  bool consulted_shared = false;
  bool collapse_applied = false;   // implies success

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

struct SpeakerChoice {
  WordId word = 0;
  WordSource source = WordSource::OwnMemory;
};

// Words added to / removed from agent memories by one step. Lets observers
// maintain word counts incrementally in O(touched memory sizes).
struct MemoryDelta {
  std::vector<WordId> added;
  std::vector<WordId> removed;

  void clear() {
    added.clear();
    removed.clear();
  }
};

// Full state of one game: N agent memories, the shared memory, the
// interaction counter, the invention counter and the RNG. Confined to one
// thread at a time; copyable, so a state can be snapshotted and replayed.
class GameState {
 public:
  explicit GameState(const GameConfig& config);

  // Snapshot restore: explicit memories and invention counter. Memories must
  // be duplicate-free with every id below `next_invented_id`, which in turn
  // must be at least c_words. The RNG restarts from config.seed.
  GameState(const GameConfig& config, std::vector<std::vector<WordId>> memories,
            WordId next_invented_id);

  const GameConfig& config() const { return cfg_; }
  int n_agents() const { return static_cast<int>(agents_.size()); }
  std::uint64_t time() const { return t_; }
  const SharedMemory& shared() const { return shared_; }
  std::span<const WordId> memory(int agent) const {
    return agents_[static_cast<std::size_t>(agent)];
  }
  WordId next_invented_id() const { return next_invented_; }

 private:
  void collapse_to(int agent, WordId word, MemoryDelta* delta);

  friend std::pair<int, int> select_pair(GameState&);
  friend SpeakerChoice speaker_select_word(GameState&, int, MemoryDelta*);
  friend WordId invent_word(GameState&);
  friend StepOutcome negotiate_between(GameState&, int, int, MemoryDelta*);

  GameConfig cfg_;
  SharedMemory shared_;
  std::vector<std::vector<WordId>> agents_;
  std::uint64_t t_ = 0;
  WordId next_invented_ = 0;
  Xoshiro256ss rng_;
};

// Fresh game: all local memories empty, t = 0, inventions start at c_words.
GameState new_game(const GameConfig& config);

// Uniform ordered pair of distinct agent indices (speaker, hearer).
std::pair<int, int> select_pair(GameState& state);

// The speaker's word choice. Non-empty memory: uniform pick, no mutation.
// Empty memory: with probability lambda a uniform shared-memory word, else a
// fresh invention; either way the word is added to the speaker's memory.
SpeakerChoice speaker_select_word(GameState& state, int speaker,
                                  MemoryDelta* delta = nullptr);

// Mints the next invented word id.
WordId invent_word(GameState& state);

// One negotiation between fixed roles; advances t by 1. Failure appends the
// word to the hearer's memory. Success draws one joint Bernoulli(lambda):
// on the consult branch both memories collapse to {word} only if the shared
// memory contains it (see ConsultMissMode); otherwise they collapse
// unconditionally.
StepOutcome negotiate_between(GameState& state, int speaker, int hearer,
                              MemoryDelta* delta = nullptr);

// select_pair + negotiate_between: exactly one interaction.
StepOutcome negotiate_step(GameState& state, MemoryDelta* delta = nullptr);

}  // namespace ng

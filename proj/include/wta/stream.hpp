#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wta {

// Raised when the controller is asked to act after the answer was emitted.
struct ProtocolExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct WordEvent {
  std::string word;
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const WordEvent&) const = default;
};

enum class AnchorKind { state_update, pause_filler };

enum class DeltaKind { assign, add };

// One evidence update carried by an anchor word. `answer_after` is the answer
// the item would have if the stream ended right after this update; the final
// delta's answer_after is the gold answer.
struct StateDelta {
  DeltaKind kind = DeltaKind::assign;
  std::string slot;
  std::string value;
  double amount = 0.0;
  std::string answer_after;

  bool operator==(const StateDelta&) const = default;
};

struct AnchorEvent {
  std::size_t word_index = 0;
  int tick = 0;  // upward-snapped grid index of the anchor word's end time
  AnchorKind kind = AnchorKind::state_update;
  std::optional<StateDelta> state_delta;  // empty for pause_filler

  bool operator==(const AnchorEvent&) const = default;
};

// The simulated timed speech stream: timestamped words, evidence anchors, the
// endpoint, and the decision grid. Immutable after construction.
struct StreamTimeline {
  std::vector<WordEvent> words;
  std::vector<AnchorEvent> anchors;
  double endpoint_s = 0.0;
  double tick_s = 0.5;
  double min_window_s = 2.0;
  int n_pre_ticks = 0;  // pre-endpoint decision ticks: 0 .. n_pre_ticks-1
};

// Controller phases. The tick whose grid time first reaches the endpoint is
// the start of the final-think phase, not a listening tick.
enum class Phase { listening, final_think, answering, done };

enum class ActionKind { wait, think, answer };

struct Action {
  ActionKind kind = ActionKind::wait;
  std::string text;
  int tokens = 0;  // whitespace token count of text

  static Action make_wait();
  static Action make_think(std::string text);
  static Action make_answer(std::string text);

  bool operator==(const Action&) const = default;
};

// o_k: the word prefix heard so far plus the committed think memory.
struct Observation {
  std::vector<WordEvent> prefix_words;
  std::vector<std::string> memory;
  int tick = 0;
  bool endpoint_reached = false;

  bool operator==(const Observation&) const = default;

  // Exact byte encoding, used by the replay/incremental equivalence checks.
  std::string canonical_bytes() const;
};

// Smallest k with k*tick_s >= t. Throws std::invalid_argument on negative t
// or non-positive tick_s.
int snap_to_grid(double t, double tick_s);

// Validates invariants and fills endpoint_s / n_pre_ticks / anchor ticks.
StreamTimeline make_timeline(std::vector<WordEvent> words, std::vector<AnchorEvent> anchors,
                             double tick_s = 0.5, double min_window_s = 2.0);

// Seconds of stream visible at a tick: max(tick*tick_s, min_window_s),
// clamped to the endpoint. At or past the endpoint the whole stream.
double prefix_cover_s(const StreamTimeline& timeline, int tick);

std::vector<ActionKind> legal_actions(const StreamTimeline& timeline, int tick, Phase phase);

// Full-prefix-replay observation builder.
Observation observe_replay(const StreamTimeline& timeline, int tick,
                           const std::vector<std::string>& memory);

// Incremental observation state: words arrive once and are appended to a
// persistent cache; wait actions never touch the committed memory.
struct ObservationCache {
  double tick_s = 0.5;
  double min_window_s = 2.0;
  double endpoint_s = 0.0;
  int n_pre_ticks = 0;
  int next_tick = 0;
  std::vector<WordEvent> words;
  std::vector<std::string> memory;

  static ObservationCache for_timeline(const StreamTimeline& timeline);
};

// Commits the previous tick's action (if any), appends newly arrived words,
// and observes at the cache's current tick. Observation content is identical
// to observe_replay at the same tick and memory. Out-of-order word appends
// throw std::runtime_error.
std::pair<ObservationCache, Observation> observe_incremental(
    ObservationCache cache, const std::vector<WordEvent>& new_words,
    const std::optional<Action>& committed);

// Words that become visible at `tick` but were not visible at `tick - 1`.
std::vector<WordEvent> words_arriving_at(const StreamTimeline& timeline, int tick);

}  // namespace wta

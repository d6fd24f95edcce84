#pragma once

#include <string>
#include <vector>

#include "wta/datagen.hpp"
#include "wta/rng.hpp"
#include "wta/stream.hpp"
#include "wta/text.hpp"
#include "wta/trace.hpp"

namespace wta::test {

// Words with fixed 0.4s durations: "a b c" -> a@[0,0.4), b@[0.4,0.8), ...
inline std::vector<WordEvent> words_even(const std::string& text, double dur = 0.4) {
  std::vector<WordEvent> out;
  double t = 0.0;
  for (const auto& w : tokenize(text)) {
    out.push_back({w, t, t + dur});
    t += dur;
  }
  return out;
}

inline AnchorEvent update_anchor(std::size_t word_index, std::string slot, std::string value,
                                 std::string answer_after, DeltaKind kind = DeltaKind::assign,
                                 double amount = 0.0) {
  AnchorEvent a;
  a.word_index = word_index;
  a.kind = AnchorKind::state_update;
  StateDelta d;
  d.kind = kind;
  d.slot = std::move(slot);
  d.value = std::move(value);
  d.amount = amount;
  d.answer_after = std::move(answer_after);
  a.state_delta = std::move(d);
  return a;
}

// A plain timeline with n words and no anchors; endpoint n*0.4s.
inline StreamTimeline plain_timeline(int n_words, double dur = 0.4, double tick_s = 0.5) {
  std::vector<WordEvent> words;
  double t = 0.0;
  for (int i = 0; i < n_words; ++i) {
    words.push_back({"w" + std::to_string(i), t, t + dur});
    t += dur;
  }
  return make_timeline(std::move(words), {}, tick_s);
}

// Random timelines for property tests: random word count/durations, a few
// state-update anchors with distinct ticks, occasional pause fillers.
inline StreamTimeline random_timeline(Rng& rng) {
  const int n_words = rng.uniform_int(8, 40);
  std::vector<WordEvent> words;
  double t = 0.0;
  for (int i = 0; i < n_words; ++i) {
    const double d = rng.uniform_int(200, 500) / 1000.0;
    words.push_back({"w" + std::to_string(i), t, t + d});
    t += d;
  }
  std::vector<AnchorEvent> anchors;
  const int n_anchors = rng.uniform_int(0, std::min(4, n_words / 3));
  int word_at = 1;
  for (int i = 0; i < n_anchors && word_at < n_words - 3; ++i) {
    AnchorEvent a;
    a.word_index = static_cast<std::size_t>(word_at);
    if (rng.uniform() < 0.25) {
      a.kind = AnchorKind::pause_filler;
    } else {
      a.kind = AnchorKind::state_update;
      StateDelta d;
      d.kind = DeltaKind::add;
      d.slot = "total";
      d.amount = rng.uniform_int(1, 9);
      d.value = format_number(d.amount);
      d.answer_after = format_number(d.amount);
      a.state_delta = std::move(d);
    }
    anchors.push_back(std::move(a));
    word_at += rng.uniform_int(3, 6);
  }
  return make_timeline(std::move(words), std::move(anchors));
}

// A structurally valid trajectory covering every listening tick, with random
// wait/think placement and short think texts.
inline Trajectory random_valid_trajectory(const StreamTimeline& tl, Rng& rng) {
  Trajectory traj;
  for (int k = 0; k < tl.n_pre_ticks; ++k) {
    if (rng.uniform() < 0.3) {
      traj.steps.push_back({k, Action::make_think("note " + std::to_string(rng.uniform_int(0, 99)))});
    } else {
      traj.steps.push_back({k, Action::make_wait()});
    }
  }
  traj.final_think = Action::make_think("final answer " + std::to_string(rng.uniform_int(0, 99)));
  traj.answer = Action::make_answer(std::to_string(rng.uniform_int(0, 99)));
  return traj;
}

}  // namespace wta::test

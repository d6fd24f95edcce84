#include "wta/stream.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "wta/text.hpp"

namespace wta {

namespace {

constexpr double kTimeEps = 1e-9;

void append_double(std::string& out, double v) {
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  out.append(buf, ptr);
}

}  // namespace

Action Action::make_wait() { return Action{ActionKind::wait, {}, 0}; }

Action Action::make_think(std::string text) {
  Action a;
  a.kind = ActionKind::think;
  a.tokens = token_count(text);
  a.text = std::move(text);
  return a;
}

Action Action::make_answer(std::string text) {
  Action a;
  a.kind = ActionKind::answer;
  a.tokens = token_count(text);
  a.text = std::move(text);
  return a;
}

int snap_to_grid(double t, double tick_s) {
  if (t < 0.0) throw std::invalid_argument("snap_to_grid: negative time");
  if (tick_s <= 0.0) throw std::invalid_argument("snap_to_grid: non-positive tick");
  int k = static_cast<int>(std::ceil(t / tick_s));
  // Guard against floating-point noise around exact grid multiples.
  while (k > 0 && static_cast<double>(k - 1) * tick_s >= t) --k;
  while (static_cast<double>(k) * tick_s < t) ++k;
  return k;
}

StreamTimeline make_timeline(std::vector<WordEvent> words, std::vector<AnchorEvent> anchors,
                             double tick_s, double min_window_s) {
  if (words.empty()) throw std::invalid_argument("timeline: no words");
  if (tick_s <= 0.0) throw std::invalid_argument("timeline: non-positive tick");
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& w = words[i];
    if (w.start_s < 0.0 || w.end_s <= w.start_s)
      throw std::invalid_argument("timeline: bad word span");
    if (i > 0 && w.start_s < words[i - 1].end_s - kTimeEps)
      throw std::invalid_argument("timeline: overlapping words");
  }
  StreamTimeline tl;
  tl.endpoint_s = words.back().end_s;
  tl.tick_s = tick_s;
  tl.min_window_s = min_window_s;
  tl.n_pre_ticks = snap_to_grid(tl.endpoint_s, tick_s);
  for (auto& a : anchors) {
    if (a.word_index >= words.size())
      throw std::invalid_argument("timeline: anchor word index out of range");
    a.tick = snap_to_grid(words[a.word_index].end_s, tick_s);
    if (a.kind == AnchorKind::state_update && (!a.state_delta || a.state_delta->slot.empty()))
      throw std::invalid_argument("timeline: state_update anchor without delta");
  }
  std::sort(anchors.begin(), anchors.end(),
            [](const AnchorEvent& x, const AnchorEvent& y) { return x.word_index < y.word_index; });
  tl.words = std::move(words);
  tl.anchors = std::move(anchors);
  return tl;
}

double prefix_cover_s(const StreamTimeline& timeline, int tick) {
  if (tick >= timeline.n_pre_ticks) return timeline.endpoint_s;
  const double cover =
      std::max(static_cast<double>(tick) * timeline.tick_s, timeline.min_window_s);
  return std::min(cover, timeline.endpoint_s);
}

std::vector<ActionKind> legal_actions(const StreamTimeline& timeline, int tick, Phase phase) {
  if (tick < 0) throw std::invalid_argument("legal_actions: negative tick");
  (void)timeline;
  switch (phase) {
    case Phase::listening:
      return {ActionKind::wait, ActionKind::think};
    case Phase::final_think:
      return {ActionKind::think};
    case Phase::answering:
      return {ActionKind::answer};
    case Phase::done:
      break;
  }
  throw ProtocolExhausted("legal_actions: trajectory already answered");
}

Observation observe_replay(const StreamTimeline& timeline, int tick,
                           const std::vector<std::string>& memory) {
  if (tick < 0) throw std::invalid_argument("observe_replay: negative tick");
  Observation obs;
  obs.tick = tick;
  obs.endpoint_reached = tick >= timeline.n_pre_ticks;
  const double cover = prefix_cover_s(timeline, tick);
  for (const auto& w : timeline.words) {
    if (w.end_s <= cover + kTimeEps) obs.prefix_words.push_back(w);
  }
  obs.memory = memory;
  return obs;
}

std::string Observation::canonical_bytes() const {
  std::string out = "tick=";
  out += std::to_string(tick);
  out += ";end=";
  out += endpoint_reached ? '1' : '0';
  out += ";words=";
  for (const auto& w : prefix_words) {
    out += std::to_string(w.word.size());
    out += ':';
    out += w.word;
    out += '@';
    append_double(out, w.start_s);
    out += '-';
    append_double(out, w.end_s);
    out += '|';
  }
  out += ";memory=";
  for (const auto& m : memory) {
    out += std::to_string(m.size());
    out += ':';
    out += m;
    out += '|';
  }
  return out;
}

ObservationCache ObservationCache::for_timeline(const StreamTimeline& timeline) {
  ObservationCache c;
  c.tick_s = timeline.tick_s;
  c.min_window_s = timeline.min_window_s;
  c.endpoint_s = timeline.endpoint_s;
  c.n_pre_ticks = timeline.n_pre_ticks;
  return c;
}

std::pair<ObservationCache, Observation> observe_incremental(
    ObservationCache cache, const std::vector<WordEvent>& new_words,
    const std::optional<Action>& committed) {
  if (committed && committed->kind == ActionKind::think) {
    cache.memory.push_back(committed->text);
  }
  for (const auto& w : new_words) {
    if (!cache.words.empty() && w.start_s < cache.words.back().end_s - kTimeEps)
      throw std::runtime_error("observe_incremental: out-of-order word append");
    cache.words.push_back(w);
  }
  Observation obs;
  obs.tick = cache.next_tick;
  obs.endpoint_reached = cache.next_tick >= cache.n_pre_ticks;
  double cover = cache.endpoint_s;
  if (cache.next_tick < cache.n_pre_ticks) {
    cover = std::min(std::max(static_cast<double>(cache.next_tick) * cache.tick_s,
                              cache.min_window_s),
                     cache.endpoint_s);
  }
  for (const auto& w : cache.words) {
    if (w.end_s <= cover + kTimeEps) obs.prefix_words.push_back(w);
  }
  obs.memory = cache.memory;
  cache.next_tick += 1;
  return {std::move(cache), std::move(obs)};
}

std::vector<WordEvent> words_arriving_at(const StreamTimeline& timeline, int tick) {
  const double now = prefix_cover_s(timeline, tick);
  const double before = tick > 0 ? prefix_cover_s(timeline, tick - 1) : -1.0;
  std::vector<WordEvent> out;
  for (const auto& w : timeline.words) {
    if (w.end_s <= now + kTimeEps && w.end_s > before + kTimeEps) out.push_back(w);
  }
  return out;
}

}  // namespace wta

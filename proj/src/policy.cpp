#include "wta/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "wta/text.hpp"

namespace wta {

const std::array<std::string, kFeatureDim>& feature_names() {
  static const std::array<std::string, kFeatureDim> names = {
      "bias",          "elapsed_frac",  "ticks_since_think", "unconsumed_updates",
      "memory_len",    "endpoint_flag", "new_tokens"};
  return names;
}

DecisionContext DecisionContext::for_timeline(const StreamTimeline& timeline) {
  DecisionContext ctx;
  ctx.anchor_consumed.assign(timeline.anchors.size(), false);
  return ctx;
}

FeatureVector featurize(const Observation& observation, const StreamTimeline& timeline,
                        const DecisionContext& context) {
  FeatureVector f{};
  const int tick = observation.tick;
  f[0] = 1.0;
  f[1] = timeline.endpoint_s > 0.0
             ? std::min(1.0, static_cast<double>(tick) * timeline.tick_s / timeline.endpoint_s)
             : 1.0;
  f[2] = static_cast<double>(tick - context.last_think_tick);
  int unconsumed = 0;
  for (std::size_t i = 0; i < timeline.anchors.size(); ++i) {
    const auto& a = timeline.anchors[i];
    if (a.kind == AnchorKind::state_update && a.tick <= tick && !context.anchor_consumed[i])
      ++unconsumed;
  }
  f[3] = unconsumed;
  f[4] = static_cast<double>(observation.memory.size());
  f[5] = observation.endpoint_reached ? 1.0 : 0.0;
  int new_tokens = 0;
  for (const auto& w : words_arriving_at(timeline, tick)) new_tokens += token_count(w.word);
  f[6] = new_tokens;
  return f;
}

namespace {

// Column in the weight matrix; answer is phase-forced and has no logits.
int action_column(ActionKind kind) {
  switch (kind) {
    case ActionKind::wait: return 0;
    case ActionKind::think: return 1;
    case ActionKind::answer: return -1;
  }
  return -1;
}

}  // namespace

std::vector<double> action_distribution(const PolicyParams& params, const FeatureVector& features,
                                        const std::vector<ActionKind>& legal) {
  if (legal.empty()) throw std::invalid_argument("action_distribution: empty legal set");
  if (legal.size() == 1) return {1.0};
  std::vector<double> logits(legal.size(), 0.0);
  for (std::size_t i = 0; i < legal.size(); ++i) {
    const int col = action_column(legal[i]);
    if (col < 0) throw std::invalid_argument("action_distribution: forced action in joint set");
    double z = 0.0;
    for (int f = 0; f < kFeatureDim; ++f) z += params.at(f, col) * features[f];
    logits[i] = z;
  }
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double denom = 0.0;
  for (auto& z : logits) {
    z = std::exp(z - zmax);
    denom += z;
  }
  for (auto& z : logits) z /= denom;
  return logits;
}

ActionKind argmax_action(const PolicyParams& params, const FeatureVector& features,
                         const std::vector<ActionKind>& legal) {
  const auto probs = action_distribution(params, features, legal);
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return legal[best];
}

ActionKind sample_action(const PolicyParams& params, const FeatureVector& features,
                         const std::vector<ActionKind>& legal, Rng& rng) {
  const auto probs = action_distribution(params, features, legal);
  const double u = rng.uniform();
  double cum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return legal[i];
  }
  return legal.back();
}

LogProbGrad log_prob_and_grad(const PolicyParams& params, const FeatureVector& features,
                              const std::vector<ActionKind>& legal, ActionKind chosen) {
  const auto it = std::find(legal.begin(), legal.end(), chosen);
  if (it == legal.end()) throw std::invalid_argument("log_prob_and_grad: chosen not legal");
  LogProbGrad out;
  if (legal.size() == 1) return out;  // forced: log 1, zero gradient

  const auto probs = action_distribution(params, features, legal);
  const std::size_t chosen_idx = static_cast<std::size_t>(it - legal.begin());
  out.log_prob = std::log(probs[chosen_idx]);
  for (std::size_t i = 0; i < legal.size(); ++i) {
    const int col = action_column(legal[i]);
    const double indicator = (i == chosen_idx) ? 1.0 : 0.0;
    for (int f = 0; f < kFeatureDim; ++f) {
      out.grad[f * kPreActions + col] += features[f] * (indicator - probs[i]);
    }
  }
  return out;
}

namespace {

struct SlotState {
  double total = 0.0;
  std::string value;
  DeltaKind last_kind = DeltaKind::assign;
};

void apply_delta(SlotState& state, const StateDelta& delta) {
  if (delta.kind == DeltaKind::assign) {
    state.total = delta.amount;
    state.value = delta.value;
  } else {
    state.total += delta.amount;
    state.value = format_number(state.total);
  }
  state.last_kind = delta.kind;
}

std::string slot_segment(const std::string& slot, const SlotState& state) {
  if (state.last_kind == DeltaKind::add) return "running " + slot + " " + state.value;
  return slot + " now " + state.value;
}

struct FoldState {
  std::map<std::string, SlotState> slots;
  std::vector<std::string> touched_order;  // slots touched by newly folded anchors

  void apply(const StateDelta& delta, bool track_touch) {
    apply_delta(slots[delta.slot], delta);
    if (track_touch &&
        std::find(touched_order.begin(), touched_order.end(), delta.slot) == touched_order.end())
      touched_order.push_back(delta.slot);
  }

  std::string text() const {
    std::vector<std::string> segments;
    for (const auto& slot : touched_order) segments.push_back(slot_segment(slot, slots.at(slot)));
    return join(segments, " ");
  }
};

// Seeds a fold with the state of already-consumed anchors.
FoldState consumed_fold(const StreamTimeline& timeline, const DecisionContext& context) {
  FoldState fold;
  for (std::size_t i = 0; i < timeline.anchors.size(); ++i) {
    const auto& a = timeline.anchors[i];
    if (context.anchor_consumed[i] && a.state_delta) fold.apply(*a.state_delta, false);
  }
  return fold;
}

// Per-anchor narration for the final think; unlike the compact listening-time
// fold, deliberation deferred to the endpoint costs tokens per update.
std::string anchor_segment(const StateDelta& delta, const SlotState& state_after) {
  if (delta.kind == DeltaKind::add) {
    const std::string verb = delta.amount < 0 ? "minus" : "add";
    return verb + " " + format_number(std::abs(delta.amount)) + " " + delta.slot + " " +
           state_after.value;
  }
  return delta.slot + " set to " + delta.value;
}

}  // namespace

ComposedThink compose_think(const Observation& observation, const StreamTimeline& timeline,
                            const DecisionContext& context, int token_cap) {
  FoldState fold = consumed_fold(timeline, context);
  ComposedThink out;
  for (std::size_t i = 0; i < timeline.anchors.size(); ++i) {
    const auto& a = timeline.anchors[i];
    if (context.anchor_consumed[i] || a.kind != AnchorKind::state_update) continue;
    if (a.word_index >= observation.prefix_words.size()) continue;
    FoldState trial = fold;
    trial.apply(*a.state_delta, true);
    if (token_count(trial.text()) > token_cap) break;
    fold = std::move(trial);
    out.consumed_anchors.push_back(i);
  }
  out.action = out.consumed_anchors.empty() ? Action::make_think("no new evidence")
                                            : Action::make_think(fold.text());
  return out;
}

ComposedThink compose_final_think(const StreamTimeline& timeline, const DecisionContext& context,
                                  int token_cap) {
  // Reserve room for the answer cue so the cue itself is never truncated.
  constexpr int kCueReserve = 6;
  const int budget = std::max(0, token_cap - kCueReserve);

  FoldState fold = consumed_fold(timeline, context);
  ComposedThink out;
  std::vector<std::string> segments;
  int tokens = 0;
  for (std::size_t i = 0; i < timeline.anchors.size(); ++i) {
    const auto& a = timeline.anchors[i];
    if (context.anchor_consumed[i] || a.kind != AnchorKind::state_update) continue;
    SlotState& state = fold.slots[a.state_delta->slot];
    SlotState trial = state;
    apply_delta(trial, *a.state_delta);
    const std::string segment = anchor_segment(*a.state_delta, trial);
    const int cost = token_count(segment);
    if (tokens + cost > budget) break;  // the rest stays unconsumed and is lost
    state = trial;
    tokens += cost;
    segments.push_back(segment);
    out.consumed_anchors.push_back(i);
  }

  DecisionContext after = context;
  for (auto idx : out.consumed_anchors) after.anchor_consumed[idx] = true;
  std::string text = join(segments, " ");
  if (!text.empty()) text += " ";
  text += "final answer " + render_answer(timeline, after);
  out.action = Action::make_think(std::move(text));
  return out;
}

std::string render_answer(const StreamTimeline& timeline, const DecisionContext& context) {
  std::string answer = "unknown";
  for (std::size_t i = 0; i < timeline.anchors.size(); ++i) {
    const auto& a = timeline.anchors[i];
    if (context.anchor_consumed[i] && a.kind == AnchorKind::state_update && a.state_delta)
      answer = a.state_delta->answer_after;
  }
  return answer;
}

void commit_think(DecisionContext& context, const ComposedThink& composed, int tick) {
  for (auto idx : composed.consumed_anchors) context.anchor_consumed[idx] = true;
  context.last_think_tick = tick;
}

void save_params(const PolicyParams& params, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "wta-policy " << params.version << "\n";
  out << "features";
  for (const auto& n : feature_names()) out << " " << n;
  out << "\nactions wait think\n";
  char buf[40];
  for (int f = 0; f < kFeatureDim; ++f) {
    for (int a = 0; a < kPreActions; ++a) {
      std::snprintf(buf, sizeof(buf), "%.17g", params.at(f, a));
      out << buf << (a + 1 < kPreActions ? " " : "\n");
    }
  }
}

PolicyParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "wta-policy") throw std::runtime_error("bad checkpoint header: " + path);
  std::string label;
  in >> label;  // "features"
  for (const auto& expected : feature_names()) {
    std::string name;
    in >> name;
    if (name != expected)
      throw std::runtime_error("checkpoint feature order mismatch: " + name);
  }
  std::string actions_label, wait_name, think_name;
  in >> actions_label >> wait_name >> think_name;
  PolicyParams params;
  params.version = version;
  for (int f = 0; f < kFeatureDim; ++f) {
    for (int a = 0; a < kPreActions; ++a) {
      if (!(in >> params.at(f, a))) throw std::runtime_error("truncated checkpoint: " + path);
    }
  }
  return params;
}

}  // namespace wta

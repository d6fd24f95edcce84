#pragma once

#include <functional>
#include <optional>

#include "wta/datagen.hpp"
#include "wta/policy.hpp"

namespace wta {

// A record prepared for rollouts and evaluation.
struct EnvItem {
  Record record;
  StreamTimeline timeline;
  GoldTrace gold;
  TaskContext task;
};

EnvItem prepare_item(const Record& record, double tick_s = 0.5, double min_window_s = 2.0);
std::vector<EnvItem> prepare_items(const std::vector<Record>& records, double tick_s = 0.5,
                                   double min_window_s = 2.0);

// Simulated controller compute: seconds of replayed prefix per call times the
// prefill rate, plus emitted text tokens times the generation rate. Zero rates
// turn the latency model off.
struct CostModel {
  double prefill_rate = 0.0;   // seconds of compute per second of prefix
  double gen_rate = 0.0;       // seconds of compute per emitted token
};

// One sampled policy decision, kept for ratio/gradient computation.
struct Decision {
  FeatureVector features{};
  ActionKind chosen = ActionKind::wait;
  double log_prob = 0.0;  // under the sampling-time parameters
};

// Test hook: forces the action at a listening tick, bypassing the policy
// (and, deliberately, the legal-action set).
using ActionOverride =
    std::function<std::optional<ActionKind>(int tick, const Observation& obs)>;

struct EpisodeOptions {
  bool sample = false;        // sample (training) vs argmax (deployment)
  Rng* rng = nullptr;         // required when sampling
  int think_cap = 48;
  CostModel cost;
  ActionOverride override_action;
};

struct EpisodeRun {
  Trajectory trajectory;
  std::vector<Decision> decisions;
  DecisionContext context;  // final consumption state
  int skipped_ticks = 0;
};

// Runs the full streaming tick loop: listening decisions on the grid, then
// the forced final think and answer at the endpoint. When the cost model is
// active, ticks arriving while a call is still running are skipped. An early
// answer injected by the override ends the episode immediately.
EpisodeRun run_episode(const PolicyParams& params, const EnvItem& item,
                       const EpisodeOptions& options);

// Complete-audio protocol: one observation of the whole stream, one final
// think, then the answer. No listening decisions.
EpisodeRun run_offline_episode(const PolicyParams& params, const EnvItem& item,
                               int think_cap = 48);

}  // namespace wta

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "wta/rng.hpp"
#include "wta/stream.hpp"

namespace wta {

inline constexpr int kFeatureDim = 7;
inline constexpr int kPreActions = 2;  // wait, think
inline constexpr int kParamCount = kFeatureDim * kPreActions;

// Fixed feature order; see feature_names() for the checkpoint manifest.
using FeatureVector = std::array<double, kFeatureDim>;
using ParamGrad = std::array<double, kParamCount>;

const std::array<std::string, kFeatureDim>& feature_names();

// Weight matrix for the pre-endpoint wait/think logits, column-major by
// action: weights[f * kPreActions + a].
struct PolicyParams {
  std::array<double, kParamCount> weights{};
  std::string version = "v1";

  double at(int feature, int action) const { return weights[feature * kPreActions + action]; }
  double& at(int feature, int action) { return weights[feature * kPreActions + action]; }
};

// Mutable per-episode decision state: which evidence anchors earlier thinks
// already folded, and when the last think happened.
struct DecisionContext {
  std::vector<bool> anchor_consumed;
  int last_think_tick = -1;

  static DecisionContext for_timeline(const StreamTimeline& timeline);
};

FeatureVector featurize(const Observation& observation, const StreamTimeline& timeline,
                        const DecisionContext& context);

// Softmax over the logits of the legal actions only; singleton sets are
// forced with probability one.
std::vector<double> action_distribution(const PolicyParams& params, const FeatureVector& features,
                                        const std::vector<ActionKind>& legal);

// Deployment rule: argmax, ties broken toward the earlier legal action.
ActionKind argmax_action(const PolicyParams& params, const FeatureVector& features,
                         const std::vector<ActionKind>& legal);

ActionKind sample_action(const PolicyParams& params, const FeatureVector& features,
                         const std::vector<ActionKind>& legal, Rng& rng);

struct LogProbGrad {
  double log_prob = 0.0;
  ParamGrad grad{};  // d log pi(chosen | o) / d weights
};

// Exact softmax log-likelihood and its analytic gradient
// (features outer-product with indicator minus probability).
LogProbGrad log_prob_and_grad(const PolicyParams& params, const FeatureVector& features,
                              const std::vector<ActionKind>& legal, ActionKind chosen);

struct ComposedThink {
  Action action;
  std::vector<std::size_t> consumed_anchors;  // indices into timeline.anchors
};

// Extractive state update: folds the unconsumed state-update anchors visible
// in the observation prefix into a short per-slot summary. With nothing new
// to fold it emits the deliberately weak "no new evidence" template.
ComposedThink compose_think(const Observation& observation, const StreamTimeline& timeline,
                            const DecisionContext& context, int token_cap = 48);

// Post-endpoint final think: folds whatever is still unconsumed, then appends
// a compact "final answer <value>" cue. Folding stops at the token cap, so
// evidence that did not fit stays unconsumed and is lost to the answer.
ComposedThink compose_final_think(const StreamTimeline& timeline, const DecisionContext& context,
                                  int token_cap = 48);

// The answer implied by the folded state: answer_after of the last consumed
// state-update anchor, or "unknown" when nothing was folded.
std::string render_answer(const StreamTimeline& timeline, const DecisionContext& context);

// Applies a committed think to the context (fold bookkeeping).
void commit_think(DecisionContext& context, const ComposedThink& composed, int tick);

// Checkpoint I/O: version tag, feature-order manifest, then the matrix.
void save_params(const PolicyParams& params, const std::string& path);
PolicyParams load_params(const std::string& path);

}  // namespace wta

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wta/episode.hpp"
#include "wta/parallel.hpp"
#include "wta/reward.hpp"

namespace wta {

// ---------------------------------------------------------------------------
// supervised trace cloning
// ---------------------------------------------------------------------------

struct SftBatchResult {
  double loss = 0.0;            // mean negative log-prob of gold listening actions
  ParamGrad grad{};             // d loss / d weights
  double token_accuracy = 0.0;  // argmax == gold fraction
  int decisions = 0;
};

// Teacher-forced forward/backward pass over the gold traces of a batch.
SftBatchResult sft_batch(const PolicyParams& params, const std::vector<EnvItem>& items,
                         Exec exec = Exec::serial);

// One gradient-descent step on the batch loss.
std::pair<PolicyParams, SftBatchResult> sft_step(const PolicyParams& params,
                                                 const std::vector<EnvItem>& items,
                                                 double learning_rate, Exec exec = Exec::serial);

struct SftStepLog {
  int step = 0;
  double loss = 0.0;
  double token_accuracy = 0.0;
};

struct SftConfig {
  int steps = 200;
  double learning_rate = 0.08;
};

std::pair<PolicyParams, std::vector<SftStepLog>> train_sft(const PolicyParams& init,
                                                           const std::vector<EnvItem>& items,
                                                           const SftConfig& config,
                                                           Exec exec = Exec::serial);

// ---------------------------------------------------------------------------
// policy optimization
// ---------------------------------------------------------------------------

struct ClipConfig {
  double eps_low = 0.20;
  double eps_high = 0.28;
  double kl_coeff = 0.01;
};

struct Rollout {
  Trajectory trajectory;
  std::vector<Decision> decisions;  // sampled listening decisions (the credit mask)
  RewardBreakdown reward;
  bool scored = false;  // false when the judge/reward path failed
  bool format_valid = false;
  bool valid_final_think = false;
  bool has_pre_endpoint_think = false;
  std::string score_error;
};

struct RolloutGroup {
  std::string prompt_id;
  std::vector<Rollout> rollouts;     // size G
  std::vector<double> advantages;    // filled by group_advantages

  bool complete() const;  // every member scored
  int format_valid_count() const;
  bool any_valid_final_think() const;
  bool any_pre_endpoint_think() const;
  double mean_reward() const;
};

// G sampled trajectories for one prompt, each fully scored.
RolloutGroup rollout_group(const PolicyParams& params, const EnvItem& item, int group_size,
                           std::uint64_t seed, const RewardConfig& reward, const Judge& judge,
                           Exec exec = Exec::serial, const ActionOverride& override_action = {});

// Group-relative standardization with population std and epsilon in the
// denominator. Requires at least two rewards.
std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon = 1e-8);

// One credited decision: rollout index, decision index, and the probability
// ratio of the new policy to the sampling-time policy.
struct DecisionCredit {
  int rollout = 0;
  int decision = 0;
  double ratio = 1.0;
};

// The credit mask M: exactly the sampled listening decisions of every rollout
// in the group, with per-pair ratios under the given parameters.
std::vector<DecisionCredit> credit_mask(const RolloutGroup& group,
                                        const PolicyParams& params_new,
                                        const PolicyParams& params_old);

struct DapoLossResult {
  double loss = 0.0;
  ParamGrad grad{};
  double mean_kl = 0.0;
  int mask_size = 0;
};

// Clipped-surrogate objective over the decision mask: per-decision ratios to
// the sampling-time policy, the asymmetric two-case clip, and a nonnegative
// KL estimate against the frozen reference. Exact analytic gradient.
DapoLossResult dapo_loss(const RolloutGroup& group, const PolicyParams& params_new,
                         const PolicyParams& params_old, const ClipConfig& clip,
                         const PolicyParams& params_ref);

enum class GateDecision { accept, resample, skip };

// A group may update the policy only when it has enough format-valid
// rollouts, at least one valid final think, and at least one pre-endpoint
// thought.
GateDecision dynamic_sampling_gate(const RolloutGroup& group, double min_valid_fraction,
                                   int retries_left);

struct DapoConfig {
  int steps = 300;
  int batch_records = 8;
  int group_size = 8;
  double learning_rate = 0.05;
  int warmup_steps = 10;
  int inner_steps = 2;        // gradient steps per sampled batch (old policy per batch)
  double min_valid_fraction = 0.5;
  int retry_budget = 3;
  ClipConfig clip;
  std::uint64_t seed = 0;
};

struct DapoStepLog {
  int step = 0;
  double mean_reward = 0.0;
  double mean_final_think_tokens = 0.0;
  double loss = 0.0;
  double mean_kl = 0.0;
  int accepted = 0;
  int resampled = 0;
  int skipped = 0;
  bool updated = false;
};

struct TrainAbortStats {
  int updates = 0;
  int accepted_groups = 0;
  int skipped_groups = 0;
  int steps_run = 0;
};

struct TrainAbort : std::runtime_error {
  TrainAbort(const std::string& message, TrainAbortStats s)
      : std::runtime_error(message), stats(s) {}
  TrainAbortStats stats;
};

struct DapoResult {
  PolicyParams params;
  std::vector<DapoStepLog> log;
  int updates = 0;
};

// Full loop: rollout -> gate -> advantages -> clipped update, with the
// reference policy frozen at initialization and the old policy refreshed per
// batch. Aborts when every group of a full data pass is skipped.
DapoResult train_dapo(const PolicyParams& init, const std::vector<EnvItem>& items,
                      const DapoConfig& config, const RewardConfig& reward, const Judge& judge,
                      Exec exec = Exec::serial, const ActionOverride& override_action = {});

}  // namespace wta

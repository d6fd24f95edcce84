#include "wta/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wta/rng.hpp"

namespace wta {

namespace {

const std::vector<ActionKind> kListening = {ActionKind::wait, ActionKind::think};

struct PerItemSft {
  double loss_sum = 0.0;
  ParamGrad grad_sum{};
  int correct = 0;
  int decisions = 0;
};

// Teacher forcing over one gold trace: the decision context evolves under the
// gold actions, with gold thinks consuming visible evidence like composed
// thinks do.
PerItemSft sft_item(const PolicyParams& params, const EnvItem& item) {
  PerItemSft out;
  const auto& tl = item.timeline;
  auto ctx = DecisionContext::for_timeline(tl);
  std::vector<std::string> memory;
  for (int tick = 0; tick < tl.n_pre_ticks; ++tick) {
    const auto obs = observe_replay(tl, tick, memory);
    const auto features = featurize(obs, tl, ctx);
    const auto& gold = item.gold.per_tick[static_cast<std::size_t>(tick)];

    const auto lp = log_prob_and_grad(params, features, kListening, gold.kind);
    out.loss_sum -= lp.log_prob;
    for (int i = 0; i < kParamCount; ++i) out.grad_sum[i] -= lp.grad[i];
    if (argmax_action(params, features, kListening) == gold.kind) out.correct += 1;
    out.decisions += 1;

    if (gold.kind == ActionKind::think) {
      auto composed = compose_think(obs, tl, ctx, 48);
      composed.action = gold;  // gold text, composed consumption
      commit_think(ctx, composed, tick);
      memory.push_back(gold.text);
    }
  }
  return out;
}

}  // namespace

SftBatchResult sft_batch(const PolicyParams& params, const std::vector<EnvItem>& items,
                         Exec exec) {
  std::vector<PerItemSft> slots(items.size());
  parallel_for(items.size(), exec, [&](std::size_t i) { slots[i] = sft_item(params, items[i]); });

  SftBatchResult out;
  double loss_sum = 0.0;
  long correct = 0;
  long total = 0;
  ParamGrad grad_sum{};
  for (const auto& s : slots) {
    loss_sum += s.loss_sum;
    correct += s.correct;
    total += s.decisions;
    for (int i = 0; i < kParamCount; ++i) grad_sum[i] += s.grad_sum[i];
  }
  if (total == 0) return out;
  out.loss = loss_sum / static_cast<double>(total);
  for (int i = 0; i < kParamCount; ++i) out.grad[i] = grad_sum[i] / static_cast<double>(total);
  out.token_accuracy = static_cast<double>(correct) / static_cast<double>(total);
  out.decisions = static_cast<int>(total);
  return out;
}

std::pair<PolicyParams, SftBatchResult> sft_step(const PolicyParams& params,
                                                 const std::vector<EnvItem>& items,
                                                 double learning_rate, Exec exec) {
  auto result = sft_batch(params, items, exec);
  PolicyParams next = params;
  for (int i = 0; i < kParamCount; ++i) next.weights[i] -= learning_rate * result.grad[i];
  return {std::move(next), std::move(result)};
}

std::pair<PolicyParams, std::vector<SftStepLog>> train_sft(const PolicyParams& init,
                                                           const std::vector<EnvItem>& items,
                                                           const SftConfig& config, Exec exec) {
  PolicyParams params = init;
  std::vector<SftStepLog> log;
  log.reserve(static_cast<std::size_t>(config.steps));
  for (int step = 0; step < config.steps; ++step) {
    auto [next, result] = sft_step(params, items, config.learning_rate, exec);
    params = std::move(next);
    log.push_back({step, result.loss, result.token_accuracy});
  }
  return {std::move(params), std::move(log)};
}

// ---------------------------------------------------------------------------

bool RolloutGroup::complete() const {
  return std::all_of(rollouts.begin(), rollouts.end(),
                     [](const Rollout& r) { return r.scored; });
}

int RolloutGroup::format_valid_count() const {
  return static_cast<int>(
      std::count_if(rollouts.begin(), rollouts.end(), [](const Rollout& r) { return r.format_valid; }));
}

bool RolloutGroup::any_valid_final_think() const {
  return std::any_of(rollouts.begin(), rollouts.end(),
                     [](const Rollout& r) { return r.valid_final_think; });
}

bool RolloutGroup::any_pre_endpoint_think() const {
  return std::any_of(rollouts.begin(), rollouts.end(),
                     [](const Rollout& r) { return r.has_pre_endpoint_think; });
}

double RolloutGroup::mean_reward() const {
  if (rollouts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : rollouts) sum += r.reward.total;
  return sum / static_cast<double>(rollouts.size());
}

RolloutGroup rollout_group(const PolicyParams& params, const EnvItem& item, int group_size,
                           std::uint64_t seed, const RewardConfig& reward, const Judge& judge,
                           Exec exec, const ActionOverride& override_action) {
  RolloutGroup group;
  group.prompt_id = item.record.sample_id;
  group.rollouts.resize(static_cast<std::size_t>(group_size));
  parallel_for(group.rollouts.size(), exec, [&](std::size_t g) {
    Rng rng(mix_seed(seed, g));
    EpisodeOptions options;
    options.sample = true;
    options.rng = &rng;
    options.think_cap = reward.limits.think_cap;
    options.override_action = override_action;
    auto run = run_episode(params, item, options);

    Rollout rollout;
    rollout.decisions = std::move(run.decisions);
    try {
      rollout.reward = score_trajectory(run.trajectory, item.timeline, item.task, judge, reward);
      rollout.scored = true;
    } catch (const std::exception& e) {
      // A judge failure leaves the rollout unscored and the group incomplete;
      // it must never escape a parallel rollout region.
      rollout.scored = false;
      rollout.score_error = e.what();
    }
    const auto protocol = check_protocol(run.trajectory, item.timeline, reward.limits);
    rollout.format_valid = rollout.scored && protocol.report.valid;
    rollout.valid_final_think = run.trajectory.final_think &&
                                run.trajectory.final_think->tokens <= reward.limits.think_cap;
    rollout.has_pre_endpoint_think = run.trajectory.pre_endpoint_think_count() > 0;
    rollout.trajectory = std::move(run.trajectory);
    group.rollouts[g] = std::move(rollout);
  });
  return group;
}

std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon) {
  if (rewards.size() < 2)
    throw std::invalid_argument("group_advantages: need at least two rewards");
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= n;  // population variance
  const double denom = std::sqrt(var) + epsilon;
  std::vector<double> advantages(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) advantages[i] = (rewards[i] - mean) / denom;
  return advantages;
}

std::vector<DecisionCredit> credit_mask(const RolloutGroup& group,
                                        const PolicyParams& params_new,
                                        const PolicyParams& params_old) {
  std::vector<DecisionCredit> mask;
  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const auto& decisions = group.rollouts[i].decisions;
    for (std::size_t t = 0; t < decisions.size(); ++t) {
      const auto& d = decisions[t];
      const double lp_new =
          log_prob_and_grad(params_new, d.features, kListening, d.chosen).log_prob;
      const double lp_old =
          log_prob_and_grad(params_old, d.features, kListening, d.chosen).log_prob;
      mask.push_back({static_cast<int>(i), static_cast<int>(t), std::exp(lp_new - lp_old)});
    }
  }
  return mask;
}

DapoLossResult dapo_loss(const RolloutGroup& group, const PolicyParams& params_new,
                         const PolicyParams& params_old, const ClipConfig& clip,
                         const PolicyParams& params_ref) {
  if (group.advantages.size() != group.rollouts.size())
    throw std::runtime_error("dapo_loss: advantages not computed");

  DapoLossResult out;
  double surrogate_sum = 0.0;
  double kl_sum = 0.0;
  ParamGrad grad_sum{};
  int mask = 0;

  for (std::size_t i = 0; i < group.rollouts.size(); ++i) {
    const double advantage = group.advantages[i];
    for (const auto& d : group.rollouts[i].decisions) {
      const auto lp_new = log_prob_and_grad(params_new, d.features, kListening, d.chosen);
      const auto lp_old = log_prob_and_grad(params_old, d.features, kListening, d.chosen);
      const double ratio = std::exp(lp_new.log_prob - lp_old.log_prob);
      const double clipped = std::clamp(ratio, 1.0 - clip.eps_low, 1.0 + clip.eps_high);

      double surrogate;
      bool unclipped_active;
      if (advantage >= 0.0) {
        surrogate = std::min(ratio * advantage, clipped * advantage);
        unclipped_active = ratio * advantage <= clipped * advantage;
      } else {
        surrogate = std::max(ratio * advantage, clipped * advantage);
        unclipped_active = ratio * advantage >= clipped * advantage;
      }
      surrogate_sum += surrogate;
      if (unclipped_active) {
        const double coeff = ratio * advantage;  // d(r*A)/dlogpi_new = r*A
        for (int p = 0; p < kParamCount; ++p) grad_sum[p] -= coeff * lp_new.grad[p];
      }

      const auto lp_ref = log_prob_and_grad(params_ref, d.features, kListening, d.chosen);
      const double delta = lp_ref.log_prob - lp_new.log_prob;
      kl_sum += std::exp(delta) - delta - 1.0;
      const double kl_coeff_grad = clip.kl_coeff * (1.0 - std::exp(delta));
      for (int p = 0; p < kParamCount; ++p) grad_sum[p] += kl_coeff_grad * lp_new.grad[p];

      ++mask;
    }
  }
  if (mask == 0) throw std::runtime_error("dapo_loss: empty decision mask");

  const double inv = 1.0 / static_cast<double>(mask);
  out.loss = -surrogate_sum * inv + clip.kl_coeff * kl_sum * inv;
  for (int p = 0; p < kParamCount; ++p) out.grad[p] = grad_sum[p] * inv;
  out.mean_kl = kl_sum * inv;
  out.mask_size = mask;
  return out;
}

GateDecision dynamic_sampling_gate(const RolloutGroup& group, double min_valid_fraction,
                                   int retries_left) {
  const int g = static_cast<int>(group.rollouts.size());
  const int needed = static_cast<int>(std::ceil(min_valid_fraction * g));
  const bool ok = group.format_valid_count() >= needed && group.any_valid_final_think() &&
                  group.any_pre_endpoint_think();
  if (ok) return GateDecision::accept;
  return retries_left > 0 ? GateDecision::resample : GateDecision::skip;
}

DapoResult train_dapo(const PolicyParams& init, const std::vector<EnvItem>& items,
                      const DapoConfig& config, const RewardConfig& reward, const Judge& judge,
                      Exec exec, const ActionOverride& override_action) {
  if (items.empty()) throw std::invalid_argument("train_dapo: empty dataset");
  const PolicyParams reference = init;  // frozen at initialization
  PolicyParams params = init;
  DapoResult result;

  const int steps_per_epoch = std::max(
      1, (static_cast<int>(items.size()) + config.batch_records - 1) / config.batch_records);
  int consecutive_all_skipped = 0;

  for (int step = 0; step < config.steps; ++step) {
    const double warm =
        config.warmup_steps > 0
            ? std::min(1.0, static_cast<double>(step + 1) / config.warmup_steps)
            : 1.0;
    const double lr = config.learning_rate * warm;

    const PolicyParams old_params = params;  // refreshed once per batch
    DapoStepLog log_entry;
    log_entry.step = step;

    struct Slot {
      RolloutGroup group;
      bool accepted = false;
      int resamples = 0;
    };
    std::vector<Slot> slots(static_cast<std::size_t>(config.batch_records));
    parallel_for(slots.size(), exec, [&](std::size_t j) {
      const auto& item =
          items[(static_cast<std::size_t>(step) * slots.size() + j) % items.size()];
      for (int attempt = 0; attempt <= config.retry_budget; ++attempt) {
        auto group = rollout_group(old_params, item, config.group_size,
                                   mix_seed(config.seed, static_cast<std::uint64_t>(step),
                                            mix_seed(j, static_cast<std::uint64_t>(attempt))),
                                   reward, judge, Exec::serial, override_action);
        auto decision =
            dynamic_sampling_gate(group, config.min_valid_fraction, config.retry_budget - attempt);
        if (!group.complete() && decision == GateDecision::accept) {
          decision = config.retry_budget - attempt > 0 ? GateDecision::resample
                                                       : GateDecision::skip;
        }
        slots[j].group = std::move(group);
        if (decision == GateDecision::accept) {
          slots[j].accepted = true;
          break;
        }
        if (decision == GateDecision::resample) {
          slots[j].resamples += 1;
          continue;
        }
        break;  // skip
      }
    });

    std::vector<RolloutGroup> accepted;
    double reward_sum = 0.0;
    double final_tokens_sum = 0.0;
    int rollout_count = 0;
    for (auto& slot : slots) {
      log_entry.resampled += slot.resamples;
      for (const auto& r : slot.group.rollouts) {
        reward_sum += r.reward.total;
        final_tokens_sum += r.trajectory.final_think_tokens();
        ++rollout_count;
      }
      if (!slot.accepted) {
        log_entry.skipped += 1;
        continue;
      }
      log_entry.accepted += 1;
      std::vector<double> rewards;
      for (const auto& r : slot.group.rollouts) rewards.push_back(r.reward.total);
      slot.group.advantages = group_advantages(rewards);
      accepted.push_back(std::move(slot.group));
    }
    if (rollout_count > 0) {
      log_entry.mean_reward = reward_sum / rollout_count;
      log_entry.mean_final_think_tokens = final_tokens_sum / rollout_count;
    }

    if (!accepted.empty()) {
      for (int inner = 0; inner < config.inner_steps; ++inner) {
        ParamGrad grad{};
        double loss_sum = 0.0;
        double kl_sum = 0.0;
        for (const auto& group : accepted) {
          const auto piece = dapo_loss(group, params, old_params, config.clip, reference);
          loss_sum += piece.loss;
          kl_sum += piece.mean_kl;
          for (int p = 0; p < kParamCount; ++p) grad[p] += piece.grad[p];
        }
        const double inv = 1.0 / static_cast<double>(accepted.size());
        for (int p = 0; p < kParamCount; ++p) params.weights[p] -= lr * grad[p] * inv;
        log_entry.loss = loss_sum * inv;
        log_entry.mean_kl = kl_sum * inv;
        result.updates += 1;
      }
      log_entry.updated = true;
      consecutive_all_skipped = 0;
    } else {
      consecutive_all_skipped += 1;
      if (consecutive_all_skipped >= steps_per_epoch) {
        result.log.push_back(log_entry);
        TrainAbortStats stats;
        stats.updates = result.updates;
        stats.steps_run = step + 1;
        for (const auto& entry : result.log) {
          stats.accepted_groups += entry.accepted;
          stats.skipped_groups += entry.skipped;
        }
        throw TrainAbort(
            "every rollout group in a full data pass was skipped by the sampling gate "
            "(last step " +
            std::to_string(step) + "); the policy cannot produce gate-passing groups",
            stats);
      }
    }
    result.log.push_back(log_entry);
  }
  result.params = std::move(params);
  return result;
}

}  // namespace wta

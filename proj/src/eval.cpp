#include "wta/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wta/rng.hpp"

namespace wta {

namespace {

// A lone judge for evaluation-time answer matching; scoring here never calls
// the network-replaceable judge path beyond short-answer equivalence.
const StubJudge& eval_judge() {
  static const StubJudge judge;
  return judge;
}

EpisodeResult summarize(const EnvItem& item, EpisodeRun run, const CostModel& cost,
                        bool streaming, int think_cap) {
  EpisodeResult res;
  res.item_id = item.record.sample_id;
  res.task = item.task.kind;
  res.final_think_tokens = run.trajectory.final_think_tokens();
  res.pre_endpoint_thinks = run.trajectory.pre_endpoint_think_count();
  res.skipped_ticks = run.skipped_ticks;
  res.rtf = rtf_proxy(run.trajectory, item.timeline, cost);

  EffortConfig effort;  // evaluation uses the base rule only
  const auto answer = score_answer(run.trajectory, item.task, eval_judge(), effort);
  res.correct = answer.base_correct;
  if (streaming) {
    ProtocolLimits limits;
    limits.think_cap = think_cap;
    limits.answer_cap = think_cap;
    limits.allow_tick_gaps = run.skipped_ticks > 0;
    res.protocol = check_protocol(run.trajectory, item.timeline, limits).report;
    if (!res.protocol.valid) res.correct = false;
  }
  res.trajectory = std::move(run.trajectory);
  return res;
}

}  // namespace

std::vector<EpisodeResult> run_deployment(const PolicyParams& params,
                                          const std::vector<EnvItem>& items,
                                          const EvalConfig& config, Exec exec) {
  std::vector<EpisodeResult> results(items.size());
  parallel_for(items.size(), exec, [&](std::size_t i) {
    EpisodeOptions options;
    options.sample = false;
    options.think_cap = config.think_cap;
    options.cost = config.cost;
    auto run = run_episode(params, items[i], options);
    results[i] = summarize(items[i], std::move(run), config.cost, true, config.think_cap);
  });
  return results;
}

std::vector<EpisodeResult> run_offline(const PolicyParams& params,
                                       const std::vector<EnvItem>& items,
                                       const EvalConfig& config, Exec exec) {
  std::vector<EpisodeResult> results(items.size());
  parallel_for(items.size(), exec, [&](std::size_t i) {
    auto run = run_offline_episode(params, items[i], config.think_cap);
    results[i] = summarize(items[i], std::move(run), config.cost, false, config.think_cap);
  });
  return results;
}

double row_weighted_mean(const std::vector<double>& accuracies,
                         const std::vector<double>& counts) {
  if (accuracies.size() != counts.size() || accuracies.empty())
    throw std::invalid_argument("row_weighted_mean: mismatched inputs");
  double weighted = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < accuracies.size(); ++i) {
    weighted += accuracies[i] * counts[i];
    total += counts[i];
  }
  if (total <= 0.0) throw std::invalid_argument("row_weighted_mean: zero total count");
  return weighted / total;
}

LaneReport aggregate(const std::vector<EpisodeResult>& results,
                     const std::vector<TaskKind>& declared_tasks) {
  LaneReport report;
  report.total_items = static_cast<int>(results.size());

  std::vector<TaskKind> tasks = declared_tasks;
  if (tasks.empty()) {
    for (const auto& r : results) {
      if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
    }
  }
  std::vector<double> accs, counts;
  for (auto task : tasks) {
    int n = 0, correct = 0;
    for (const auto& r : results) {
      if (r.task != task) continue;
      ++n;
      correct += r.correct ? 1 : 0;
    }
    if (n == 0) {
      report.warnings.push_back(std::string("no items for declared task ") +
                                task_kind_name(task) + "; excluded");
      continue;
    }
    TaskLane lane;
    lane.task = task;
    lane.items = n;
    lane.accuracy = 100.0 * correct / n;
    report.per_task.push_back(lane);
    accs.push_back(lane.accuracy);
    counts.push_back(n);
  }
  if (!accs.empty()) report.row_weighted_accuracy = row_weighted_mean(accs, counts);

  double think_sum = 0.0, rtf_sum = 0.0;
  for (const auto& r : results) {
    think_sum += r.final_think_tokens;
    rtf_sum += r.rtf;
  }
  if (!results.empty()) {
    report.mean_final_think_tokens = think_sum / results.size();
    report.mean_rtf = rtf_sum / results.size();
  }
  return report;
}

double rtf_proxy(const Trajectory& trajectory, const StreamTimeline& timeline,
                 const CostModel& cost) {
  double compute = 0.0;
  for (const auto& s : trajectory.steps) {
    compute += prefix_cover_s(timeline, s.tick) * cost.prefill_rate +
               static_cast<double>(s.action.tokens) * cost.gen_rate;
  }
  if (trajectory.final_think) {
    compute += timeline.endpoint_s * cost.prefill_rate +
               static_cast<double>(trajectory.final_think->tokens) * cost.gen_rate;
  }
  if (trajectory.answer) {
    compute += timeline.endpoint_s * cost.prefill_rate +
               static_cast<double>(trajectory.answer->tokens) * cost.gen_rate;
  }
  return timeline.endpoint_s > 0.0 ? compute / timeline.endpoint_s : 0.0;
}

std::pair<double, double> bootstrap_ci(const std::vector<std::uint8_t>& correct_flags,
                                       int n_resamples, double confidence, std::uint64_t seed,
                                       Exec exec) {
  if (correct_flags.empty()) throw std::invalid_argument("bootstrap_ci: no items");
  if (n_resamples < 1) throw std::invalid_argument("bootstrap_ci: no resamples");
  const std::size_t n = correct_flags.size();
  std::vector<double> means(static_cast<std::size_t>(n_resamples));
  parallel_for(means.size(), exec, [&](std::size_t i) {
    Rng rng(mix_seed(seed, i));
    long hits = 0;
    for (std::size_t j = 0; j < n; ++j) hits += correct_flags[rng.pick(n)];
    means[i] = static_cast<double>(hits) / static_cast<double>(n);
  });
  std::sort(means.begin(), means.end());
  const double alpha = (1.0 - confidence) / 2.0;
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(means.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(means.size() - 1, lo + 1);
    const double frac = pos - static_cast<double>(lo);
    return means[lo] * (1.0 - frac) + means[hi] * frac;
  };
  return {quantile(alpha), quantile(1.0 - alpha)};
}

}  // namespace wta

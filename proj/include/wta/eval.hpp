#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wta/episode.hpp"
#include "wta/parallel.hpp"
#include "wta/reward.hpp"

namespace wta {

struct EpisodeResult {
  std::string item_id;
  TaskKind task = TaskKind::short_answer;
  bool correct = false;  // base answer match, no effort multiplier
  int final_think_tokens = 0;
  int pre_endpoint_thinks = 0;
  int skipped_ticks = 0;
  double rtf = 0.0;
  Trajectory trajectory;
  ProtocolReport protocol;
};

struct EvalConfig {
  CostModel cost;
  int think_cap = 48;
};

// Streaming protocol: argmax decisions on the tick grid, full-prefix
// observations, endpoint-gated final think and answer; stale ticks skipped
// when the cost model is live. Protocol-invalid trajectories are recorded as
// incorrect, never a crash.
std::vector<EpisodeResult> run_deployment(const PolicyParams& params,
                                          const std::vector<EnvItem>& items,
                                          const EvalConfig& config = {},
                                          Exec exec = Exec::serial);

// Complete-audio protocol: one observation, one final think, then the answer.
std::vector<EpisodeResult> run_offline(const PolicyParams& params,
                                       const std::vector<EnvItem>& items,
                                       const EvalConfig& config = {},
                                       Exec exec = Exec::serial);

struct TaskLane {
  TaskKind task = TaskKind::short_answer;
  int items = 0;
  double accuracy = 0.0;  // percent
};

struct LaneReport {
  std::vector<TaskLane> per_task;
  double row_weighted_accuracy = 0.0;  // percent
  double mean_final_think_tokens = 0.0;
  double mean_rtf = 0.0;
  int total_items = 0;
  std::vector<std::string> warnings;
};

// Item-count-weighted average of per-task accuracies.
double row_weighted_mean(const std::vector<double>& accuracies,
                         const std::vector<double>& counts);

// Declared tasks with zero items are excluded with a warning.
LaneReport aggregate(const std::vector<EpisodeResult>& results,
                     const std::vector<TaskKind>& declared_tasks = {});

// Simulated controller time over every call of the trajectory divided by the
// stream duration. Each listening call replays its full prefix; the final
// think and answer calls replay the whole stream.
double rtf_proxy(const Trajectory& trajectory, const StreamTimeline& timeline,
                 const CostModel& cost);

// Seeded percentile bootstrap over resampled accuracy means.
std::pair<double, double> bootstrap_ci(const std::vector<std::uint8_t>& correct_flags,
                                       int n_resamples, double confidence, std::uint64_t seed,
                                       Exec exec = Exec::serial);

}  // namespace wta

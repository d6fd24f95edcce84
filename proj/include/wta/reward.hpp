#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wta/trace.hpp"

namespace wta {

enum class TaskKind { multiple_choice, numeric, short_answer };

const char* task_kind_name(TaskKind kind);
TaskKind task_kind_from_name(const std::string& name);

// Per-term weights. Defaults give protocol validity priority and make the
// update-timing term the strongest soft signal.
struct RewardWeights {
  double answer = 1.0;       // lambda_a
  double format = 1.0;       // lambda_f
  double latency = 1.0;      // lambda_s
  double update = 3.0;       // lambda_u
  double thought = 1.0;      // lambda_t
  double consistency = 0.45; // lambda_c
};

// Final-think latency: six free tokens, then a 0.30/token linear penalty
// capped at 3.0, plus a small bonus for a compact 3..6 token answer cue.
struct LatencyConfig {
  int free_budget = 6;
  double slope = 0.30;
  double cap = 3.0;
  double bonus = 0.25;
  int bonus_min_tokens = 3;
  int bonus_max_tokens = 6;
};

struct UpdateTimingConfig {
  int tolerance_ticks = 2;
  double sparsity_coeff = 0.5;
};

// Difficulty-aware effort calibration on the answer term: a correct answer
// with an implausibly empty or overlong reasoning state only earns the floor
// multiplier; an invalid answer shape costs a further 0.25.
struct EffortConfig {
  int min_tokens = 1;
  int tokens_per_level = 24;  // upper bound is tokens_per_level * difficulty level
  double floor_multiplier = 0.5;
  double shape_penalty = 0.25;
};

struct RewardConfig {
  RewardWeights weights;
  LatencyConfig latency;
  UpdateTimingConfig update;
  EffortConfig effort;
  ProtocolLimits limits;
  double format_valid_score = 1.0;
  double format_invalid_score = -1.0;
  bool use_thought_quality = true;   // R_t, off in the 4-term stack
  bool use_chain_consistency = true; // R_c, off in the 4- and 5-term stacks
};

struct JudgeRequest {
  enum class Kind { thought, chain, answer_equivalence };
  Kind kind = Kind::thought;
  std::vector<std::string> texts;           // thought text, or the visible chain
  std::vector<std::string> slot_keywords;   // tracked slot names
  std::vector<std::string> tracked_values;  // every value the stream ever tracked
  std::string final_value;                  // gold end-state value (chain requests)
  std::string candidate;                    // answer-equivalence requests
  std::string reference;
};

struct JudgeVerdict {
  double score = 0.0;  // coarse {0, 0.5, 1}
  std::string rationale;
};

// Single request/verdict contract so a networked judge can replace the stub
// without touching reward code.
class Judge {
 public:
  virtual ~Judge() = default;
  virtual JudgeVerdict evaluate(const JudgeRequest& request) const = 0;
};

// Deterministic rule-table judge. Thoughts: 1 when short (<=12 tokens) and
// concrete (digit or tracked slot keyword), 0.5 when concrete but overlong,
// 0 otherwise. Chains: 1 when the latest tracked value mentioned equals the
// final value, 0 when it contradicts it, 0.5 when support is absent.
class StubJudge : public Judge {
 public:
  JudgeVerdict evaluate(const JudgeRequest& request) const override;
};

struct TaskContext {
  TaskKind kind = TaskKind::short_answer;
  std::string gold;
  std::vector<std::string> choices;  // option texts, labeled A.. in order
  int difficulty_level = 1;          // easy 1, medium 2, hard 3
};

struct AnswerScore {
  double value = 0.0;      // r_a
  bool base_correct = false;
  bool shape_ok = true;
  bool missing = false;
  double effort_multiplier = 1.0;
};

// Deterministic task scoring with normalization: case/whitespace folding,
// choice-label-to-option-text mapping, numeric comparison after stripping
// separators and units. The judge is consulted only as a semantic-equivalence
// fallback for short answers.
AnswerScore score_answer(const Trajectory& trajectory, const TaskContext& task,
                         const Judge& judge, const EffortConfig& effort);

double score_latency(int final_think_tokens, bool answer_ok, bool shape_ok,
                     const LatencyConfig& config = {});

// Matches each state-update anchor to at most one pre-endpoint think within
// the tick tolerance (greedy nearest, each think used once, ties toward the
// earlier anchor); unmatched thinks are sparsity-penalized.
double score_update_timing(const Trajectory& trajectory, const StreamTimeline& timeline,
                           const UpdateTimingConfig& config = {});

double score_thought_quality(const Trajectory& trajectory, const StreamTimeline& timeline,
                             const Judge& judge);

double score_chain_consistency(const Trajectory& trajectory, const StreamTimeline& timeline,
                               const Judge& judge);

struct TermValues {
  double r_a = 0.0;
  double r_f = 0.0;
  double r_s = 0.0;
  double r_u = 0.0;
  double r_t = 0.0;
  double r_c = 0.0;
};

struct RewardBreakdown {
  double r_a = 0.0;
  double r_f = 0.0;
  double r_s = 0.0;
  double r_u = 0.0;
  double r_t = 0.0;
  double r_c = 0.0;
  bool gated = false;
  double total = 0.0;
};

// Gated composition: an invalid format forfeits everything else, and the
// consistency bonus only pays when the answer itself scored.
RewardBreakdown total_reward(const TermValues& terms, const RewardConfig& config);

// Full scoring pipeline for one trajectory. Judge-assisted terms are skipped
// when the protocol gate fires.
RewardBreakdown score_trajectory(const Trajectory& trajectory, const StreamTimeline& timeline,
                                 const TaskContext& task, const Judge& judge,
                                 const RewardConfig& config);

// Slot names / tracked values the judge rules key on, derived from the
// timeline's state deltas.
std::vector<std::string> slot_keywords(const StreamTimeline& timeline);
std::vector<std::string> tracked_values(const StreamTimeline& timeline);
std::string final_tracked_value(const StreamTimeline& timeline);

}  // namespace wta

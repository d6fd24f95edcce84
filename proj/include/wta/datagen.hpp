#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wta/parallel.hpp"
#include "wta/reward.hpp"
#include "wta/stream.hpp"
#include "wta/trace.hpp"

namespace wta {

enum class Mechanism {
  overwrite_final_slot,
  cumulative_total,
  tiered_discount_total,
  fee_or_threshold_decision,
  exclusion_choice,
  bounded_window_selection,
  quantity_update,
  eligibility_decision,
  refund_or_credit_total,
  schedule_window_resolution,
};

inline constexpr int kMechanismCount = 10;
const std::vector<Mechanism>& all_mechanisms();
const char* mechanism_name(Mechanism m);
Mechanism mechanism_from_name(const std::string& name);

enum class Difficulty { easy, medium, hard };
const char* difficulty_name(Difficulty d);
Difficulty difficulty_from_name(const std::string& name);
int difficulty_level(Difficulty d);  // easy 1, medium 2, hard 3

// Anchor payload as stored in a record; grid ticks are assigned at alignment
// time.
struct AnchorSpec {
  std::size_t word_index = 0;
  AnchorKind kind = AnchorKind::state_update;
  StateDelta delta;  // ignored for pause_filler

  bool operator==(const AnchorSpec&) const = default;
};

// One synthetic streaming reasoning record. Core fields follow the canonical
// schema (sample_id .. final_answer); the rest are documented extensions that
// make records self-contained: task labels, choice lists for multiple choice,
// per-word durations, and the structured anchor payloads.
struct Record {
  std::string sample_id;
  std::string question_text;
  std::string tts_text;
  std::string tts_instruct;
  std::string transcript_text;
  std::vector<std::string> anchor_words;
  // Ordered: one entry per anchor (keyed by anchor word), then anchor_AUDIO_END.
  std::vector<std::pair<std::string, std::string>> logical_actions;
  std::string final_answer;
  bool verifiable = true;
  Difficulty difficulty = Difficulty::easy;
  TaskKind task_kind = TaskKind::short_answer;
  Mechanism mechanism = Mechanism::cumulative_total;
  std::vector<std::string> choices;
  std::vector<int> word_durations_ms;
  std::vector<AnchorSpec> anchors;

  bool operator==(const Record&) const = default;
};

// Per-tick gold action labels aligned to the decision grid, plus the forced
// endpoint turns.
struct GoldTrace {
  std::vector<Action> per_tick;  // size n_pre_ticks; wait or think only
  Action final_think;
  Action answer;
};

// Deterministic under seed. Throws std::invalid_argument on unknown mechanism.
Record generate_record(std::uint64_t seed, Mechanism mechanism, Difficulty difficulty);

// Recomputes the answer implied by a delta prefix; the per-mechanism ground
// truth the validator checks answer_after and final_answer against.
std::string fold_answer(Mechanism mechanism, const std::vector<StateDelta>& deltas);

// Empty means valid.
std::vector<std::string> validate_record(const Record& record, double tick_s = 0.5);

std::pair<StreamTimeline, GoldTrace> align_gold_trace(const Record& record, double tick_s = 0.5,
                                                      double min_window_s = 2.0);

// The gold trace as a trajectory (always protocol-valid).
Trajectory gold_trajectory(const StreamTimeline& timeline, const GoldTrace& gold,
                           const std::string& sample_id);

TaskContext task_context(const Record& record);

struct GenConfig {
  std::uint64_t seed = 0;
  int n_records = 1000;
  std::vector<Mechanism> mechanisms = all_mechanisms();
  double nonverifiable_fraction = 0.0;
};

std::vector<Record> generate_batch(const GenConfig& config, Exec exec = Exec::serial);

// JSONL round-trip. Readers throw std::runtime_error on malformed rows.
std::string record_to_jsonl(const Record& record);
Record record_from_jsonl(const std::string& line);
void write_records(const std::string& path, const std::vector<Record>& records);
std::vector<Record> read_records(const std::string& path);

struct ExportSummary {
  int sft_train = 0;
  int sft_val = 0;
  int dapo_train = 0;
};

// SFT export keeps every row; the policy-optimization export keeps only
// verifiable rows. Validation failures abort with the row index.
ExportSummary export_dataset(const std::vector<Record>& records, double train_fraction,
                             const std::string& out_dir);

}  // namespace wta

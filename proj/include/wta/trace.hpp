#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wta/stream.hpp"

namespace wta {

struct TimedAction {
  int tick = 0;
  Action action;

  bool operator==(const TimedAction&) const = default;
};

struct TrajectoryMeta {
  std::string prompt_id;
  std::string timeline_id;

  bool operator==(const TrajectoryMeta&) const = default;
};

// A completed (or malformed) streaming trajectory. For well-formed traces the
// pre-endpoint steps cover ticks 0..K_pre-1 with wait/think only; parsing a
// protocol-violating trace can leave answers in `steps` or actions in
// `overflow`, which the protocol check reports.
struct Trajectory {
  std::vector<TimedAction> steps;
  std::optional<Action> final_think;
  std::optional<Action> answer;
  std::vector<Action> overflow;
  TrajectoryMeta meta;

  bool operator==(const Trajectory& other) const {
    return steps == other.steps && final_think == other.final_think &&
           answer == other.answer && overflow == other.overflow;
  }

  std::vector<int> pre_endpoint_think_ticks() const;
  int pre_endpoint_think_count() const;
  int final_think_tokens() const { return final_think ? final_think->tokens : 0; }
};

enum class Violation {
  early_answer,
  malformed_tag,
  missing_final_think,
  missing_answer,
  illegal_action_order,
  over_cap_think,
  over_cap_answer,
};

const char* violation_name(Violation v);

struct ProtocolReport {
  bool valid = true;
  std::vector<Violation> violations;

  bool has(Violation v) const;
};

struct ProtocolLimits {
  int think_cap = 48;
  int answer_cap = 48;
  // Deployment with a live cost model legally skips stale ticks; training and
  // the reward gate require full coverage of the listening grid.
  bool allow_tick_gaps = false;
};

// Canonical tag text: <wait/>, <think>...</think>, <answer>...</answer>.
// Span bodies must not contain '<'; composed texts never do.
std::string action_tag(const Action& action);

// Concatenation of step tags in order, then final think, then answer.
std::string serialize(const Trajectory& trajectory);

struct ParseResult {
  std::optional<Trajectory> trajectory;
  std::string error;  // non-empty means a malformed-tag parse failure

  bool ok() const { return trajectory.has_value(); }
};

// Parses tag text into a trajectory, assigning ticks from the timeline's
// decision grid. Tag-grammar errors (unknown, unbalanced, nested tags) fail;
// protocol errors (early answers, missing turns) parse fine and are left to
// check_protocol.
ParseResult parse(const std::string& text, const StreamTimeline& timeline);

struct ProtocolCheck {
  ProtocolReport report;
  double r_f = 1.0;
};

// Wait-think-answer contract check behind the reward's format term: +1 when
// clean, -1 when any violation is present. All violations are collected.
ProtocolCheck check_protocol(const Trajectory& trajectory, const StreamTimeline& timeline,
                             const ProtocolLimits& limits = {});

// Text-level variant: unparseable input yields a malformed_tag report.
ProtocolCheck check_protocol_text(const std::string& text, const StreamTimeline& timeline,
                                  const ProtocolLimits& limits = {});

}  // namespace wta

#include "wta/trace.hpp"

#include <algorithm>

namespace wta {

namespace {

constexpr std::string_view kWaitTag = "<wait/>";
constexpr std::string_view kThinkOpen = "<think>";
constexpr std::string_view kThinkClose = "</think>";
constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kAnswerClose = "</answer>";

}  // namespace

std::vector<int> Trajectory::pre_endpoint_think_ticks() const {
  std::vector<int> out;
  for (const auto& s : steps) {
    if (s.action.kind == ActionKind::think) out.push_back(s.tick);
  }
  return out;
}

int Trajectory::pre_endpoint_think_count() const {
  return static_cast<int>(pre_endpoint_think_ticks().size());
}

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::early_answer: return "EarlyAnswer";
    case Violation::malformed_tag: return "MalformedTag";
    case Violation::missing_final_think: return "MissingFinalThink";
    case Violation::missing_answer: return "MissingAnswer";
    case Violation::illegal_action_order: return "IllegalActionOrder";
    case Violation::over_cap_think: return "OverCapThink";
    case Violation::over_cap_answer: return "OverCapAnswer";
  }
  return "?";
}

bool ProtocolReport::has(Violation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

std::string action_tag(const Action& action) {
  switch (action.kind) {
    case ActionKind::wait:
      return std::string(kWaitTag);
    case ActionKind::think:
      return std::string(kThinkOpen) + action.text + std::string(kThinkClose);
    case ActionKind::answer:
      return std::string(kAnswerOpen) + action.text + std::string(kAnswerClose);
  }
  return {};
}

std::string serialize(const Trajectory& trajectory) {
  std::string out;
  for (const auto& s : trajectory.steps) out += action_tag(s.action);
  if (trajectory.final_think) out += action_tag(*trajectory.final_think);
  if (trajectory.answer) out += action_tag(*trajectory.answer);
  for (const auto& a : trajectory.overflow) out += action_tag(a);
  return out;
}

namespace {

struct Lexer {
  std::string_view text;
  std::size_t pos = 0;
  std::string error;

  void skip_space() {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\n' || text[pos] == '\t' || text[pos] == '\r'))
      ++pos;
  }

  bool at_end() {
    skip_space();
    return pos >= text.size();
  }

  bool starts_with(std::string_view prefix) const {
    return text.compare(pos, prefix.size(), prefix) == 0;
  }

  // Reads the body of a span tag up to `close`; any '<' inside the body is a
  // grammar error (nested or stray tags are illegal).
  std::optional<std::string> read_body(std::string_view open, std::string_view close) {
    pos += open.size();
    std::string body;
    while (pos < text.size()) {
      if (text[pos] == '<') {
        if (starts_with(close)) {
          pos += close.size();
          return body;
        }
        error = "nested or stray tag inside " + std::string(open);
        return std::nullopt;
      }
      body.push_back(text[pos]);
      ++pos;
    }
    error = "unbalanced tag: missing " + std::string(close);
    return std::nullopt;
  }

  std::optional<Action> next() {
    skip_space();
    if (starts_with(kWaitTag)) {
      pos += kWaitTag.size();
      return Action::make_wait();
    }
    if (starts_with(kThinkOpen)) {
      auto body = read_body(kThinkOpen, kThinkClose);
      if (!body) return std::nullopt;
      return Action::make_think(std::move(*body));
    }
    if (starts_with(kAnswerOpen)) {
      auto body = read_body(kAnswerOpen, kAnswerClose);
      if (!body) return std::nullopt;
      return Action::make_answer(std::move(*body));
    }
    error = "unknown tag at offset " + std::to_string(pos);
    return std::nullopt;
  }
};

}  // namespace

ParseResult parse(const std::string& text, const StreamTimeline& timeline) {
  Lexer lex{text, 0, {}};
  std::vector<Action> actions;
  while (!lex.at_end()) {
    auto a = lex.next();
    if (!a) return {std::nullopt, lex.error};
    actions.push_back(std::move(*a));
  }

  Trajectory traj;
  const int k_pre = timeline.n_pre_ticks;
  int cursor = 0;
  for (auto& a : actions) {
    if (cursor < k_pre) {
      traj.steps.push_back({cursor, std::move(a)});
      ++cursor;
      continue;
    }
    if (!traj.final_think) {
      if (a.kind == ActionKind::think) {
        traj.final_think = std::move(a);
      } else if (a.kind == ActionKind::answer && !traj.answer) {
        traj.answer = std::move(a);  // missing final think, flagged later
      } else {
        traj.overflow.push_back(std::move(a));
      }
      continue;
    }
    if (!traj.answer) {
      if (a.kind == ActionKind::answer) {
        traj.answer = std::move(a);
      } else {
        traj.overflow.push_back(std::move(a));
      }
      continue;
    }
    traj.overflow.push_back(std::move(a));
  }
  return {std::move(traj), {}};
}

ProtocolCheck check_protocol(const Trajectory& trajectory, const StreamTimeline& timeline,
                             const ProtocolLimits& limits) {
  ProtocolReport report;
  auto flag = [&](Violation v) {
    if (!report.has(v)) report.violations.push_back(v);
  };

  const int k_pre = timeline.n_pre_ticks;
  int expected_tick = 0;
  int last_tick = -1;
  for (const auto& s : trajectory.steps) {
    if (limits.allow_tick_gaps) {
      if (s.tick <= last_tick || s.tick >= k_pre) flag(Violation::illegal_action_order);
      last_tick = s.tick;
    } else {
      if (s.tick != expected_tick || s.tick >= k_pre) flag(Violation::illegal_action_order);
      ++expected_tick;
    }
    if (s.action.kind == ActionKind::answer) flag(Violation::early_answer);
    if (s.action.kind == ActionKind::think && s.action.tokens > limits.think_cap)
      flag(Violation::over_cap_think);
  }
  // A trace that reaches its endpoint turns without covering every listening
  // tick committed to an answer while the stream was still running.
  if (!limits.allow_tick_gaps && (trajectory.final_think || trajectory.answer) &&
      static_cast<int>(trajectory.steps.size()) < k_pre) {
    flag(Violation::early_answer);
  }
  if (!trajectory.final_think) {
    flag(Violation::missing_final_think);
  } else {
    if (trajectory.final_think->kind != ActionKind::think) flag(Violation::illegal_action_order);
    if (trajectory.final_think->tokens > limits.think_cap) flag(Violation::over_cap_think);
  }
  if (!trajectory.answer) {
    flag(Violation::missing_answer);
  } else {
    if (trajectory.answer->kind != ActionKind::answer) flag(Violation::illegal_action_order);
    if (trajectory.answer->tokens > limits.answer_cap) flag(Violation::over_cap_answer);
  }
  if (!trajectory.overflow.empty()) flag(Violation::illegal_action_order);

  report.valid = report.violations.empty();
  return {report, report.valid ? 1.0 : -1.0};
}

ProtocolCheck check_protocol_text(const std::string& text, const StreamTimeline& timeline,
                                  const ProtocolLimits& limits) {
  auto parsed = parse(text, timeline);
  if (!parsed.ok()) {
    ProtocolReport report;
    report.valid = false;
    report.violations.push_back(Violation::malformed_tag);
    return {report, -1.0};
  }
  return check_protocol(*parsed.trajectory, timeline, limits);
}

}  // namespace wta

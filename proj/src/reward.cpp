#include "wta/reward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wta/text.hpp"

namespace wta {

const char* task_kind_name(TaskKind kind) {
  switch (kind) {
    case TaskKind::multiple_choice: return "multiple_choice";
    case TaskKind::numeric: return "numeric";
    case TaskKind::short_answer: return "short_answer";
  }
  return "?";
}

TaskKind task_kind_from_name(const std::string& name) {
  if (name == "multiple_choice") return TaskKind::multiple_choice;
  if (name == "numeric") return TaskKind::numeric;
  if (name == "short_answer") return TaskKind::short_answer;
  throw std::invalid_argument("unknown task kind: " + name);
}

std::vector<std::string> slot_keywords(const StreamTimeline& timeline) {
  std::vector<std::string> out;
  for (const auto& a : timeline.anchors) {
    if (!a.state_delta) continue;
    const auto& slot = a.state_delta->slot;
    if (std::find(out.begin(), out.end(), slot) == out.end()) out.push_back(slot);
  }
  return out;
}

std::vector<std::string> tracked_values(const StreamTimeline& timeline) {
  std::vector<std::string> out;
  auto add = [&](const std::string& v) {
    if (!v.empty() && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  for (const auto& a : timeline.anchors) {
    if (!a.state_delta) continue;
    add(a.state_delta->value);
    add(a.state_delta->answer_after);
  }
  return out;
}

std::string final_tracked_value(const StreamTimeline& timeline) {
  std::string last;
  for (const auto& a : timeline.anchors) {
    if (a.kind == AnchorKind::state_update && a.state_delta) last = a.state_delta->answer_after;
  }
  return last;
}

namespace {

bool keyword_hit(const std::string& text, const std::vector<std::string>& keywords) {
  for (const auto& k : keywords) {
    if (contains_token_seq(text, k)) return true;
  }
  return false;
}

JudgeVerdict judge_thought(const JudgeRequest& req) {
  const std::string& text = req.texts.empty() ? std::string() : req.texts.front();
  const bool concrete = contains_digit(text) || keyword_hit(text, req.slot_keywords) ||
                        keyword_hit(text, req.tracked_values);
  if (!concrete) return {0.0, "no concrete state token"};
  if (token_count(text) <= 12) return {1.0, "short concrete state update"};
  return {0.5, "concrete but overlong"};
}

JudgeVerdict judge_chain(const JudgeRequest& req) {
  // Latest tracked value mentioned anywhere in the visible chain wins; earlier
  // conflicting values count as corrected.
  std::string last_value;
  for (const auto& text : req.texts) {
    const auto toks = normalized_tokens(text);
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const std::string* best = nullptr;
      std::size_t best_len = 0;
      for (const auto& value : req.tracked_values) {
        const auto vtoks = normalized_tokens(value);
        if (vtoks.empty() || i + vtoks.size() > toks.size()) continue;
        if (std::equal(vtoks.begin(), vtoks.end(), toks.begin() + static_cast<std::ptrdiff_t>(i)) &&
            vtoks.size() > best_len) {
          best = &value;
          best_len = vtoks.size();
        }
      }
      if (best) last_value = *best;
    }
  }
  if (last_value.empty()) return {0.5, "no tracked value in chain (unsupported jump)"};
  if (normalize(last_value) == normalize(req.final_value))
    return {1.0, "chain ends on the final value"};
  return {0.0, "chain's latest value contradicts the final value"};
}

JudgeVerdict judge_answer_equivalence(const JudgeRequest& req) {
  if (normalize(req.candidate) == normalize(req.reference)) return {1.0, "exact"};
  if (contains_token_seq(req.candidate, req.reference) ||
      contains_token_seq(req.reference, req.candidate))
    return {1.0, "token containment"};
  return {0.0, "no match"};
}

}  // namespace

JudgeVerdict StubJudge::evaluate(const JudgeRequest& request) const {
  switch (request.kind) {
    case JudgeRequest::Kind::thought: return judge_thought(request);
    case JudgeRequest::Kind::chain: return judge_chain(request);
    case JudgeRequest::Kind::answer_equivalence: return judge_answer_equivalence(request);
  }
  return {};
}

namespace {

// "B", "b)", "option c" -> choice index.
std::optional<std::size_t> parse_choice_label(const std::string& text, std::size_t n_choices) {
  auto toks = normalized_tokens(text);
  if (!toks.empty() && (toks.front() == "option" || toks.front() == "choice"))
    toks.erase(toks.begin());
  if (toks.size() != 1 || toks[0].size() != 1) return std::nullopt;
  const char c = toks[0][0];
  if (c < 'a' || c >= static_cast<char>('a' + n_choices)) return std::nullopt;
  return static_cast<std::size_t>(c - 'a');
}

bool base_answer_correct(const std::string& raw, const TaskContext& task, const Judge& judge) {
  const std::string norm_raw = normalize(raw);
  const std::string norm_gold = normalize(task.gold);
  if (norm_raw == norm_gold) return true;
  switch (task.kind) {
    case TaskKind::numeric: {
      const auto a = parse_number(raw);
      const auto b = parse_number(task.gold);
      return a && b && std::abs(*a - *b) <= 1e-6 * std::max(1.0, std::abs(*b));
    }
    case TaskKind::multiple_choice: {
      if (auto idx = parse_choice_label(raw, task.choices.size())) {
        if (normalize(task.choices[*idx]) == norm_gold) return true;
      }
      if (auto idx = parse_choice_label(task.gold, task.choices.size())) {
        if (normalize(task.choices[*idx]) == norm_raw) return true;
      }
      return false;
    }
    case TaskKind::short_answer: {
      JudgeRequest req;
      req.kind = JudgeRequest::Kind::answer_equivalence;
      req.candidate = raw;
      req.reference = task.gold;
      return judge.evaluate(req).score >= 1.0;
    }
  }
  return false;
}

// Question-form answers, bare labels where text is expected, and yes/no type
// mismatches all fail the shape guardrail.
bool answer_shape_ok(const std::string& raw, const TaskContext& task) {
  if (looks_like_question(raw)) return false;
  if (task.kind == TaskKind::short_answer && !is_yes_no(task.gold)) {
    const auto toks = normalized_tokens(raw);
    if (toks.size() == 1 && toks[0].size() == 1 && std::isalpha(static_cast<unsigned char>(toks[0][0])))
      return false;
  }
  if (is_yes_no(task.gold) != is_yes_no(raw)) return false;
  return true;
}

int total_think_tokens(const Trajectory& trajectory) {
  int total = 0;
  for (const auto& s : trajectory.steps) {
    if (s.action.kind == ActionKind::think) total += s.action.tokens;
  }
  total += trajectory.final_think_tokens();
  return total;
}

}  // namespace

AnswerScore score_answer(const Trajectory& trajectory, const TaskContext& task,
                         const Judge& judge, const EffortConfig& effort) {
  AnswerScore score;
  if (!trajectory.answer) {
    score.missing = true;
    return score;
  }
  const std::string& raw = trajectory.answer->text;
  score.base_correct = base_answer_correct(raw, task, judge);
  score.shape_ok = answer_shape_ok(raw, task);

  const int think_tokens = total_think_tokens(trajectory);
  const int hi = effort.tokens_per_level * std::max(1, task.difficulty_level);
  score.effort_multiplier =
      (think_tokens >= effort.min_tokens && think_tokens <= hi) ? 1.0 : effort.floor_multiplier;
  if (!score.shape_ok)
    score.effort_multiplier = std::max(0.0, score.effort_multiplier - effort.shape_penalty);

  score.value = (score.base_correct ? 1.0 : 0.0) * score.effort_multiplier;
  return score;
}

double score_latency(int final_think_tokens, bool answer_ok, bool shape_ok,
                     const LatencyConfig& config) {
  if (final_think_tokens < 0) throw std::invalid_argument("score_latency: negative tokens");
  const double over = std::max(0, final_think_tokens - config.free_budget);
  double r = -std::min(config.cap, config.slope * over);
  if (answer_ok && shape_ok && final_think_tokens >= config.bonus_min_tokens &&
      final_think_tokens <= config.bonus_max_tokens) {
    r += config.bonus;
  }
  return r;
}

double score_update_timing(const Trajectory& trajectory, const StreamTimeline& timeline,
                           const UpdateTimingConfig& config) {
  std::vector<int> required;
  for (const auto& a : timeline.anchors) {
    if (a.kind == AnchorKind::state_update) required.push_back(a.tick);
  }
  const std::vector<int> thinks = trajectory.pre_endpoint_think_ticks();

  struct Pair {
    int dist;
    int anchor_tick;
    int think_tick;
    std::size_t anchor_idx;
    std::size_t think_idx;
  };
  std::vector<Pair> pairs;
  for (std::size_t ai = 0; ai < required.size(); ++ai) {
    for (std::size_t ti = 0; ti < thinks.size(); ++ti) {
      const int d = std::abs(required[ai] - thinks[ti]);
      if (d <= config.tolerance_ticks) pairs.push_back({d, required[ai], thinks[ti], ai, ti});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.dist != y.dist) return x.dist < y.dist;
    if (x.anchor_tick != y.anchor_tick) return x.anchor_tick < y.anchor_tick;
    return x.think_tick < y.think_tick;
  });
  std::vector<bool> anchor_used(required.size(), false);
  std::vector<bool> think_used(thinks.size(), false);
  int matched = 0;
  for (const auto& p : pairs) {
    if (anchor_used[p.anchor_idx] || think_used[p.think_idx]) continue;
    anchor_used[p.anchor_idx] = true;
    think_used[p.think_idx] = true;
    ++matched;
  }
  const int spurious = static_cast<int>(thinks.size()) - matched;
  const double coverage = static_cast<double>(matched) /
                          std::max<std::size_t>(1, required.size());
  const double sparsity = config.sparsity_coeff * static_cast<double>(spurious) /
                          std::max(1, timeline.n_pre_ticks);
  return std::clamp(coverage - sparsity, -1.0, 1.0);
}

double score_thought_quality(const Trajectory& trajectory, const StreamTimeline& timeline,
                             const Judge& judge) {
  const auto keywords = slot_keywords(timeline);
  const auto values = tracked_values(timeline);
  double sum = 0.0;
  int count = 0;
  for (const auto& s : trajectory.steps) {
    if (s.action.kind != ActionKind::think) continue;
    JudgeRequest req;
    req.kind = JudgeRequest::Kind::thought;
    req.texts = {s.action.text};
    req.slot_keywords = keywords;
    req.tracked_values = values;
    sum += judge.evaluate(req).score;
    ++count;
  }
  return count == 0 ? 0.0 : sum / count;
}

double score_chain_consistency(const Trajectory& trajectory, const StreamTimeline& timeline,
                               const Judge& judge) {
  JudgeRequest req;
  req.kind = JudgeRequest::Kind::chain;
  for (const auto& s : trajectory.steps) {
    if (s.action.kind == ActionKind::think) req.texts.push_back(s.action.text);
  }
  if (trajectory.final_think) req.texts.push_back(trajectory.final_think->text);
  req.tracked_values = tracked_values(timeline);
  req.final_value = final_tracked_value(timeline);
  return judge.evaluate(req).score;
}

RewardBreakdown total_reward(const TermValues& terms, const RewardConfig& config) {
  RewardBreakdown out;
  out.r_a = terms.r_a;
  out.r_f = terms.r_f;
  out.r_s = terms.r_s;
  out.r_u = terms.r_u;
  out.r_t = config.use_thought_quality ? terms.r_t : 0.0;
  out.r_c = config.use_chain_consistency ? terms.r_c : 0.0;
  out.gated = terms.r_f <= 0.0;
  if (out.gated) {
    out.total = config.weights.format * out.r_f;
    return out;
  }
  const auto& w = config.weights;
  out.total = w.answer * out.r_a + w.format * out.r_f + w.latency * out.r_s + w.update * out.r_u;
  if (config.use_thought_quality) out.total += w.thought * out.r_t;
  if (config.use_chain_consistency && out.r_a > 0.0)
    out.total += w.consistency * out.r_a * out.r_c;
  return out;
}

RewardBreakdown score_trajectory(const Trajectory& trajectory, const StreamTimeline& timeline,
                                 const TaskContext& task, const Judge& judge,
                                 const RewardConfig& config) {
  TermValues terms;
  const auto protocol = check_protocol(trajectory, timeline, config.limits);
  terms.r_f = protocol.report.valid ? config.format_valid_score : config.format_invalid_score;

  const auto answer = score_answer(trajectory, task, judge, config.effort);
  terms.r_a = answer.value;
  terms.r_s = score_latency(trajectory.final_think_tokens(), answer.base_correct,
                            answer.shape_ok, config.latency);
  terms.r_u = score_update_timing(trajectory, timeline, config.update);

  if (terms.r_f > 0.0) {
    if (config.use_thought_quality)
      terms.r_t = score_thought_quality(trajectory, timeline, judge);
    if (config.use_chain_consistency)
      terms.r_c = score_chain_consistency(trajectory, timeline, judge);
  }
  return total_reward(terms, config);
}

}  // namespace wta

#include "wta/episode.hpp"

#include <stdexcept>

namespace wta {

EnvItem prepare_item(const Record& record, double tick_s, double min_window_s) {
  EnvItem item;
  item.record = record;
  auto [timeline, gold] = align_gold_trace(record, tick_s, min_window_s);
  item.timeline = std::move(timeline);
  item.gold = std::move(gold);
  item.task = task_context(record);
  return item;
}

std::vector<EnvItem> prepare_items(const std::vector<Record>& records, double tick_s,
                                   double min_window_s) {
  std::vector<EnvItem> items;
  items.reserve(records.size());
  for (const auto& r : records) items.push_back(prepare_item(r, tick_s, min_window_s));
  return items;
}

EpisodeRun run_episode(const PolicyParams& params, const EnvItem& item,
                       const EpisodeOptions& options) {
  if (options.sample && options.rng == nullptr)
    throw std::invalid_argument("run_episode: sampling requires an rng");

  const auto& tl = item.timeline;
  EpisodeRun run;
  run.context = DecisionContext::for_timeline(tl);
  run.trajectory.meta.prompt_id = item.record.sample_id;
  run.trajectory.meta.timeline_id = item.record.sample_id;

  std::vector<std::string> memory;
  const bool cost_on = options.cost.prefill_rate > 0.0 || options.cost.gen_rate > 0.0;
  double busy_until = 0.0;
  bool answered_early = false;

  const std::vector<ActionKind> listening_legal = {ActionKind::wait, ActionKind::think};
  for (int tick = 0; tick < tl.n_pre_ticks && !answered_early; ++tick) {
    const double arrival = static_cast<double>(tick) * tl.tick_s;
    if (cost_on && arrival < busy_until) {
      // Stale trigger: the previous call is still running, skip this tick.
      run.skipped_ticks += 1;
      continue;
    }
    const auto obs = observe_replay(tl, tick, memory);
    const auto features = featurize(obs, tl, run.context);

    ActionKind kind;
    bool from_policy = true;
    if (options.override_action) {
      if (auto forced = options.override_action(tick, obs)) {
        kind = *forced;
        from_policy = false;
      } else {
        kind = options.sample ? sample_action(params, features, listening_legal, *options.rng)
                              : argmax_action(params, features, listening_legal);
      }
    } else {
      kind = options.sample ? sample_action(params, features, listening_legal, *options.rng)
                            : argmax_action(params, features, listening_legal);
    }

    Action action;
    switch (kind) {
      case ActionKind::wait:
        action = Action::make_wait();
        break;
      case ActionKind::think: {
        const auto composed = compose_think(obs, tl, run.context, options.think_cap);
        commit_think(run.context, composed, tick);
        memory.push_back(composed.action.text);
        action = composed.action;
        break;
      }
      case ActionKind::answer:
        // Only reachable through a sabotage override; the protocol check will
        // flag it and the episode ends here.
        action = Action::make_answer(render_answer(tl, run.context));
        answered_early = true;
        break;
    }
    run.trajectory.steps.push_back({tick, action});

    if (from_policy) {
      const auto lp = log_prob_and_grad(params, features, listening_legal, kind);
      run.decisions.push_back({features, kind, lp.log_prob});
    }
    if (cost_on) {
      const double call_cost = prefix_cover_s(tl, tick) * options.cost.prefill_rate +
                               static_cast<double>(action.tokens) * options.cost.gen_rate;
      busy_until = arrival + call_cost;
    }
  }

  if (!answered_early) {
    const auto final_think = compose_final_think(tl, run.context, options.think_cap);
    commit_think(run.context, final_think, tl.n_pre_ticks);
    memory.push_back(final_think.action.text);
    run.trajectory.final_think = final_think.action;
    run.trajectory.answer = Action::make_answer(render_answer(tl, run.context));
  }
  return run;
}

EpisodeRun run_offline_episode(const PolicyParams& params, const EnvItem& item, int think_cap) {
  (void)params;  // no listening decisions; composition is parameter-free
  const auto& tl = item.timeline;
  EpisodeRun run;
  run.context = DecisionContext::for_timeline(tl);
  run.trajectory.meta.prompt_id = item.record.sample_id;
  run.trajectory.meta.timeline_id = item.record.sample_id;

  const auto final_think = compose_final_think(tl, run.context, think_cap);
  commit_think(run.context, final_think, tl.n_pre_ticks);
  run.trajectory.final_think = final_think.action;
  run.trajectory.answer = Action::make_answer(render_answer(tl, run.context));
  return run;
}

}  // namespace wta

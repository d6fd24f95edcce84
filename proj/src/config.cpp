#include "wta/config.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace wta {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T>
void get_if(const ordered_json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  ordered_json j;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["out_dir"] = c.out_dir;
  j["stream"] = {{"tick_s", c.tick_s}, {"min_window_s", c.min_window_s}};
  j["caps"] = {{"think_tokens", c.reward.limits.think_cap},
               {"answer_tokens", c.reward.limits.answer_cap}};
  j["reward"] = {
      {"lambda_answer", c.reward.weights.answer},
      {"lambda_format", c.reward.weights.format},
      {"lambda_latency", c.reward.weights.latency},
      {"lambda_update", c.reward.weights.update},
      {"lambda_thought", c.reward.weights.thought},
      {"lambda_consistency", c.reward.weights.consistency},
      {"format_valid_score", c.reward.format_valid_score},
      {"format_invalid_score", c.reward.format_invalid_score},
      {"use_thought_quality", c.reward.use_thought_quality},
      {"use_chain_consistency", c.reward.use_chain_consistency},
      {"latency",
       {{"free_budget", c.reward.latency.free_budget},
        {"slope", c.reward.latency.slope},
        {"cap", c.reward.latency.cap},
        {"bonus", c.reward.latency.bonus},
        {"bonus_min_tokens", c.reward.latency.bonus_min_tokens},
        {"bonus_max_tokens", c.reward.latency.bonus_max_tokens}}},
      {"update",
       {{"tolerance_ticks", c.reward.update.tolerance_ticks},
        {"sparsity_coeff", c.reward.update.sparsity_coeff}}},
      {"effort",
       {{"min_tokens", c.reward.effort.min_tokens},
        {"tokens_per_level", c.reward.effort.tokens_per_level},
        {"floor_multiplier", c.reward.effort.floor_multiplier},
        {"shape_penalty", c.reward.effort.shape_penalty}}}};
  ordered_json mechanisms = ordered_json::array();
  for (auto m : c.gen.mechanisms) mechanisms.push_back(mechanism_name(m));
  j["gen"] = {{"n_records", c.gen.n_records},
              {"mechanisms", mechanisms},
              {"nonverifiable_fraction", c.gen.nonverifiable_fraction},
              {"train_fraction", c.train_fraction}};
  j["sft"] = {{"steps", c.sft.steps}, {"learning_rate", c.sft.learning_rate}};
  j["dapo"] = {{"steps", c.dapo.steps},
               {"batch_records", c.dapo.batch_records},
               {"group_size", c.dapo.group_size},
               {"learning_rate", c.dapo.learning_rate},
               {"warmup_steps", c.dapo.warmup_steps},
               {"inner_steps", c.dapo.inner_steps},
               {"min_valid_fraction", c.dapo.min_valid_fraction},
               {"retry_budget", c.dapo.retry_budget},
               {"eps_low", c.dapo.clip.eps_low},
               {"eps_high", c.dapo.clip.eps_high},
               {"kl_coeff", c.dapo.clip.kl_coeff}};
  j["eval"] = {{"bootstrap_resamples", c.bootstrap_resamples},
               {"confidence", c.confidence},
               {"prefill_rate", c.cost.prefill_rate},
               {"gen_rate", c.cost.gen_rate}};
  return j.dump(2);
}

RunConfig config_from_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  RunConfig c;
  get_if(j, "seed", c.seed);
  get_if(j, "threads", c.threads);
  get_if(j, "out_dir", c.out_dir);
  if (j.contains("stream")) {
    get_if(j["stream"], "tick_s", c.tick_s);
    get_if(j["stream"], "min_window_s", c.min_window_s);
  }
  if (j.contains("caps")) {
    get_if(j["caps"], "think_tokens", c.reward.limits.think_cap);
    get_if(j["caps"], "answer_tokens", c.reward.limits.answer_cap);
  }
  if (j.contains("reward")) {
    const auto& r = j["reward"];
    get_if(r, "lambda_answer", c.reward.weights.answer);
    get_if(r, "lambda_format", c.reward.weights.format);
    get_if(r, "lambda_latency", c.reward.weights.latency);
    get_if(r, "lambda_update", c.reward.weights.update);
    get_if(r, "lambda_thought", c.reward.weights.thought);
    get_if(r, "lambda_consistency", c.reward.weights.consistency);
    get_if(r, "format_valid_score", c.reward.format_valid_score);
    get_if(r, "format_invalid_score", c.reward.format_invalid_score);
    get_if(r, "use_thought_quality", c.reward.use_thought_quality);
    get_if(r, "use_chain_consistency", c.reward.use_chain_consistency);
    if (r.contains("latency")) {
      get_if(r["latency"], "free_budget", c.reward.latency.free_budget);
      get_if(r["latency"], "slope", c.reward.latency.slope);
      get_if(r["latency"], "cap", c.reward.latency.cap);
      get_if(r["latency"], "bonus", c.reward.latency.bonus);
      get_if(r["latency"], "bonus_min_tokens", c.reward.latency.bonus_min_tokens);
      get_if(r["latency"], "bonus_max_tokens", c.reward.latency.bonus_max_tokens);
    }
    if (r.contains("update")) {
      get_if(r["update"], "tolerance_ticks", c.reward.update.tolerance_ticks);
      get_if(r["update"], "sparsity_coeff", c.reward.update.sparsity_coeff);
    }
    if (r.contains("effort")) {
      get_if(r["effort"], "min_tokens", c.reward.effort.min_tokens);
      get_if(r["effort"], "tokens_per_level", c.reward.effort.tokens_per_level);
      get_if(r["effort"], "floor_multiplier", c.reward.effort.floor_multiplier);
      get_if(r["effort"], "shape_penalty", c.reward.effort.shape_penalty);
    }
  }
  if (j.contains("gen")) {
    const auto& g = j["gen"];
    get_if(g, "n_records", c.gen.n_records);
    get_if(g, "nonverifiable_fraction", c.gen.nonverifiable_fraction);
    get_if(g, "train_fraction", c.train_fraction);
    if (g.contains("mechanisms")) {
      c.gen.mechanisms.clear();
      for (const auto& name : g["mechanisms"])
        c.gen.mechanisms.push_back(mechanism_from_name(name.get<std::string>()));
    }
  }
  if (j.contains("sft")) {
    get_if(j["sft"], "steps", c.sft.steps);
    get_if(j["sft"], "learning_rate", c.sft.learning_rate);
  }
  if (j.contains("dapo")) {
    const auto& d = j["dapo"];
    get_if(d, "steps", c.dapo.steps);
    get_if(d, "batch_records", c.dapo.batch_records);
    get_if(d, "group_size", c.dapo.group_size);
    get_if(d, "learning_rate", c.dapo.learning_rate);
    get_if(d, "warmup_steps", c.dapo.warmup_steps);
    get_if(d, "inner_steps", c.dapo.inner_steps);
    get_if(d, "min_valid_fraction", c.dapo.min_valid_fraction);
    get_if(d, "retry_budget", c.dapo.retry_budget);
    get_if(d, "eps_low", c.dapo.clip.eps_low);
    get_if(d, "eps_high", c.dapo.clip.eps_high);
    get_if(d, "kl_coeff", c.dapo.clip.kl_coeff);
  }
  if (j.contains("eval")) {
    get_if(j["eval"], "bootstrap_resamples", c.bootstrap_resamples);
    get_if(j["eval"], "confidence", c.confidence);
    get_if(j["eval"], "prefill_rate", c.cost.prefill_rate);
    get_if(j["eval"], "gen_rate", c.cost.gen_rate);
  }
  c.dapo.seed = c.seed;
  c.gen.seed = c.seed;
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

void save_config(const RunConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config: " + path);
  out << config_to_json(config) << "\n";
}

}  // namespace wta

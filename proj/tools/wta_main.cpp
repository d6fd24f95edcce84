// wta: seeded end-to-end driver for the wait-think-answer controller lab.
// Subcommands: gen-data, train-sft, train-dapo, eval, report.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wta/config.hpp"
#include "wta/eval.hpp"
#include "wta/training.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string resolve_out_dir(const std::string& flag_value, const wta::RunConfig& config) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("WTA_OUT_ROOT")) return env;
  return config.out_dir;
}

// Every command echoes its effective configuration next to its outputs.
void echo_config(const wta::RunConfig& config, const std::string& dir, const std::string& stage) {
  if (!dir.empty()) fs::create_directories(dir);
  wta::save_config(config, (dir.empty() ? std::string(".") : dir) + "/config." + stage + ".json");
}

std::vector<wta::EnvItem> load_items(const std::string& path, const wta::RunConfig& config) {
  return wta::prepare_items(wta::read_records(path), config.tick_s, config.min_window_s);
}

void write_sft_log(const std::string& path, const std::vector<wta::SftStepLog>& log) {
  std::ofstream out(path);
  for (const auto& e : log) {
    ordered_json j;
    j["step"] = e.step;
    j["loss"] = e.loss;
    j["token_accuracy"] = e.token_accuracy;
    out << j.dump() << "\n";
  }
}

void write_dapo_log(const std::string& path, const std::vector<wta::DapoStepLog>& log) {
  std::ofstream out(path);
  for (const auto& e : log) {
    ordered_json j;
    j["step"] = e.step;
    j["mean_reward"] = e.mean_reward;
    j["mean_final_think_tokens"] = e.mean_final_think_tokens;
    j["loss"] = e.loss;
    j["mean_kl"] = e.mean_kl;
    j["accepted"] = e.accepted;
    j["resampled"] = e.resampled;
    j["skipped"] = e.skipped;
    j["updated"] = e.updated;
    out << j.dump() << "\n";
  }
}

struct LaneRow {
  std::string lane;
  std::string protocol;
  wta::LaneReport report;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

constexpr const char* kCsvHeader =
    "lane,protocol,task,items,accuracy,row_weighted_accuracy,mean_final_think_tokens,"
    "mean_rtf,ci_low,ci_high";

void append_csv(std::ofstream& out, const LaneRow& row) {
  for (const auto& task : row.report.per_task) {
    out << row.lane << ',' << row.protocol << ',' << wta::task_kind_name(task.task) << ','
        << task.items << ',' << std::fixed << std::setprecision(4) << task.accuracy
        << ",,,,,\n";
  }
  out << row.lane << ',' << row.protocol << ",ALL," << row.report.total_items << ','
      << std::fixed << std::setprecision(4) << row.report.row_weighted_accuracy << ','
      << row.report.row_weighted_accuracy << ',' << row.report.mean_final_think_tokens << ','
      << std::setprecision(6) << row.report.mean_rtf << ',' << std::setprecision(4)
      << row.ci_low << ',' << row.ci_high << "\n";
}

void print_lane_table(const std::vector<LaneRow>& rows) {
  std::cout << "\n  " << std::left << std::setw(16) << "lane" << std::setw(12) << "protocol"
            << std::right << std::setw(7) << "items" << std::setw(9) << "acc%" << std::setw(9)
            << "final" << std::setw(10) << "rtf" << std::setw(17) << "95% CI" << "\n";
  std::cout << "  " << std::string(78, '-') << "\n";
  for (const auto& r : rows) {
    char ci[32];
    std::snprintf(ci, sizeof(ci), "[%.3f, %.3f]", r.ci_low, r.ci_high);
    std::cout << "  " << std::left << std::setw(16) << r.lane << std::setw(12) << r.protocol
              << std::right << std::setw(7) << r.report.total_items << std::setw(9)
              << std::fixed << std::setprecision(2) << r.report.row_weighted_accuracy
              << std::setw(9) << std::setprecision(2) << r.report.mean_final_think_tokens
              << std::setw(10) << std::setprecision(4) << r.report.mean_rtf << std::setw(17)
              << ci << "\n";
  }
  std::cout << "\n";
}

int cmd_gen_data(const wta::RunConfig& config, const std::string& out_flag) {
  const auto dir = resolve_out_dir(out_flag, config);
  echo_config(config, dir, "gen");
  auto gen = config.gen;
  gen.seed = config.seed;
  const auto records = wta::generate_batch(gen, config.exec());
  const auto summary = wta::export_dataset(records, config.train_fraction, dir);
  std::cout << "wrote " << summary.sft_train << " sft train, " << summary.sft_val
            << " validation, " << summary.dapo_train
            << " verifiable policy-optimization rows to " << dir << "\n";
  return 0;
}

int cmd_train_sft(const wta::RunConfig& config, const std::string& data,
                  const std::string& init_path, const std::string& out_path,
                  const std::string& log_path) {
  if (fs::path(out_path).has_parent_path())
    fs::create_directories(fs::path(out_path).parent_path());
  const auto items = load_items(data, config);
  wta::PolicyParams init;
  if (!init_path.empty()) init = wta::load_params(init_path);
  auto [params, log] = wta::train_sft(init, items, config.sft, config.exec());
  wta::save_params(params, out_path);
  if (!log_path.empty()) write_sft_log(log_path, log);
  echo_config(config, fs::path(out_path).parent_path().string(), "sft");
  std::cout << "sft: " << config.sft.steps << " steps on " << items.size()
            << " records; loss " << log.front().loss << " -> " << log.back().loss
            << ", token accuracy " << log.back().token_accuracy << "\n"
            << "checkpoint: " << out_path << "\n";
  return 0;
}

int cmd_train_dapo(const wta::RunConfig& config, const std::string& data,
                   const std::string& init_path, const std::string& out_path,
                   const std::string& log_path) {
  if (fs::path(out_path).has_parent_path())
    fs::create_directories(fs::path(out_path).parent_path());
  const auto items = load_items(data, config);
  const auto init = wta::load_params(init_path);
  wta::StubJudge judge;
  auto dapo = config.dapo;
  dapo.seed = config.seed;
  try {
    const auto result = wta::train_dapo(init, items, dapo, config.reward, judge, config.exec());
    wta::save_params(result.params, out_path);
    if (!log_path.empty()) write_dapo_log(log_path, result.log);
    echo_config(config, fs::path(out_path).parent_path().string(), "dapo");
    const auto& first = result.log.front();
    const auto& last = result.log.back();
    std::cout << "dapo: " << dapo.steps << " steps, " << result.updates
              << " updates; mean reward " << first.mean_reward << " -> " << last.mean_reward
              << ", final-think tokens " << first.mean_final_think_tokens << " -> "
              << last.mean_final_think_tokens << "\n"
              << "checkpoint: " << out_path << "\n";
    return 0;
  } catch (const wta::TrainAbort& abort) {
    std::cerr << "train-dapo aborted: " << abort.what() << "\n"
              << "  steps run " << abort.stats.steps_run << ", updates " << abort.stats.updates
              << ", accepted groups " << abort.stats.accepted_groups << ", skipped groups "
              << abort.stats.skipped_groups << "\n";
    return 2;
  }
}

int cmd_eval(const wta::RunConfig& config, const std::string& data,
             const std::vector<std::string>& lanes, bool include_base,
             const std::string& report_path) {
  const auto items = load_items(data, config);
  std::vector<std::pair<std::string, wta::PolicyParams>> checkpoints;
  if (include_base) checkpoints.emplace_back("base", wta::PolicyParams{});
  for (const auto& spec : lanes) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("--ckpt wants name=path, got: " + spec);
    checkpoints.emplace_back(spec.substr(0, eq), wta::load_params(spec.substr(eq + 1)));
  }
  if (checkpoints.empty()) throw std::runtime_error("nothing to evaluate; pass --base or --ckpt");

  wta::EvalConfig eval_config;
  eval_config.cost = config.cost;
  eval_config.think_cap = config.reward.limits.think_cap;

  std::vector<LaneRow> rows;
  for (const auto& [name, params] : checkpoints) {
    for (const bool offline : {false, true}) {
      const auto results = offline
                               ? wta::run_offline(params, items, eval_config, config.exec())
                               : wta::run_deployment(params, items, eval_config, config.exec());
      LaneRow row;
      row.lane = name;
      row.protocol = offline ? "offline" : "deployment";
      row.report = wta::aggregate(results);
      std::vector<std::uint8_t> flags;
      for (const auto& r : results) flags.push_back(r.correct ? 1 : 0);
      std::tie(row.ci_low, row.ci_high) = wta::bootstrap_ci(
          flags, config.bootstrap_resamples, config.confidence, config.seed, config.exec());
      rows.push_back(std::move(row));
    }
  }
  print_lane_table(rows);
  if (!report_path.empty()) {
    if (fs::path(report_path).has_parent_path())
      fs::create_directories(fs::path(report_path).parent_path());
    std::ofstream out(report_path);
    if (!out) throw std::runtime_error("cannot write report: " + report_path);
    out << kCsvHeader << "\n";
    for (const auto& row : rows) append_csv(out, row);
    std::cout << "report: " << report_path << "\n";
    echo_config(config, fs::path(report_path).parent_path().string(), "eval");
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs) {
  std::cout << kCsvHeader << "\n";
  for (const auto& path : inputs) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read report: " + path);
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (!line.empty()) std::cout << line << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wait-think-answer streaming controller lab"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data, init_path, out_path, log_path, report_path;
  std::vector<std::string> ckpts, report_inputs;
  bool include_base = false;

  // Flag overrides applied on top of the config file.
  std::int64_t seed_flag = -1;
  int n_flag = -1, threads_flag = -1, steps_flag = -1;
  double lr_flag = -1.0;
  int stack_flag = 6;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "run configuration file (json)");
    cmd->add_option("--seed", seed_flag, "override config seed");
    cmd->add_option("--threads", threads_flag, "0 = parallel default, 1 = serial reference");
  };

  std::vector<std::string> mechanisms_flag;
  auto* gen = app.add_subcommand("gen-data", "generate and export a seeded dataset");
  add_common(gen);
  gen->add_option("--n", n_flag, "number of records");
  gen->add_option("--mechanisms", mechanisms_flag, "restrict the reasoning-mechanism mix");
  gen->add_option("--out", out_dir, "output directory (default WTA_OUT_ROOT or config)");

  auto* sft = app.add_subcommand("train-sft", "behavior-clone gold traces");
  add_common(sft);
  sft->add_option("--data", data, "sft training jsonl")->required();
  sft->add_option("--init", init_path, "optional initial checkpoint");
  sft->add_option("--out", out_path, "checkpoint to write")->required();
  sft->add_option("--log", log_path, "loss curve jsonl");
  sft->add_option("--steps", steps_flag, "override sft steps");
  sft->add_option("--lr", lr_flag, "override sft learning rate");

  auto* dapo = app.add_subcommand("train-dapo", "policy-optimize from an sft checkpoint");
  add_common(dapo);
  dapo->add_option("--data", data, "verifiable training jsonl")->required();
  dapo->add_option("--init", init_path, "sft checkpoint")->required();
  dapo->add_option("--out", out_path, "checkpoint to write")->required();
  dapo->add_option("--log", log_path, "training log jsonl");
  dapo->add_option("--steps", steps_flag, "override dapo steps");
  dapo->add_option("--lr", lr_flag, "override dapo learning rate");
  dapo->add_option("--stack", stack_flag, "reward stack: 4, 5, or 6 terms")
      ->check(CLI::IsMember({4, 5, 6}));

  auto* eval = app.add_subcommand("eval", "offline + deployment lanes for checkpoints");
  add_common(eval);
  eval->add_option("--data", data, "evaluation jsonl")->required();
  eval->add_option("--ckpt", ckpts, "lane as name=checkpoint-path");
  eval->add_flag("--base", include_base, "include the untrained base lane");
  eval->add_option("--report", report_path, "write a csv report");

  auto* report = app.add_subcommand("report", "merge and print csv reports");
  report->add_option("--inputs", report_inputs, "csv reports to merge")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    wta::RunConfig config;
    if (!config_path.empty()) config = wta::load_config(config_path);
    if (seed_flag >= 0) {
      config.seed = static_cast<std::uint64_t>(seed_flag);
      config.gen.seed = config.seed;
      config.dapo.seed = config.seed;
    }
    if (threads_flag >= 0) config.threads = threads_flag;
    if (n_flag > 0) config.gen.n_records = n_flag;
    if (!mechanisms_flag.empty()) {
      config.gen.mechanisms.clear();
      for (const auto& name : mechanisms_flag)
        config.gen.mechanisms.push_back(wta::mechanism_from_name(name));
    }
    if (steps_flag > 0) {
      config.sft.steps = steps_flag;
      config.dapo.steps = steps_flag;
    }
    if (lr_flag > 0.0) {
      config.sft.learning_rate = lr_flag;
      config.dapo.learning_rate = lr_flag;
    }
    if (stack_flag < 6) config.reward.use_chain_consistency = false;
    if (stack_flag < 5) config.reward.use_thought_quality = false;

    if (gen->parsed()) return cmd_gen_data(config, out_dir);
    if (sft->parsed()) return cmd_train_sft(config, data, init_path, out_path, log_path);
    if (dapo->parsed()) return cmd_train_dapo(config, data, init_path, out_path, log_path);
    if (eval->parsed()) return cmd_eval(config, data, ckpts, include_base, report_path);
    if (report->parsed()) return cmd_report(report_inputs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

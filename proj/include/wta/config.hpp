#pragma once

#include <cstdint>
#include <string>

#include "wta/datagen.hpp"
#include "wta/eval.hpp"
#include "wta/training.hpp"

namespace wta {

// One configuration drives every stage; reward-stack ablations are pure
// config diffs via the two judge-term enable flags.
struct RunConfig {
  std::uint64_t seed = 0;
  int threads = 0;  // 0: OpenMP default; 1: serial reference path
  std::string out_dir = "out";

  double tick_s = 0.5;
  double min_window_s = 2.0;

  RewardConfig reward;

  GenConfig gen;
  double train_fraction = 0.9;

  SftConfig sft;
  DapoConfig dapo;

  int bootstrap_resamples = 10000;
  double confidence = 0.95;
  CostModel cost;

  Exec exec() const { return threads == 1 ? Exec::serial : Exec::openmp; }
};

RunConfig load_config(const std::string& path);
void save_config(const RunConfig& config, const std::string& path);
std::string config_to_json(const RunConfig& config);
RunConfig config_from_json(const std::string& text);

}  // namespace wta

#include "doctest.h"
#include "helpers.hpp"
#include "wta/eval.hpp"
#include "wta/training.hpp"

using namespace wta;

// Every batch kernel runs in a serial reference mode and an OpenMP mode;
// results must be byte-identical because work is written to per-index slots
// and reduced in index order.

namespace {

const StubJudge kJudge;

}  // namespace

TEST_CASE("record generation: serial and parallel outputs are identical") {
  GenConfig config;
  config.seed = 3;
  config.n_records = 120;
  const auto serial = generate_batch(config, Exec::serial);
  const auto parallel = generate_batch(config, Exec::openmp);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(record_to_jsonl(serial[i]) == record_to_jsonl(parallel[i]));
  }
}

TEST_CASE("sft batch: serial and parallel gradients are bitwise equal") {
  GenConfig config;
  config.seed = 5;
  config.n_records = 40;
  const auto items = prepare_items(generate_batch(config));
  PolicyParams params;
  Rng rng(2);
  for (auto& w : params.weights) w = rng.uniform_real(-1.0, 1.0);
  const auto serial = sft_batch(params, items, Exec::serial);
  const auto parallel = sft_batch(params, items, Exec::openmp);
  CHECK(serial.loss == parallel.loss);
  CHECK(serial.token_accuracy == parallel.token_accuracy);
  for (int p = 0; p < kParamCount; ++p) CHECK(serial.grad[p] == parallel.grad[p]);
}

TEST_CASE("rollout groups: serial and parallel sampling are identical") {
  GenConfig config;
  config.seed = 6;
  config.n_records = 4;
  const auto items = prepare_items(generate_batch(config));
  RewardConfig reward;
  PolicyParams params;
  for (const auto& item : items) {
    const auto serial = rollout_group(params, item, 8, 99, reward, kJudge, Exec::serial);
    const auto parallel = rollout_group(params, item, 8, 99, reward, kJudge, Exec::openmp);
    for (std::size_t g = 0; g < serial.rollouts.size(); ++g) {
      CHECK(serialize(serial.rollouts[g].trajectory) ==
            serialize(parallel.rollouts[g].trajectory));
      CHECK(serial.rollouts[g].reward.total == parallel.rollouts[g].reward.total);
    }
  }
}

TEST_CASE("evaluation: serial and parallel reports are identical") {
  GenConfig config;
  config.seed = 7;
  config.n_records = 60;
  const auto items = prepare_items(generate_batch(config));
  PolicyParams params;
  params.at(0, 1) = 0.4;  // mildly think-happy argmax policy
  params.at(3, 1) = 0.8;

  const auto serial = run_deployment(params, items, {}, Exec::serial);
  const auto parallel = run_deployment(params, items, {}, Exec::openmp);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].correct == parallel[i].correct);
    CHECK(serial[i].rtf == parallel[i].rtf);
    CHECK(serialize(serial[i].trajectory) == serialize(parallel[i].trajectory));
  }
  const auto ra = aggregate(serial);
  const auto rb = aggregate(parallel);
  CHECK(ra.row_weighted_accuracy == rb.row_weighted_accuracy);
  CHECK(ra.mean_final_think_tokens == rb.mean_final_think_tokens);
}

TEST_CASE("bootstrap: serial and parallel intervals are identical") {
  std::vector<std::uint8_t> flags(186, 0);
  for (int i = 0; i < 119; ++i) flags[static_cast<std::size_t>(i)] = 1;
  const auto serial = bootstrap_ci(flags, 5000, 0.95, 11, Exec::serial);
  const auto parallel = bootstrap_ci(flags, 5000, 0.95, 11, Exec::openmp);
  CHECK(serial.first == parallel.first);
  CHECK(serial.second == parallel.second);
}

TEST_CASE("dapo training: serial and parallel runs produce identical logs") {
  GenConfig config;
  config.seed = 8;
  config.n_records = 16;
  const auto items = prepare_items(generate_batch(config));
  RewardConfig reward;
  SftConfig warm;
  warm.steps = 30;
  auto [init, warm_log] = train_sft(PolicyParams{}, items, warm);

  DapoConfig dapo;
  dapo.steps = 8;
  dapo.batch_records = 4;
  dapo.group_size = 4;
  dapo.seed = 9;
  const auto serial = train_dapo(init, items, dapo, reward, kJudge, Exec::serial);
  const auto parallel = train_dapo(init, items, dapo, reward, kJudge, Exec::openmp);
  REQUIRE(serial.log.size() == parallel.log.size());
  for (std::size_t i = 0; i < serial.log.size(); ++i) {
    CHECK(serial.log[i].mean_reward == parallel.log[i].mean_reward);
    CHECK(serial.log[i].loss == parallel.log[i].loss);
  }
  for (int p = 0; p < kParamCount; ++p)
    CHECK(serial.params.weights[p] == parallel.params.weights[p]);
}

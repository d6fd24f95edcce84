// wta-bench: times the batch kernels in their serial reference mode and the
// OpenMP mode, checking that both produce identical results.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include "wta/eval.hpp"
#include "wta/training.hpp"

using namespace wta;

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn) {
  const auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("  %-26s %10.1f ms %10.1f ms %8.2fx   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  std::printf("batch kernels, serial reference vs OpenMP (%d threads)\n\n",
              hardware_threads());
  std::printf("  %-26s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  GenConfig gen;
  gen.seed = 1;
  gen.n_records = 1500;
  std::vector<Record> records_serial, records_parallel;
  const double gen_s = time_ms([&] { records_serial = generate_batch(gen, Exec::serial); });
  const double gen_p = time_ms([&] { records_parallel = generate_batch(gen, Exec::openmp); });
  report("record generation", gen_s, gen_p, records_serial == records_parallel);

  const auto items = prepare_items(records_serial);
  const std::vector<EnvItem> eval_items(items.begin(), items.begin() + 400);

  PolicyParams params;
  params.at(0, 1) = 0.3;
  params.at(3, 1) = 0.8;

  SftBatchResult sft_serial, sft_parallel;
  const double sft_s = time_ms([&] {
    for (int i = 0; i < 5; ++i) sft_serial = sft_batch(params, items, Exec::serial);
  });
  const double sft_p = time_ms([&] {
    for (int i = 0; i < 5; ++i) sft_parallel = sft_batch(params, items, Exec::openmp);
  });
  report("sft forward/backward x5", sft_s, sft_p,
         sft_serial.loss == sft_parallel.loss && sft_serial.grad == sft_parallel.grad);

  RewardConfig reward;
  StubJudge judge;
  std::vector<double> group_rewards_serial, group_rewards_parallel;
  const double roll_s = time_ms([&] {
    for (int i = 0; i < 64; ++i) {
      const auto g = rollout_group(params, items[static_cast<std::size_t>(i)], 8,
                                   static_cast<std::uint64_t>(i), reward, judge, Exec::serial);
      group_rewards_serial.push_back(g.mean_reward());
    }
  });
  const double roll_p = time_ms([&] {
    for (int i = 0; i < 64; ++i) {
      const auto g = rollout_group(params, items[static_cast<std::size_t>(i)], 8,
                                   static_cast<std::uint64_t>(i), reward, judge, Exec::openmp);
      group_rewards_parallel.push_back(g.mean_reward());
    }
  });
  report("rollout groups x64", roll_s, roll_p, group_rewards_serial == group_rewards_parallel);

  std::vector<EpisodeResult> eval_serial, eval_parallel;
  const double eval_s =
      time_ms([&] { eval_serial = run_deployment(params, eval_items, {}, Exec::serial); });
  const double eval_p =
      time_ms([&] { eval_parallel = run_deployment(params, eval_items, {}, Exec::openmp); });
  bool eval_same = eval_serial.size() == eval_parallel.size();
  for (std::size_t i = 0; eval_same && i < eval_serial.size(); ++i) {
    eval_same = eval_serial[i].correct == eval_parallel[i].correct &&
                serialize(eval_serial[i].trajectory) == serialize(eval_parallel[i].trajectory);
  }
  report("deployment eval x400", eval_s, eval_p, eval_same);

  std::vector<std::uint8_t> flags(186, 0);
  for (int i = 0; i < 119; ++i) flags[static_cast<std::size_t>(i)] = 1;
  std::pair<double, double> ci_serial, ci_parallel;
  const double boot_s =
      time_ms([&] { ci_serial = bootstrap_ci(flags, 50000, 0.95, 7, Exec::serial); });
  const double boot_p =
      time_ms([&] { ci_parallel = bootstrap_ci(flags, 50000, 0.95, 7, Exec::openmp); });
  report("bootstrap x50000", boot_s, boot_p, ci_serial == ci_parallel);

  return 0;
}

#include "doctest.h"
#include "helpers.hpp"
#include "wta/trace.hpp"

using namespace wta;

namespace {

const StreamTimeline& tl10() {
  static const StreamTimeline tl = test::plain_timeline(12);  // 10 listening ticks
  return tl;
}

Trajectory tiny_valid(const StreamTimeline& tl) {
  Trajectory traj;
  for (int k = 0; k < tl.n_pre_ticks; ++k) traj.steps.push_back({k, Action::make_wait()});
  traj.steps[1].action = Action::make_think("sum is 8");
  traj.final_think = Action::make_think("total 10");
  traj.answer = Action::make_answer("10");
  return traj;
}

}  // namespace

TEST_CASE("serialize emits canonical tags in order") {
  const auto tl = make_timeline(test::words_even("a b"), {});  // 2 ticks
  Trajectory traj;
  traj.steps.push_back({0, Action::make_wait()});
  traj.steps.push_back({1, Action::make_think("sum is 8")});
  traj.final_think = Action::make_think("total 10");
  traj.answer = Action::make_answer("10");
  CHECK(serialize(traj) ==
        "<wait/><think>sum is 8</think><think>total 10</think><answer>10</answer>");

  Trajectory minimal;
  minimal.final_think = Action::make_think("x");
  minimal.answer = Action::make_answer("y");
  CHECK(serialize(minimal) == "<think>x</think><answer>y</answer>");
}

TEST_CASE("parse assigns grid ticks and tolerates protocol violations") {
  SUBCASE("pre-endpoint fragment") {
    const auto r = parse("<wait/><wait/><think>x=3</think>", tl10());
    REQUIRE(r.ok());
    REQUIRE(r.trajectory->steps.size() == 3);
    CHECK(r.trajectory->steps[2].tick == 2);
    CHECK(r.trajectory->steps[2].action.kind == ActionKind::think);
    CHECK_FALSE(r.trajectory->final_think);
  }
  SUBCASE("early answer parses, protocol check flags it") {
    const auto r = parse("<answer>5</answer>", tl10());
    REQUIRE(r.ok());
    const auto check = check_protocol(*r.trajectory, tl10());
    CHECK(check.report.has(Violation::early_answer));
    CHECK(check.r_f == -1.0);
  }
  SUBCASE("whitespace between tags is tolerated") {
    const auto r = parse("  <wait/>\n<think>x=3</think>\t<wait/> ", tl10());
    REQUIRE(r.ok());
    CHECK(r.trajectory->steps.size() == 3);
    CHECK(r.trajectory->steps[1].action.text == "x=3");
  }
  SUBCASE("malformed tags fail the parse") {
    CHECK_FALSE(parse("<think>a<think>b</think>", tl10()).ok());
    CHECK_FALSE(parse("<think>unclosed", tl10()).ok());
    CHECK_FALSE(parse("<noise/>", tl10()).ok());
    CHECK_FALSE(parse("stray text", tl10()).ok());
    const auto check = check_protocol_text("<think>a<think>b</think>", tl10());
    CHECK(check.report.has(Violation::malformed_tag));
    CHECK(check.r_f == -1.0);
  }
}

TEST_CASE("round trip identity on random valid trajectories") {
  Rng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto tl = test::random_timeline(rng);
    const auto traj = test::random_valid_trajectory(tl, rng);
    const auto parsed = parse(serialize(traj), tl);
    REQUIRE(parsed.ok());
    REQUIRE(*parsed.trajectory == traj);
  }
}

TEST_CASE("check_protocol flags every violation class") {
  const auto& tl = tl10();
  SUBCASE("clean trace is valid with r_f = +1") {
    const auto check = check_protocol(tiny_valid(tl), tl);
    CHECK(check.report.valid);
    CHECK(check.report.violations.empty());
    CHECK(check.r_f == 1.0);
  }
  SUBCASE("early answer at a listening tick") {
    auto traj = tiny_valid(tl);
    traj.steps[3].action = Action::make_answer("5");
    const auto check = check_protocol(traj, tl);
    CHECK(check.report.has(Violation::early_answer));
    CHECK(check.r_f == -1.0);
  }
  SUBCASE("missing final think") {
    auto traj = tiny_valid(tl);
    traj.final_think.reset();
    CHECK(check_protocol(traj, tl).report.has(Violation::missing_final_think));
  }
  SUBCASE("missing answer") {
    auto traj = tiny_valid(tl);
    traj.answer.reset();
    CHECK(check_protocol(traj, tl).report.has(Violation::missing_answer));
  }
  SUBCASE("illegal action order via trailing actions") {
    auto traj = tiny_valid(tl);
    traj.overflow.push_back(Action::make_wait());
    CHECK(check_protocol(traj, tl).report.has(Violation::illegal_action_order));
  }
  SUBCASE("over-cap think and answer") {
    std::string longtext;
    for (int i = 0; i < 49; ++i) longtext += "w ";
    auto traj = tiny_valid(tl);
    traj.final_think = Action::make_think(longtext);
    CHECK(check_protocol(traj, tl).report.has(Violation::over_cap_think));
    traj = tiny_valid(tl);
    traj.answer = Action::make_answer(longtext);
    CHECK(check_protocol(traj, tl).report.has(Violation::over_cap_answer));
  }
  SUBCASE("malformed tag via the text path") {
    CHECK(check_protocol_text("<oops>", tl).report.has(Violation::malformed_tag));
  }
}

TEST_CASE("gate soundness: invalid exactly when violations exist") {
  Rng rng(17);
  for (int trial = 0; trial < 300; ++trial) {
    const auto tl = test::random_timeline(rng);
    auto traj = test::random_valid_trajectory(tl, rng);
    // Randomly corrupt about half the trajectories.
    const bool corrupt = rng.uniform() < 0.5;
    if (corrupt && tl.n_pre_ticks > 0) {
      switch (rng.pick(4)) {
        case 0: traj.answer.reset(); break;
        case 1: traj.final_think.reset(); break;
        case 2: traj.steps[rng.pick(traj.steps.size())].action = Action::make_answer("3"); break;
        default: traj.overflow.push_back(Action::make_think("late")); break;
      }
    }
    const auto check = check_protocol(traj, tl);
    CHECK(check.report.valid == check.report.violations.empty());
    CHECK((check.r_f <= 0.0) == !check.report.violations.empty());
  }
}

TEST_CASE("cap enforcement is exact at the boundary") {
  const auto& tl = tl10();
  std::string text48, text49;
  for (int i = 0; i < 48; ++i) text48 += "t ";
  text49 = text48 + "x";
  auto traj = tiny_valid(tl);
  traj.final_think = Action::make_think(text48);
  CHECK(check_protocol(traj, tl).report.valid);
  traj.final_think = Action::make_think(text49);
  CHECK_FALSE(check_protocol(traj, tl).report.valid);
}

TEST_CASE("gapped deployment traces validate only when gaps are allowed") {
  const auto& tl = tl10();
  Trajectory traj;
  traj.steps.push_back({0, Action::make_wait()});
  traj.steps.push_back({3, Action::make_wait()});  // ticks 1-2 skipped
  traj.steps.push_back({7, Action::make_think("total 4")});
  traj.final_think = Action::make_think("final answer 4");
  traj.answer = Action::make_answer("4");
  ProtocolLimits strict;
  CHECK_FALSE(check_protocol(traj, tl, strict).report.valid);
  ProtocolLimits lenient;
  lenient.allow_tick_gaps = true;
  CHECK(check_protocol(traj, tl, lenient).report.valid);
}

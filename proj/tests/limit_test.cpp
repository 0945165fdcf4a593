#include <gtest/gtest.h>

#include "hvm/limit.hpp"
#include "hvm/program_text.hpp"

using namespace hvm;

namespace {

const RegisterSetId W1 = RegisterSetId::working(1);
const RegisterSetId W0 = RegisterSetId::working(0);

Machine make(const char* src, std::uint64_t n, const char* cap = "w") {
  Program p = parse_program(src);
  p.spec.registers = n;
  p.spec.cap = Ordinal::parse(cap);
  return Machine(p);
}

const char* kBlinker =
    "instr 0, W[1], 0, write1(W[1]), 0\n"
    "instr 0, W[1], 1, write0(W[1]), 0\n";

const char* kRightMover =
    "instr 0, W[1], 0, write1(W[1]), 0\n"
    "instr 0, W[1], 0, right(W[1]), 0\n";

// Binary counter on W[1], least significant bit first; never repeats.
const char* kCounter =
    "instr 0, W[1], 1, write0(W[1]), 0\n"
    "instr 0, W[1], 1, right(W[1]), 0\n"
    "instr 0, W[1], 0, write1(W[1]), 1\n"
    "instr 1, W[1], 0, reset(W[1]), 0\n"
    "instr 1, W[1], 1, reset(W[1]), 0\n";

std::vector<Configuration> concrete(const Machine& m, std::size_t steps) {
  std::vector<Configuration> h{init_configuration(m, Bits{})};
  for (std::size_t i = 0; i < steps; ++i) {
    auto out = step_successor(h.back(), m);
    if (out.kind != StepOutcome::Kind::Advanced) break;
    h.push_back(out.config);
  }
  return h;
}

}  // namespace

TEST(DetectCycle, BlinkerIsExactWithPeriodTwo) {
  auto m = make(kBlinker, 4);
  auto cert = detect_cycle(concrete(m, 4), 4);
  EXPECT_EQ(cert.kind, CertificateKind::ExactCycle);
  EXPECT_EQ(cert.period, 2u);
}

TEST(DetectCycle, RightMoverIsTranslationalWithShiftOne) {
  auto m = make(kRightMover, 16);
  auto cert = detect_cycle(concrete(m, 4), 16);
  EXPECT_EQ(cert.kind, CertificateKind::TranslationalCycle);
  EXPECT_EQ(cert.period, 1u);
  EXPECT_EQ(cert.head_shift.at(W1), 1u);
}

TEST(DetectCycle, CounterIsUndetermined) {
  auto m = make(kCounter, 32);
  auto h = concrete(m, 200);
  EXPECT_EQ(detect_cycle(h, 32).kind, CertificateKind::Undetermined);
  EXPECT_EQ(detect_cycle({h[0]}, 32).kind, CertificateKind::Undetermined);
}

TEST(ApplyLimit, BlinkerCellIsOneAtOmega) {
  auto m = make(kBlinker, 4);
  auto h = concrete(m, 4);
  auto lim = apply_limit(detect_cycle(h, 4), h, Ordinal::omega(), 4);
  EXPECT_TRUE(lim.config.cell(W1, 0));
  EXPECT_EQ(lim.config.clock, Ordinal::omega());
  EXPECT_EQ(lim.config.state, Ordinal(0));
}

TEST(ApplyLimit, RightMoverHeadClampsToLimitPosition) {
  auto m = make(kRightMover, 10);
  auto h = concrete(m, 3);
  auto lim = apply_limit(detect_cycle(h, 10), h, Ordinal::omega(), 10);
  EXPECT_EQ(lim.config.head(W1), 10u);
  EXPECT_EQ(lim.config.dense(W1, 10), Bits(10, true));
  EXPECT_EQ(lim.clamped, std::vector<RegisterSetId>{W1});
}

TEST(ApplyLimit, IsIdempotent) {
  auto m = make(kBlinker, 4);
  auto h = concrete(m, 6);
  auto cert = detect_cycle(h, 4);
  EXPECT_EQ(apply_limit(cert, h, Ordinal::omega(), 4).config, apply_limit(cert, h, Ordinal::omega(), 4).config);
}

TEST(ApplyLimit, RejectsBadArguments) {
  auto m = make(kBlinker, 4);
  auto h = concrete(m, 4);
  EXPECT_THROW(apply_limit(LimitCertificate{}, h, Ordinal::omega(), 4), DomainError);
  EXPECT_THROW(apply_limit(detect_cycle(h, 4), h, Ordinal(5), 4), DomainError);
}

TEST(ApplyLimit, StateTakesMaximumOverCycle) {
  auto m = make(
      "instr 0, I, 0, nop, 3\n"
      "instr 3, I, 0, nop, 1\n"
      "instr 1, I, 0, nop, 0\n",
      2);
  auto h = concrete(m, 5);
  auto cert = detect_cycle(h, 2);
  ASSERT_EQ(cert.kind, CertificateKind::ExactCycle);
  EXPECT_EQ(cert.period, 3u);
  EXPECT_EQ(apply_limit(cert, h, Ordinal::omega(), 2).config.state, Ordinal(3));
}

TEST(ApplyLimit, OscillatingHeadTakesMaximum) {
  auto m = make(
      "instr 0, W[1], 0, right(W[1]), 1\n"
      "instr 1, W[1], 0, right(W[1]), 2\n"
      "instr 2, W[1], 0, reset(W[1]), 0\n",
      8);
  auto h = concrete(m, 4);
  auto cert = detect_cycle(h, 8);
  ASSERT_EQ(cert.kind, CertificateKind::ExactCycle);
  auto lim = apply_limit(cert, h, Ordinal::omega(), 8);
  EXPECT_EQ(lim.config.head(W1), 2u);
  EXPECT_EQ(lim.config.state, Ordinal(2));
  EXPECT_TRUE(lim.clamped.empty());
}

TEST(ApplyLimit, TranslationalPatternRepeatsBehindTheHead) {
  // Writes 1,0 alternately while moving right: period 2, shift 2.
  auto m = make(
      "instr 0, W[1], 0, write1(W[1]), 1\n"
      "instr 0, W[1], 0, right(W[1]), 1\n"
      "instr 1, W[1], 0, right(W[1]), 0\n",
      9);
  auto h = concrete(m, 8);
  auto cert = detect_cycle(h, 9);
  ASSERT_EQ(cert.kind, CertificateKind::TranslationalCycle);
  EXPECT_EQ(cert.period, 2u);
  EXPECT_EQ(cert.head_shift.at(W1), 2u);
  auto lim = apply_limit(cert, h, Ordinal::omega(), 9);
  EXPECT_EQ(to_string(lim.config.dense(W1, 9)), "101010101");
}

TEST(Run, BlinkerPastOmega) {
  auto m = make(kBlinker, 4, "w*2");
  RunOptions opt;
  opt.budget = 100;
  auto res = run(m, Bits{}, opt);
  ASSERT_TRUE(res.halted());
  EXPECT_EQ(res.reason, HaltReason::ClockCap);
  ASSERT_EQ(res.limits.size(), 2u);
  EXPECT_EQ(res.limits[0].lambda, Ordinal::omega());
  EXPECT_EQ(res.limits[1].lambda, Ordinal::parse("w*2"));
  EXPECT_EQ(res.config.clock, Ordinal::parse("w*2"));
}

TEST(Run, BlinkerLimitCellIsOneAtOmega) {
  auto m = make(kBlinker, 4, "w*2");
  RunOptions opt;
  opt.trace = true;
  auto res = run(m, Bits{}, opt);
  bool saw = false;
  for (const auto& line : res.trace)
    if (line.rfind("clock=w state=0", 0) == 0 && line.find("event=limit") != std::string::npos) saw = true;
  EXPECT_TRUE(saw);
}

TEST(Run, CounterExhaustsBudget) {
  auto m = make(kCounter, 32);
  RunOptions opt;
  opt.budget = 10;
  auto res = run(m, Bits{}, opt);
  EXPECT_EQ(res.outcome, RunResult::Outcome::Undetermined);
  EXPECT_EQ(res.steps, 10u);
}

TEST(Run, CompletionFlagAndFinalDispatch) {
  // Epilogue observes the flag at the cap and moves to state 2.
  auto m = make(
      "instr 1, W[0], 0, reset(W[0]), 1\n"
      "instr 1, W[0], 1, reset(W[0]), 1\n"
      "instr 1, W[0], 1, nop, 2\n"
      "instr 0, I, 0, nop, 1\n",
      3);
  auto res = run(m, Bits{});
  ASSERT_TRUE(res.halted());
  EXPECT_EQ(res.reason, HaltReason::ClockCap);
  EXPECT_EQ(res.config.state, Ordinal(2));
  EXPECT_TRUE(res.config.cell(W0, 0));
  EXPECT_EQ(res.config.clock, Ordinal::omega());
}

TEST(Run, FiniteCapStopsExactlyAtCap) {
  auto m = make(kBlinker, 4, "7");
  auto res = run(m, Bits{});
  EXPECT_EQ(res.reason, HaltReason::ClockCap);
  EXPECT_EQ(res.config.clock, Ordinal(7));
  // Seven toggles, then the final dispatch toggles once more without a tick.
  EXPECT_FALSE(res.config.cell(W1, 0));
  EXPECT_TRUE(res.limits.empty());
}

TEST(Run, FiniteCapFastForwardsExactCycles) {
  auto m = make(kBlinker, 4, "1000000000001");
  auto res = run(m, Bits{});
  EXPECT_EQ(res.config.clock, Ordinal(1000000000001ULL));
  EXPECT_LT(res.steps, 100u);
  // Odd clock leaves the cell at 1; the final dispatch toggles it back.
  EXPECT_FALSE(res.config.cell(W1, 0));
}

TEST(Run, TruncationConsistency) {
  // Halts before w: identical with and without the limit engine.
  auto m = make(
      "instr 0, I, 1, write1(O), 0\n"
      "instr 0, I, 1, right(I), 0\n"
      "instr 0, I, 1, right(O), 0\n"
      "instr 0, I, 0, nop, 1\n",
      6);
  RunOptions off;
  off.limits = false;
  auto a = run(m, parse_bits("111011"));
  auto b = run(m, parse_bits("111011"), off);
  EXPECT_EQ(a.config, b.config);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_EQ(read_output(a.config, 6), parse_bits("111000"));
}

TEST(Run, ClockNeverDecreasesInTrace) {
  auto m = make(kRightMover, 5, "w*2");
  RunOptions opt;
  opt.trace = true;
  auto res = run(m, Bits{}, opt);
  std::vector<Ordinal> clocks;
  for (const auto& line : res.trace) {
    const auto sp = line.find(' ');
    clocks.push_back(Ordinal::parse(line.substr(6, sp - 6)));
    if (line.find("event=limit") != std::string::npos) {
      EXPECT_NE(line.find("note=clamped"), std::string::npos);
    }
  }
  ASSERT_GE(clocks.size(), 3u);
  for (std::size_t i = 1; i < clocks.size(); ++i) EXPECT_LE(clocks[i - 1], clocks[i]);
  EXPECT_EQ(res.config.head(W1), 5u);
}

TEST(Run, StrictConflictsPropagateAsFault) {
  auto m = make("instr 0, I, 0, nop, 1\ninstr 0, I, 0, nop, 2\n", 2);
  RunOptions opt;
  opt.step.strict_conflicts = true;
  EXPECT_THROW(run(m, Bits{}, opt), MachineFault);
}

// Desk-scale acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails. Every check is exact; the only
// tolerances are the wall-clock limits pinned next to each criterion.

#include <algorithm>
#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hvm/hvm.hpp"
#include "ordinal_oracle.hpp"

using namespace hvm;

namespace {

const RegisterSetId I = RegisterSetId::input();
const RegisterSetId O = RegisterSetId::output();
const RegisterSetId W0 = RegisterSetId::working(0);
const RegisterSetId W1 = RegisterSetId::working(1);
const RegisterSetId W2 = RegisterSetId::working(2);
const RegisterSetId W3 = RegisterSetId::working(3);

struct Verdict {
  bool ok = true;
  std::string detail;
};

/// Collects the first mismatch; later ones are counted only.
class Checker {
 public:
  void expect(bool cond, const std::string& what) {
    ++checks_;
    if (cond) return;
    ++failures_;
    if (first_.empty()) first_ = what;
  }
  Verdict verdict(const std::string& summary) const {
    std::ostringstream s;
    s << summary << ", " << checks_ << " checks";
    if (failures_) s << ", " << failures_ << " mismatches, first: " << first_;
    return {failures_ == 0, s.str()};
  }

 private:
  std::uint64_t checks_ = 0;
  std::uint64_t failures_ = 0;
  std::string first_;
};

Bits bits(std::uint64_t v, std::size_t width) { return bits_of(v, width); }

Machine with_registers(Program p, std::uint64_t n) {
  p.spec.registers = n;
  return Machine(std::move(p));
}

std::vector<Configuration> concrete(const Machine& m, std::size_t steps, const Inputs& in = {}) {
  std::vector<Configuration> h{init_configuration(m, in)};
  for (std::size_t i = 0; i < steps; ++i) {
    auto out = step_successor(h.back(), m);
    if (out.kind != StepOutcome::Kind::Advanced) break;
    h.push_back(out.config);
  }
  return h;
}

// ---------------------------------------------------------------------------

Verdict corpus_conjunction_disjunction() {
  Checker c;
  for (std::uint64_t k = 1; k <= 10; ++k) {
    const Machine conj(corpus::conj(k)), disj(corpus::disj(k));
    for (std::uint64_t v = 0; v < (1ULL << k); ++v) {
      const Bits x = bits(v, k);
      const bool all = std::all_of(x.begin(), x.end(), [](bool b) { return b; });
      const bool any = std::any_of(x.begin(), x.end(), [](bool b) { return b; });
      const auto a = run(conj, Inputs{{W1, x}});
      const auto o = run(disj, Inputs{{W1, x}});
      c.expect(a.halted() && a.config.cell(W2, 0) == all, "conj " + to_string(x));
      c.expect(o.halted() && o.config.cell(W2, 0) == any, "disj " + to_string(x));
    }
  }
  return c.verdict("k=1..10, all inputs");
}

Verdict copy_round_trip() {
  Checker c;
  for (std::uint64_t k = 1; k <= 10; ++k) {
    const Machine in(corpus::copy_in(k)), out(corpus::copy_out(k, 1));
    for (std::uint64_t v = 0; v < (1ULL << k); ++v) {
      const Bits x = bits(v, k);
      const auto first = run(in, x);
      const auto second = run(out, Inputs{{W1, first.config.dense(W1, k)}});
      c.expect(first.halted() && second.halted() && read_output(second.config, k) == x, "copy " + to_string(x));
    }
  }
  return c.verdict("lengths 1..10, all inputs");
}

Verdict comparator_equality() {
  Checker c;
  for (std::uint64_t k = 1; k <= 8; ++k) {
    const Machine m(corpus::compare(k));
    for (std::uint64_t a = 0; a < (1ULL << k); ++a)
      for (std::uint64_t b = 0; b < (1ULL << k); ++b) {
        const auto res = run(m, Inputs{{W1, bits(a, k)}, {W2, bits(b, k)}});
        const bool eq = a == b;
        c.expect(res.halted() && res.config.state == Ordinal(eq ? 4 : 5) && res.config.cell(W3, 0) == eq,
                 "compare " + to_string(bits(a, k)) + " " + to_string(bits(b, k)));
      }
  }
  return c.verdict("equal-length pairs, lengths 1..8");
}

// ---------------------------------------------------------------------------
// Limit stage: lim-sup read off a long concrete sample.

constexpr std::size_t kSampleSteps = 1000;
constexpr std::uint64_t kSampleRegisters = 2 * kSampleSteps;

struct Sampled {
  std::map<RegisterSetId, std::set<std::uint64_t>> ones;  // cells that are 1 somewhere in the late half
  std::map<RegisterSetId, std::uint64_t> head;
  Ordinal state;
};

/// Cells: 1 iff 1 at some step of the second half. Heads: the limit
/// position if still climbing over the last quarter, else the late maximum.
Sampled sampled_limsup(const std::vector<Configuration>& h, std::uint64_t n) {
  Sampled s;
  const std::size_t half = h.size() / 2, quarter = h.size() * 3 / 4;
  std::map<RegisterSetId, std::uint64_t> early_max, late_max;
  for (std::size_t i = half; i < h.size(); ++i) {
    s.state = std::max(s.state, h[i].state);
    for (const auto& [r, reg] : h[i].registers) {
      s.ones[r].insert(reg.ones.begin(), reg.ones.end());
      auto& slot = i < quarter ? early_max[r] : late_max[r];
      slot = std::max(slot, reg.head);
    }
  }
  for (const auto& [r, top] : late_max) s.head[r] = top > early_max[r] ? n : std::max(top, early_max[r]);
  return s;
}

LimitResult engine_limit(const Machine& m, std::uint64_t n) {
  for (std::size_t len = 2; len <= 64; ++len) {
    const auto h = concrete(m, len);
    const auto cert = detect_cycle(h, n);
    if (cert.kind != CertificateKind::Undetermined) return apply_limit(cert, h, Ordinal::omega(), n);
  }
  throw DomainError("no certificate within 64 steps");
}

Verdict limit_rule_sampled() {
  struct Case {
    const char* name;
    const char* text;
  };
  const Case cases[] = {
      {"blinker", "instr 0, W[1], 0, write1(W[1]), 0\ninstr 0, W[1], 1, write0(W[1]), 0\n"},
      {"eventually-constant",
       "instr 0, W[1], 0, write1(W[1]), 1\ninstr 0, W[3], 0, write1(W[3]), 1\n"
       "instr 1, W[1], 1, write0(W[1]), 2\n"
       "instr 2, W[2], 0, write1(W[2]), 2\ninstr 2, W[2], 1, write0(W[2]), 2\n"},
      {"right-mover", "instr 0, W[1], 0, write1(W[1]), 0\ninstr 0, W[1], 0, right(W[1]), 0\n"},
  };
  Checker c;
  for (const auto& cs : cases) {
    const Machine m = with_registers(parse_program(cs.text), kSampleRegisters);
    const Sampled want = sampled_limsup(concrete(m, kSampleSteps), kSampleRegisters);
    const LimitResult got = engine_limit(m, kSampleRegisters);
    const std::string tag = cs.name;
    c.expect(got.config.state == want.state, tag + " state");
    for (const auto& [r, cells] : want.ones) {
      c.expect(got.config.head(r) == want.head.at(r), tag + " head " + r.to_string());
      for (std::uint64_t x = 0; x < kSampleSteps; ++x)
        c.expect(got.config.cell(r, x) == (cells.count(x) > 0), tag + " cell " + r.to_string() + "[" + std::to_string(x) + "]");
    }
  }
  const Machine blink = with_registers(parse_program(cases[0].text), kSampleRegisters);
  const Machine settle = with_registers(parse_program(cases[1].text), kSampleRegisters);
  const Machine mover = with_registers(parse_program(cases[2].text), kSampleRegisters);
  c.expect(engine_limit(blink, kSampleRegisters).config.cell(W1, 0), "blinker cell is 1 at w");
  c.expect(!engine_limit(settle, kSampleRegisters).config.cell(W1, 0), "settled cell keeps 0 at w");
  c.expect(engine_limit(settle, kSampleRegisters).config.cell(W3, 0), "settled cell keeps 1 at w");
  c.expect(engine_limit(mover, kSampleRegisters).config.head(W1) == kSampleRegisters, "right-mover head at limit");
  return c.verdict("blinker, eventually-constant and right-mover vs 1000-step sample");
}

// ---------------------------------------------------------------------------
// Soundness of certified jumps: independent replays of prefix + k*period.

struct SuiteProgram {
  std::string name;
  Machine machine;
  Inputs inputs;
};

std::vector<SuiteProgram> limit_suite() {
  auto prog = [](const char* text, std::uint64_t n) { return with_registers(parse_program(text), n); };
  std::vector<SuiteProgram> s;
  s.push_back({"blinker", prog("instr 0, W[1], 0, write1(W[1]), 0\ninstr 0, W[1], 1, write0(W[1]), 0\n", 4), {}});
  s.push_back({"right-mover", prog("instr 0, W[1], 0, write1(W[1]), 0\ninstr 0, W[1], 0, right(W[1]), 0\n", 16), {}});
  s.push_back({"state-cycle", prog("instr 0, I, 0, nop, 3\ninstr 3, I, 0, nop, 1\ninstr 1, I, 0, nop, 0\n", 2), {}});
  s.push_back({"oscillating-head",
               prog("instr 0, W[1], 0, right(W[1]), 1\ninstr 1, W[1], 0, right(W[1]), 2\n"
                    "instr 2, W[1], 0, reset(W[1]), 0\n",
                    8),
               {}});
  s.push_back({"stripes",
               prog("instr 0, W[1], 0, write1(W[1]), 1\ninstr 0, W[1], 0, right(W[1]), 1\n"
                    "instr 1, W[1], 0, right(W[1]), 0\n",
                    12),
               {}});
  s.push_back({"eventually-constant",
               prog("instr 0, W[1], 0, write1(W[1]), 1\ninstr 1, W[1], 1, write0(W[1]), 2\n"
                    "instr 2, W[2], 0, write1(W[2]), 2\ninstr 2, W[2], 1, write0(W[2]), 2\n",
                    4),
               {}});
  s.push_back({"conj-all-ones", Machine(corpus::conj(4)), Inputs{{W1, parse_bits("1111")}}});
  s.push_back({"disj-all-zeros", Machine(corpus::disj(4)), Inputs{{W1, parse_bits("0000")}}});
  s.push_back({"copy-in", Machine(corpus::copy_in(4)), Inputs{{I, parse_bits("1011")}}});
  s.push_back({"corpus-blinker", Machine(corpus::blinker(3)), {}});
  s.push_back({"corpus-right-mover", Machine(corpus::right_mover(6)), {}});
  return s;
}

Verdict limit_soundness_replay() {
  Checker c;
  std::size_t jumps = 0;
  for (const auto& sp : limit_suite()) {
    const std::uint64_t n = sp.machine.registers();
    std::optional<LimitCertificate> cert;
    std::vector<Configuration> h;
    for (std::size_t len = 2; len <= 200 && !cert; ++len) {
      h = concrete(sp.machine, len, sp.inputs);
      auto found = detect_cycle(h, n);
      if (found.kind != CertificateKind::Undetermined) cert = found;
    }
    c.expect(cert.has_value(), sp.name + " certified");
    if (!cert) continue;
    ++jumps;
    const auto lim = apply_limit(*cert, h, Ordinal::omega(), n);
    const std::size_t q = cert->prefix_length, p = cert->period;
    for (std::size_t k = 1; k <= 3; ++k) {
      const auto replay = concrete(sp.machine, q + k * p, sp.inputs);
      const std::string tag = sp.name + " k=" + std::to_string(k);
      c.expect(replay.size() == q + k * p + 1, tag + " replay length");
      if (replay.size() != q + k * p + 1) continue;
      Ordinal state;
      std::set<RegisterSetId> sets;
      for (std::size_t i = q; i <= q + k * p; ++i) {
        state = std::max(state, replay[i].state);
        for (const auto& [r, reg] : replay[i].registers) sets.insert(r);
      }
      c.expect(lim.config.state == state, tag + " state");
      for (const auto& r : sets) {
        auto shift = cert->head_shift.find(r);
        if (shift == cert->head_shift.end()) {
          std::uint64_t head = 0;
          std::set<std::uint64_t> ones;
          for (std::size_t i = q; i <= q + k * p; ++i) {
            auto it = replay[i].registers.find(r);
            if (it == replay[i].registers.end()) continue;
            head = std::max(head, it->second.head);
            ones.insert(it->second.ones.begin(), it->second.ones.end());
          }
          c.expect(lim.config.head(r) == head, tag + " head " + r.to_string());
          for (std::uint64_t x = 0; x < n; ++x)
            c.expect(lim.config.cell(r, x) == (ones.count(x) > 0), tag + " cell " + r.to_string());
        } else {
          // Cells below the moving window are never touched again.
          const std::uint64_t settled = std::min<std::uint64_t>(n, cert->window_low.at(r) + k * shift->second);
          const Configuration& last = replay[q + k * p];
          c.expect(last.head(r) > replay[q].head(r), tag + " head climbs");
          c.expect(lim.config.head(r) == n, tag + " head at limit position");
          for (std::uint64_t x = 0; x < settled; ++x)
            c.expect(lim.config.cell(r, x) == last.cell(r, x), tag + " settled cell " + r.to_string());
        }
      }
    }
  }
  return c.verdict(std::to_string(jumps) + " certified jumps, k=1..3");
}

// ---------------------------------------------------------------------------

std::optional<oracle::Triple> to_triple(const Ordinal& o) {
  oracle::Triple t;
  for (const auto& term : o.terms()) {
    if (term.exponent > 2) return std::nullopt;
    (term.exponent == 2 ? t.c2 : term.exponent == 1 ? t.c1 : t.c0) = term.coefficient;
  }
  return t;
}

Verdict ordinal_oracle_agreement() {
  constexpr std::uint64_t kBound = 20;
  const auto all = oracle::box(kBound);
  std::vector<Ordinal> ords;
  for (const auto& t : all) ords.push_back(oracle::to_ordinal(t));

  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<Checker> checkers(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      Checker& c = checkers[w];
      for (std::size_t xi = w; xi < all.size(); xi += workers) {
        const auto& x = all[xi];
        const auto add_row = oracle::add_row(x, kBound);
        const auto mul_row = oracle::mul_row(x, kBound);
        bool ok = true;
        for (std::size_t i = 0; i < all.size() && ok; ++i) {
          const auto sum = to_triple(ord_add(ords[xi], ords[i]));
          const Ordinal prod = ord_mul(ords[xi], ords[i]);
          ok = sum && *sum == add_row[i];
          ok = ok && (mul_row[i].valid ? to_triple(prod) == mul_row[i].value : prod.leading_exponent() >= 3);
          ok = ok && ord_cmp(ords[xi], ords[i]) == (x <=> all[i]);
          if (!ok) c.expect(false, "add/mul/cmp at " + ords[xi].to_string() + ", " + ords[i].to_string());
        }
        if (ok) c.expect(true, "");
      }
    });
  for (auto& t : pool) t.join();

  Checker c;
  for (const auto& w : checkers) {
    auto v = w.verdict("");
    if (!v.ok) c.expect(false, v.detail);
  }
  // Limit neighbours by scanning the ordering of a slightly larger box.
  const auto wide = oracle::box(kBound + 1);
  std::map<oracle::Triple, oracle::Triple> prev, next;
  oracle::Triple last_limit{};
  for (const auto& t : wide) {
    if (t.is_limit()) last_limit = t;
    prev[t] = last_limit;
  }
  std::optional<oracle::Triple> upcoming;
  for (auto it = wide.rbegin(); it != wide.rend(); ++it) {
    if (upcoming) next[*it] = *upcoming;
    if (it->is_limit()) upcoming = *it;
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    c.expect(to_triple(prevlim(ords[i])) == prev.at(all[i]), "prevlim " + ords[i].to_string());
    c.expect(to_triple(nextlim(ords[i])) == next.at(all[i]), "nextlim " + ords[i].to_string());
  }
  return c.verdict("coefficients <= 20, " + std::to_string(all.size()) + "^2 add/mul/cmp pairs");
}

Verdict formula_compiler_agreement() {
  std::mt19937_64 rng(20261016);
  Checker c;
  std::size_t true_count = 0;
  for (int i = 0; i < 100; ++i) {
    logic::GeneratorOptions opt;
    opt.n = 1 + static_cast<std::uint64_t>(i % 3);
    opt.max_quantifiers = 3;
    const auto t = logic::generate_formula(rng, opt);
    const logic::DomainSpec d{opt.n};
    const std::string text = logic::to_string(t.formula);
    c.expect(logic::quantifier_depth(*t.formula) <= 3, "depth of " + text);
    const bool want = logic::eval_direct(t, d);
    true_count += want;
    c.expect(logic::run_serial(logic::compile_serial(t, d)) == want, "serial " + text);
    c.expect(logic::run_compiled_parallel(logic::compile_parallel(t, d)) == want, "parallel " + text);
  }
  return c.verdict("100 formulas, n=1..3, " + std::to_string(true_count) + " true");
}

// ---------------------------------------------------------------------------

Bank bank(Program p, std::uint64_t off = 0, std::uint64_t len = 6, std::uint64_t arity = 1) {
  Bank b;
  b.program = std::move(p);
  b.input_offset = off;
  b.input_length = len;
  b.output_arity = arity;
  return b;
}

Bank deciding(Bank b, RegisterSetId r, std::uint64_t cell = 0) {
  b.decision = r;
  b.decision_cell = cell;
  return b;
}

Verdict serialize_equivalence() {
  constexpr std::uint64_t n = 6;
  auto pair = [](Bank a, Bank b, Combine mode) {
    ParallelProgram pp;
    pp.banks = {std::move(a), std::move(b)};
    pp.combine = mode;
    return pp;
  };
  Bank preloaded = bank(corpus::copy_out(n, 1), 0, 0, 6);
  preloaded.preload[W1] = parse_bits("101010");
  const std::vector<std::pair<std::string, ParallelProgram>> pairings = {
      {"conj+disj forall", pair(bank(corpus::conj(n, "I", "O")), bank(corpus::disj(n, "I", "O")), Combine::ForAll)},
      {"conj+disj exists", pair(bank(corpus::conj(n, "I", "O")), bank(corpus::disj(n, "I", "O")), Combine::Exists)},
      {"copy halves", pair(bank(corpus::copy_through(n), 0, 3, 3), bank(corpus::copy_through(n), 3, 3, 3), Combine::None)},
      {"compare+conj exists", pair(deciding(bank(corpus::split_compare(3)), W3), bank(corpus::conj(n, "I", "O")), Combine::Exists)},
      {"compare+disj forall", pair(deciding(bank(corpus::split_compare(3)), W3), bank(corpus::disj(n, "I", "O")), Combine::ForAll)},
      {"blinker+conj exists", pair(bank(corpus::blinker(n), 0, 0), bank(corpus::conj(n, "I", "O")), Combine::Exists)},
      {"right-mover+disj forall", pair(bank(corpus::right_mover(n), 0, 0), bank(corpus::disj(n, "I", "O")), Combine::ForAll)},
      {"copy-in+copy-through", pair(deciding(bank(corpus::copy_in(n)), W1), bank(corpus::copy_through(n), 0, 6, 6), Combine::None)},
      {"disj+blinker forall", pair(bank(corpus::disj(n, "I", "O")), deciding(bank(corpus::blinker(n), 0, 0), W1), Combine::ForAll)},
      {"compare+compare", pair(deciding(bank(corpus::split_compare(3)), W3), deciding(bank(corpus::split_compare(3)), W3), Combine::Exists)},
      {"preloaded copy-out+conj", pair(std::move(preloaded), bank(corpus::conj(n, "I", "O")), Combine::Exists)},
  };
  Checker c;
  for (const auto& [name, pp] : pairings) {
    const auto sp = serialize(pp);
    const Machine m(sp.program);
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
      const Bits image = bits(v, n);
      const auto lock = run_parallel(pp, image);
      const auto serial = run(m, sp.inputs(image));
      const std::string tag = name + " on " + to_string(image);
      c.expect(!lock.undetermined && serial.halted(), tag + " halts");
      if (lock.undetermined || !serial.halted()) continue;
      const auto dec = sp.decode(serial.config);
      c.expect(dec.outputs == lock.last().outputs, tag + " outputs");
      c.expect(dec.management == lock.last().management, tag + " management");
    }
  }
  return c.verdict(std::to_string(pairings.size()) + " pairings, all 64 inputs");
}

// ---------------------------------------------------------------------------

Verdict binary_search_bound() {
  Checker c;
  for (std::uint64_t n = 1; n <= 4; ++n) {
    const std::uint64_t size = 1ULL << n;
    for (std::uint64_t mask = 0; mask < (1ULL << size); ++mask) {
      std::set<std::int64_t> x;
      for (std::uint64_t i = 0; i < size; ++i)
        if (mask >> i & 1) x.insert(static_cast<std::int64_t>(i));
      const auto table = info::search_table(x, n);
      for (std::int64_t q = 0; q < static_cast<std::int64_t>(size); ++q) {
        bool naive = false;
        for (std::uint64_t i = 0; i < size; ++i) naive = naive || ((mask >> i & 1) && static_cast<std::int64_t>(i) == q);
        const auto r = info::binary_search_decide(table, q, n);
        c.expect(r.found == naive, "membership of " + std::to_string(q));
        c.expect(r.probes <= n + 1, "probe bound n=" + std::to_string(n));
      }
    }
  }
  return c.verdict("all X for n=1..4");
}

/// Every (|u|, |p|) with |u| + |p| < |s| checked against the definition.
bool compressible_by_definition(const Bits& s) {
  const std::size_t n = s.size();
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t p = 1; u + p < n; ++p) {
      bool ok = true;
      for (std::size_t i = u + p; i < n && ok; ++i) ok = s[i] == s[i - p];
      if (ok) return true;
    }
  return false;
}

Verdict incompressible_fraction_trend() {
  constexpr double kThreshold = 0.5;
  Checker c;
  std::ostringstream fractions;
  double previous = -1;
  double at16 = 0;
  for (std::uint64_t n = 8; n <= 16; ++n) {
    const auto census = info::census(n);
    std::uint64_t brute = 0;
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) brute += !compressible_by_definition(bits(v, n));
    c.expect(census.incompressible == brute, "census agrees with brute force at n=" + std::to_string(n));
    const double f = static_cast<double>(census.incompressible) / static_cast<double>(1ULL << n);
    fractions << (n == 8 ? "" : " ") << n << ':' << census.incompressible << '/' << (1ULL << n);
    c.expect(f >= previous, "fraction nondecreasing at n=" + std::to_string(n));
    previous = f;
    at16 = f;
  }
  c.expect(at16 > kThreshold, "fraction at n=16 exceeds 0.5");
  return c.verdict("incompressible counts " + fractions.str());
}

Verdict associated_set_decider() {
  Checker c;
  for (std::uint64_t n = 1; n <= 3; ++n) {
    const auto all = info::universe(n);
    for (std::uint64_t mask = 0; mask < (1ULL << all.size()); ++mask) {
      std::set<Bits> x;
      for (std::size_t i = 0; i < all.size(); ++i)
        if (mask >> i & 1) x.insert(all[i]);
      const auto a = info::associated_set(x, n);
      for (std::size_t i = 0; i < all.size(); ++i) {
        const auto d = info::assoc_decide(a, all[i]);
        c.expect(d.member == ((mask >> i & 1) != 0), "membership of " + to_string(all[i]));
        c.expect(d.bits_read == n + 1, "bits read for n=" + std::to_string(n));
      }
    }
  }
  return c.verdict("all X for n=1..3");
}

struct Criterion {
  const char* name;
  double seconds;  // wall-clock limit
  std::function<Verdict()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"corpus_conjunction_disjunction", 10, corpus_conjunction_disjunction},
      {"copy_round_trip", 60, copy_round_trip},
      {"comparator_equality", 60, comparator_equality},
      {"limit_rule_sampled", 1, limit_rule_sampled},
      {"limit_soundness_replay", 60, limit_soundness_replay},
      {"ordinal_oracle_agreement", 30, ordinal_oracle_agreement},
      {"formula_compiler_agreement", 60, formula_compiler_agreement},
      {"serialize_equivalence", 60, serialize_equivalence},
      {"binary_search_bound", 60, binary_search_bound},
      {"incompressible_fraction_trend", 120, incompressible_fraction_trend},
      {"associated_set_decider", 60, associated_set_decider},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = cr.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (took > cr.seconds) {
      v.ok = false;
      v.detail += ", over the " + std::to_string(static_cast<int>(cr.seconds)) + " s limit";
    }
    failed += !v.ok;
    std::cout << (v.ok ? "PASS " : "FAIL ") << cr.name << ": " << v.detail << " (" << std::fixed
              << std::setprecision(2) << took << " s)" << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << '/' << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}

#pragma once

// Parallel machines: banks of serial programs running in lockstep over
// disjoint registers, a management step combining their results, chaining of
// stages, and a serializer that interleaves the banks into one program.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hvm/errors.hpp"
#include "hvm/limit.hpp"
#include "hvm/machine.hpp"
#include "hvm/program_text.hpp"

namespace hvm {

struct Bank {
  Program program;
  std::uint64_t input_offset = 0;  // slice of the shared input image seen as this bank's I
  std::uint64_t input_length = std::numeric_limits<std::uint64_t>::max();
  Inputs preload;  // extra initial contents (working sets)
  RegisterSetId decision = RegisterSetId::output();
  std::uint64_t decision_cell = 0;
  std::uint64_t output_arity = 1;  // O cells handed to the next stage
};

enum class Combine { None, ForAll, Exists, CopyThenRun };

inline const char* to_string(Combine c) {
  switch (c) {
    case Combine::None: return "none";
    case Combine::ForAll: return "forall";
    case Combine::Exists: return "exists";
    case Combine::CopyThenRun: return "copy";
  }
  return "?";
}

struct ParallelProgram {
  std::vector<Bank> banks;
  Combine combine = Combine::None;
  std::optional<Program> management;  // Q for CopyThenRun
  std::uint64_t input_arity = 0;      // 0 = any
  std::shared_ptr<ParallelProgram> next;

  std::uint64_t output_arity() const {
    std::uint64_t total = 0;
    for (const auto& b : banks) total += b.output_arity;
    return total;
  }
};

/// Runs `second` on the concatenated bank outputs of `first`.
inline ParallelProgram chain(ParallelProgram first, ParallelProgram second) {
  ParallelProgram* tail = &first;
  while (tail->next) tail = tail->next.get();
  if (second.input_arity != 0 && tail->output_arity() != second.input_arity)
    throw DomainError("chain arity mismatch: first stage outputs " + std::to_string(tail->output_arity()) +
                      " bits, second stage expects " + std::to_string(second.input_arity));
  tail->next = std::make_shared<ParallelProgram>(std::move(second));
  return first;
}

struct StageResult {
  std::vector<RunResult> banks;
  Bits outputs;                      // concatenation of each bank's O[0, arity)
  std::optional<bool> management;    // ForAll/Exists bit, or Q's O[0]
  std::optional<RunResult> management_run;
  std::uint64_t ticks = 0;
};

struct ParallelResult {
  bool undetermined = false;
  std::vector<StageResult> stages;

  const StageResult& last() const { return stages.back(); }
  std::optional<bool> management() const { return stages.empty() ? std::nullopt : last().management; }
};

struct ParallelOptions {
  std::uint64_t budget = 1'000'000;  // ticks per segment
  bool limits = true;
  StepOptions step;
};

inline Bits slice(const Bits& image, std::uint64_t offset, std::uint64_t length) {
  Bits out;
  for (std::uint64_t i = offset; i < image.size() && i - offset < length; ++i) out.push_back(image[i]);
  return out;
}

namespace parallel_detail {

inline Configuration bank_start(const Machine& m, const Bank& b, const Bits& image) {
  Inputs in = b.preload;
  in[RegisterSetId::input()] = slice(image, b.input_offset, b.input_length);
  return init_configuration(m, in);
}

inline std::optional<bool> fold(Combine mode, const std::vector<bool>& decisions) {
  if (mode == Combine::ForAll) {
    bool v = true;  // starts 1, any 0 clears it
    for (bool d : decisions) v = v && d;
    return v;
  }
  if (mode == Combine::Exists) {
    bool v = false;
    for (bool d : decisions) v = v || d;
    return v;
  }
  return std::nullopt;
}

/// Management step shared by the lockstep runner and the serializer's decoder.
inline void manage(const ParallelProgram& pp, const std::vector<Bits>& bank_outputs,
                   const std::vector<bool>& decisions, StageResult& out, const ParallelOptions& opt) {
  for (const auto& o : bank_outputs) out.outputs.insert(out.outputs.end(), o.begin(), o.end());
  if (pp.combine == Combine::CopyThenRun) {
    if (!pp.management) throw DomainError("copy-then-run management needs a program");
    Machine q(*pp.management);
    RunOptions ro;
    ro.budget = opt.budget;
    ro.limits = opt.limits;
    ro.step = opt.step;
    out.management_run = run(q, out.outputs, ro);
    out.management = out.management_run->config.cell(RegisterSetId::output(), 0);
  } else {
    out.management = fold(pp.combine, decisions);
  }
}

}  // namespace parallel_detail

/// Lockstep run of one stage; limit jumps happen only when every running bank
/// is certified at the same tick.
inline StageResult run_stage(const ParallelProgram& pp, const Bits& image, const ParallelOptions& opt, bool& undetermined) {
  StageResult res;
  if (pp.input_arity != 0 && image.size() != pp.input_arity)
    throw DomainError("stage expects " + std::to_string(pp.input_arity) + " input bits, got " +
                      std::to_string(image.size()));
  const std::size_t m = pp.banks.size();
  std::vector<Machine> machines;
  machines.reserve(m);
  for (std::size_t g = 0; g < m; ++g) {
    try {
      machines.emplace_back(pp.banks[g].program);
    } catch (const DomainError& e) {
      throw DomainError("bank " + std::to_string(g) + ": " + e.what());
    }
  }
  res.banks.resize(m);
  std::vector<bool> running(m, true);
  std::vector<detail::CycleWindow> windows(m, detail::CycleWindow(256));
  std::vector<LimitCertificate> certs(m);
  for (std::size_t g = 0; g < m; ++g) {
    res.banks[g].config = parallel_detail::bank_start(machines[g], pp.banks[g], image);
    if (opt.limits) windows[g].push(res.banks[g].config, machines[g].registers());
  }
  Ordinal clock;
  std::uint64_t segment = 0;
  auto any_running = [&] { return std::find(running.begin(), running.end(), true) != running.end(); };

  while (any_running()) {
    for (std::size_t g = 0; g < m; ++g) {
      if (!running[g]) continue;
      Configuration& c = res.banks[g].config;
      const Machine& mach = machines[g];
      try {
        if (c.clock == mach.spec().cap) {
          c.set_cell(RegisterSetId::working(0), 0, true);
          detail::fire(c, mach, opt.step, nullptr);
          res.banks[g].reason = HaltReason::ClockCap;
          running[g] = false;
          continue;
        }
        if (!detail::fire(c, mach, opt.step, nullptr)) {
          res.banks[g].reason = no_match_reason(c, mach);
          running[g] = false;
          continue;
        }
      } catch (const MachineFault& e) {
        throw MachineFault("bank " + std::to_string(g) + ": " + e.what());
      }
      c.clock = ord_add(c.clock, 1);
      ++res.banks[g].steps;
      if (opt.limits) certs[g] = windows[g].push(c, mach.registers());
    }
    clock = ord_add(clock, 1);
    ++res.ticks;
    ++segment;
    if (!any_running()) break;

    if (opt.limits) {
      bool all = true;
      const Ordinal lambda = nextlim(clock);
      for (std::size_t g = 0; g < m && all; ++g)
        if (running[g])
          all = certs[g].kind != CertificateKind::Undetermined && lambda <= machines[g].spec().cap;
      if (all) {
        for (std::size_t g = 0; g < m; ++g) {
          if (!running[g]) continue;
          auto lim = apply_limit(certs[g], windows[g].history(), lambda, machines[g].registers());
          res.banks[g].limits.push_back({lambda, certs[g], lim.clamped});
          res.banks[g].config = std::move(lim.config);
          windows[g].clear();
          windows[g].push(res.banks[g].config, machines[g].registers());
          certs[g] = {};
        }
        clock = lambda;
        segment = 0;
        continue;
      }
    }
    if (segment >= opt.budget) {
      undetermined = true;
      for (std::size_t g = 0; g < m; ++g)
        if (running[g]) res.banks[g].outcome = RunResult::Outcome::Undetermined;
      return res;
    }
  }

  std::vector<Bits> outs;
  std::vector<bool> decisions;
  for (std::size_t g = 0; g < m; ++g) {
    const auto& c = res.banks[g].config;
    outs.push_back(c.dense(RegisterSetId::output(), pp.banks[g].output_arity));
    decisions.push_back(c.cell(pp.banks[g].decision, pp.banks[g].decision_cell));
  }
  parallel_detail::manage(pp, outs, decisions, res, opt);
  return res;
}

/// Runs a stage and every chained stage after it. An empty stage passes its
/// input through and reports the management initial value.
inline ParallelResult run_parallel(const ParallelProgram& pp, const Bits& image, const ParallelOptions& opt = {}) {
  ParallelResult out;
  const ParallelProgram* stage = &pp;
  Bits current = image;
  while (stage) {
    StageResult r;
    if (stage->banks.empty()) {
      r.outputs = current;
      r.management = parallel_detail::fold(stage->combine, {});
    } else {
      r = run_stage(*stage, current, opt, out.undetermined);
      if (out.undetermined) {
        out.stages.push_back(std::move(r));
        return out;
      }
    }
    current = r.outputs;
    out.stages.push_back(std::move(r));
    stage = stage->next.get();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization: one program whose state encodes (turn, bank states).
//
// With m banks, serial state = turn + m * index(s_0, ..., s_{m-1}) where each
// s_g ranges over bank g's (finite) states and index is mixed radix. In each
// serial state only bank `turn`'s rows are emitted, relocated to its private
// registers, each pointing at (turn+1, updated tuple). A tick row guarded on
// the shared W[0] comes first and advances the turn when the bank has nothing
// to do. Placement with stride K: bank g's W[b] -> W[gK+b] for b >= 1, its
// W[0] -> W[gK+K-3], its I -> W[gK+K-2] (preloaded), its O -> W[gK+K-1].

struct Placement {
  std::uint64_t stride = 0;
  std::size_t banks = 0;

  RegisterSetId map(std::size_t g, const RegisterSetId& r) const {
    const std::uint64_t base = g * stride;
    switch (r.kind) {
      case SetKind::Input: return RegisterSetId::working(base + stride - 2);
      case SetKind::Output: return RegisterSetId::working(base + stride - 1);
      case SetKind::Working: break;
    }
    return RegisterSetId::working(r.index == 0 ? base + stride - 3 : base + r.index);
  }
};

struct SerialProgram {
  Program program;
  Placement placement;
  const ParallelProgram* source = nullptr;

  /// Preload for a given shared input image.
  Inputs inputs(const Bits& image) const {
    Inputs in;
    for (std::size_t g = 0; g < source->banks.size(); ++g) {
      const Bank& b = source->banks[g];
      for (const auto& [r, bits] : b.preload) in[placement.map(g, r)] = bits;
      for (const auto& [r, bits] : b.program.preload) in[placement.map(g, r)] = bits;
      in[placement.map(g, RegisterSetId::input())] = slice(image, b.input_offset, b.input_length);
    }
    return in;
  }

  /// Reads bank outputs and applies the stage's management step.
  StageResult decode(const Configuration& c, const ParallelOptions& opt = {}) const {
    StageResult res;
    std::vector<Bits> outs;
    std::vector<bool> decisions;
    for (std::size_t g = 0; g < source->banks.size(); ++g) {
      const Bank& b = source->banks[g];
      outs.push_back(c.dense(placement.map(g, RegisterSetId::output()), b.output_arity));
      decisions.push_back(c.cell(placement.map(g, b.decision), b.decision_cell));
    }
    parallel_detail::manage(*source, outs, decisions, res, opt);
    return res;
  }
};

inline constexpr std::uint64_t kMaxProductStates = 2'000'000;

inline SerialProgram serialize(const ParallelProgram& pp) {
  SerialProgram sp;
  sp.source = &pp;
  const std::size_t m = pp.banks.size();
  if (m == 0) throw DomainError("nothing to serialize: no banks");
  std::uint64_t max_beta = 0;
  std::uint64_t n = pp.banks[0].program.spec.registers;
  std::vector<std::vector<Ordinal>> states(m);
  std::vector<Machine> machines;
  for (std::size_t g = 0; g < m; ++g) {
    const Program& p = pp.banks[g].program;
    if (p.spec.registers != n) throw DomainError("serialize needs a common register surrogate N across banks");
    for (const auto& ins : p.instructions) {
      for (const auto& r : {ins.set, ins.action.target})
        if (r.kind == SetKind::Working) max_beta = std::max(max_beta, r.index);
    }
    for (const auto& [r, bits] : p.preload)
      if (r.kind == SetKind::Working) max_beta = std::max(max_beta, r.index);
    for (const auto& [r, bits] : pp.banks[g].preload)
      if (r.kind == SetKind::Working) max_beta = std::max(max_beta, r.index);
    if (pp.banks[g].decision.kind == SetKind::Working)
      max_beta = std::max(max_beta, pp.banks[g].decision.index);
    for (const auto& s : p.all_states()) {
      if (!s.is_finite()) throw DomainError("serialize supports finite bank states only");
      states[g].push_back(s);
    }
    machines.emplace_back(p);
  }
  sp.placement = {max_beta + 4, m};

  std::uint64_t tuples = 1;
  for (const auto& s : states) {
    if (tuples > kMaxProductStates / s.size()) throw DomainError("serialized state space too large");
    tuples *= s.size();
  }
  if (tuples * m > kMaxProductStates) throw DomainError("serialized state space too large");

  std::vector<std::map<Ordinal, std::uint64_t>> pos(m);
  for (std::size_t g = 0; g < m; ++g)
    for (std::uint64_t i = 0; i < states[g].size(); ++i) pos[g][states[g][i]] = i;
  auto encode = [&](std::uint64_t turn, const std::vector<std::uint64_t>& digits) {
    std::uint64_t idx = 0;
    for (std::size_t g = m; g-- > 0;) idx = idx * states[g].size() + digits[g];
    return Ordinal(turn + m * idx);
  };
  // all_states() is sorted and contains 0, so the start tuple encodes as state 0.

  const RegisterSetId shared = RegisterSetId::working(0);
  std::vector<std::uint64_t> digits(m, 0);
  for (std::uint64_t idx = 0; idx < tuples; ++idx) {
    std::uint64_t rest = idx;
    for (std::size_t g = 0; g < m; ++g) {
      digits[g] = rest % states[g].size();
      rest /= states[g].size();
    }
    bool any_rows = false;
    for (std::size_t g = 0; g < m; ++g) any_rows = any_rows || machines[g].rows(states[g][digits[g]]);
    if (!any_rows) continue;  // every bank is in a halting state
    for (std::size_t turn = 0; turn < m; ++turn) {
      const Ordinal here = encode(turn, digits);
      const std::uint64_t next_turn = (turn + 1) % m;
      const Ordinal tick = encode(next_turn, digits);
      sp.program.instructions.push_back({here, shared, false, Action::nop(), tick});
      sp.program.instructions.push_back({here, shared, true, Action::nop(), tick});
      const auto* rows = machines[turn].rows(states[turn][digits[turn]]);
      if (!rows) continue;
      for (std::size_t i : *rows) {
        const Instruction& ins = pp.banks[turn].program.instructions[i];
        auto moved = digits;
        moved[turn] = pos[turn].at(ins.next);
        Action act = ins.action;
        if (act.kind != ActionKind::Nop) act.target = sp.placement.map(turn, act.target);
        sp.program.instructions.push_back(
            {here, sp.placement.map(turn, ins.set), ins.symbol, act, encode(next_turn, moved)});
      }
    }
  }
  const Ordinal& cap = pp.banks[0].program.spec.cap;
  for (const auto& b : pp.banks)
    if (b.program.spec.cap != cap) throw DomainError("serialize needs a common clock cap across banks");
  sp.program.spec.registers = n;
  sp.program.spec.cap = cap.is_finite() ? Ordinal(detail::checked_mul(*cap.to_natural(), m)) : cap;
  sp.program.validate();
  return sp;
}

// ---------------------------------------------------------------------------
// Text form: `on <g>: <program line>` adds a line to bank g; a bare `spec`
// line applies to every bank; `combine forall|exists|none`;
// `on <g>: slice <offset> <length>` binds part of the shared input;
// `on <g>: decide <regset> <cell>` picks the decision cell;
// `on <g>: arity <k>` hands O[0, k) to the next stage.

inline Combine parse_combine(std::string_view s) {
  if (s == "forall") return Combine::ForAll;
  if (s == "exists") return Combine::Exists;
  if (s == "none") return Combine::None;
  throw DomainError("unknown combine mode '" + std::string(s) + "'");
}

namespace detail {

inline ParallelProgram parse_stage(std::string_view source) {
  std::map<std::uint64_t, Bank> banks;
  std::map<std::uint64_t, std::vector<Instruction>> bank_lines;
  std::map<std::uint64_t, std::string> bank_headers;
  std::string shared_header;
  ParallelProgram pp;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const std::string_view raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view line = text::trim(text::strip_comment(raw));
    if (line.empty()) continue;
    const std::size_t column = static_cast<std::size_t>(line.data() - raw.data()) + 1;
    if (line.substr(0, 5) == "spec ") {
      shared_header += std::string(line) + "\n";
      continue;
    }
    if (line.substr(0, 8) == "combine ") {
      try {
        pp.combine = parse_combine(text::trim(line.substr(8)));
      } catch (const DomainError& e) {
        throw ParseError(line_no, column, e.what());
      }
      continue;
    }
    if (line.substr(0, 3) != "on ") throw ParseError(line_no, column, "expected 'on <bank>:', 'spec' or 'combine'");
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, column, "missing ':' after bank index");
    const std::uint64_t g = text::parse_natural(line.substr(3, colon - 3), line_no, column + 3, "bank index");
    const std::string_view rest = text::trim(line.substr(colon + 1));
    Bank& bank = banks[g];
    if (rest.substr(0, 6) == "slice ") {
      std::string_view args = text::trim(rest.substr(6));
      const auto sp = args.find(' ');
      if (sp == std::string_view::npos) throw ParseError(line_no, column, "expected 'slice <offset> <length>'");
      bank.input_offset = text::parse_natural(args.substr(0, sp), line_no, column, "offset");
      bank.input_length = text::parse_natural(args.substr(sp + 1), line_no, column, "length");
    } else if (rest.substr(0, 6) == "arity ") {
      bank.output_arity = text::parse_natural(text::trim(rest.substr(6)), line_no, column, "arity");
    } else if (rest.substr(0, 7) == "decide ") {
      std::string_view args = text::trim(rest.substr(7));
      const auto sp = args.find(' ');
      if (sp == std::string_view::npos) throw ParseError(line_no, column, "expected 'decide <regset> <cell>'");
      bank.decision = parse_regset(args.substr(0, sp), line_no, column);
      bank.decision_cell = text::parse_natural(args.substr(sp + 1), line_no, column, "cell");
    } else {
      Program one;
      try {
        one = parse_program(rest);
      } catch (const ParseError& e) {
        throw ParseError(line_no, column + static_cast<std::size_t>(rest.data() - line.data()) + e.column() - 1,
                         e.message());
      }
      if (!one.instructions.empty()) bank_lines[g].push_back(one.instructions.front());
      for (auto& [r, bits] : one.preload) bank.preload[r] = std::move(bits);
      if (rest.substr(0, 5) == "spec ") bank_headers[g] += std::string(rest) + "\n";
    }
  }
  for (auto& [g, bank] : banks) {
    if (g != pp.banks.size()) throw DomainError("bank indices must be 0, 1, 2, ... without gaps");
    bank.program = parse_program(shared_header + bank_headers[g]);
    bank.program.instructions = std::move(bank_lines[g]);
    pp.banks.push_back(std::move(bank));
  }
  return pp;
}

}  // namespace detail

/// A line reading `then` ends a stage; the next stage runs on its outputs.
inline ParallelProgram parse_parallel(std::string_view source) {
  std::vector<std::string_view> lines;
  std::vector<std::size_t> stage_of;
  std::size_t stage = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const std::string_view raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    const bool split = text::trim(text::strip_comment(raw)) == "then";
    lines.push_back(split ? std::string_view{} : raw);
    stage_of.push_back(stage);
    if (split) ++stage;
  }
  // Other stages' lines stay as blanks so diagnostics keep their line numbers.
  std::vector<std::string> stages(stage + 1);
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t k = 0; k <= stage; ++k) {
      if (k == stage_of[i]) stages[k] += lines[i];
      stages[k] += '\n';
    }
  ParallelProgram out = detail::parse_stage(stages.front());
  for (std::size_t i = 1; i < stages.size(); ++i) out = chain(std::move(out), detail::parse_stage(stages[i]));
  return out;
}

/// Inverse of parse_parallel for programs without a management program.
inline std::string format_parallel(const ParallelProgram& pp) {
  std::ostringstream out;
  for (const ParallelProgram* stage = &pp; stage; stage = stage->next.get()) {
    if (stage != &pp) out << "then\n";
    if (stage->combine == Combine::CopyThenRun) throw DomainError("copy-then-run stages have no text form");
    out << "combine " << to_string(stage->combine) << '\n';
    for (std::size_t g = 0; g < stage->banks.size(); ++g) {
      const Bank& b = stage->banks[g];
      Program body = b.program;
      for (const auto& [r, bits] : b.preload) body.preload[r] = bits;
      std::istringstream lines(format_program(body, false));
      for (std::string line; std::getline(lines, line);) out << "on " << g << ": " << line << '\n';
      if (b.input_offset != 0 || b.input_length != std::numeric_limits<std::uint64_t>::max())
        out << "on " << g << ": slice " << b.input_offset << ' ' << b.input_length << '\n';
      if (b.output_arity != 1) out << "on " << g << ": arity " << b.output_arity << '\n';
      if (b.decision != RegisterSetId::output() || b.decision_cell != 0)
        out << "on " << g << ": decide " << b.decision.to_string() << ' ' << b.decision_cell << '\n';
    }
  }
  return out.str();
}

}  // namespace hvm

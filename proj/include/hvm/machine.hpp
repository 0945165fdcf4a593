#pragma once

// Register machine over ordinal states: instruction encoding, register files,
// dispatch and the successor step.
//
// Register positions are naturals in [0, N) where N is the register
// surrogate. A head may additionally sit at N, which stands for the limit
// position reached by a head that moved right unboundedly: nothing is read
// there (guards on that set never match), left is a no-op as at any limit
// position, and right or a write at N is a fault.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "hvm/bits.hpp"
#include "hvm/errors.hpp"
#include "hvm/ordinal.hpp"

namespace hvm {

enum class SetKind { Input, Working, Output };

struct RegisterSetId {
  SetKind kind = SetKind::Input;
  std::uint64_t index = 0;  // only meaningful for Working

  static RegisterSetId input() { return {SetKind::Input, 0}; }
  static RegisterSetId working(std::uint64_t beta) { return {SetKind::Working, beta}; }
  static RegisterSetId output() { return {SetKind::Output, 0}; }

  friend auto operator<=>(const RegisterSetId&, const RegisterSetId&) = default;

  std::string to_string() const {
    switch (kind) {
      case SetKind::Input: return "I";
      case SetKind::Output: return "O";
      case SetKind::Working: break;
    }
    return "W[" + std::to_string(index) + "]";
  }
};

enum class ActionKind { Nop, Write0, Write1, Left, Right, Reset };

struct Action {
  ActionKind kind = ActionKind::Nop;
  RegisterSetId target{};

  static Action nop() { return {}; }
  static Action write0(RegisterSetId r) { return {ActionKind::Write0, r}; }
  static Action write1(RegisterSetId r) { return {ActionKind::Write1, r}; }
  static Action left(RegisterSetId r) { return {ActionKind::Left, r}; }
  static Action right(RegisterSetId r) { return {ActionKind::Right, r}; }
  static Action reset(RegisterSetId r) { return {ActionKind::Reset, r}; }

  bool is_write() const { return kind == ActionKind::Write0 || kind == ActionKind::Write1; }
  bool is_move() const { return kind == ActionKind::Left || kind == ActionKind::Right || kind == ActionKind::Reset; }

  friend bool operator==(const Action& a, const Action& b) {
    return a.kind == b.kind && (a.kind == ActionKind::Nop || a.target == b.target);
  }

  std::string to_string() const {
    const char* name = "nop";
    switch (kind) {
      case ActionKind::Nop: return name;
      case ActionKind::Write0: name = "write0"; break;
      case ActionKind::Write1: name = "write1"; break;
      case ActionKind::Left: name = "left"; break;
      case ActionKind::Right: name = "right"; break;
      case ActionKind::Reset: name = "reset"; break;
    }
    return std::string(name) + "(" + target.to_string() + ")";
  }
};

/// Numeric action code: a bare type (0, 3..6, 9..11, 13) or a pair <type, beta>
/// for the working-register forms (1, 2, 7, 8, 12).
struct ActionCode {
  int type = 0;
  std::optional<std::uint64_t> beta;
  friend bool operator==(const ActionCode&, const ActionCode&) = default;

  std::string to_string() const {
    if (!beta) return std::to_string(type);
    return "<" + std::to_string(type) + "," + std::to_string(*beta) + ">";
  }
};

inline ActionCode action_code(const Action& a) {
  const SetKind k = a.target.kind;
  const std::uint64_t b = a.target.index;
  auto pick = [&](int on_input, int on_working, int on_output) -> ActionCode {
    if (k == SetKind::Working) return {on_working, b};
    if (k == SetKind::Output) return {on_output, std::nullopt};
    if (on_input < 0) throw DomainError("input registers are read-only");
    return {on_input, std::nullopt};
  };
  switch (a.kind) {
    case ActionKind::Nop: return {0, std::nullopt};
    case ActionKind::Write0: return pick(-1, 1, 5);
    case ActionKind::Write1: return pick(-1, 2, 6);
    case ActionKind::Left: return pick(3, 7, 9);
    case ActionKind::Right: return pick(4, 8, 10);
    case ActionKind::Reset: return pick(11, 12, 13);
  }
  return {0, std::nullopt};
}

inline Action action_from_code(const ActionCode& c) {
  const auto W = [&] {
    if (!c.beta) throw DomainError("action code " + std::to_string(c.type) + " needs a register index");
    return RegisterSetId::working(*c.beta);
  };
  const auto bare = [&](RegisterSetId r) {
    if (c.beta) throw DomainError("action code " + std::to_string(c.type) + " takes no register index");
    return r;
  };
  const RegisterSetId I = RegisterSetId::input(), O = RegisterSetId::output();
  switch (c.type) {
    case 0: bare(I); return Action::nop();
    case 1: return Action::write0(W());
    case 2: return Action::write1(W());
    case 3: return Action::left(bare(I));
    case 4: return Action::right(bare(I));
    case 5: return Action::write0(bare(O));
    case 6: return Action::write1(bare(O));
    case 7: return Action::left(W());
    case 8: return Action::right(W());
    case 9: return Action::left(bare(O));
    case 10: return Action::right(bare(O));
    case 11: return Action::reset(bare(I));
    case 12: return Action::reset(W());
    case 13: return Action::reset(bare(O));
    default: throw DomainError("unknown action code " + std::to_string(c.type));
  }
}

struct Instruction {
  Ordinal current;
  RegisterSetId set;
  bool symbol = false;
  Action action;
  Ordinal next;
  friend bool operator==(const Instruction&, const Instruction&) = default;

  std::string to_string() const {
    return "<" + current.to_string() + ", " + set.to_string() + ", " + (symbol ? "1" : "0") + ", " +
           action.to_string() + ", " + next.to_string() + ">";
  }
};

/// Finite surrogates for the machine's cardinal parameters.
struct MachineSpec {
  std::uint64_t registers = 0;  // N; 0 = not given, must be supplied before running
  std::uint64_t states = 0;     // 0 = derive from the program
  std::uint64_t length = 0;     // distinct current states; 0 = derive
  Ordinal cap = Ordinal::omega();
  friend bool operator==(const MachineSpec&, const MachineSpec&) = default;
};

inline void check_accessible(const Ordinal& current, const Ordinal& next) {
  if (next < prevlim(current) || next >= nextlim(current))
    throw AccessibilityError("next state " + next.to_string() + " is not accessible from " + current.to_string() +
                             " (window [" + prevlim(current).to_string() + ", " + nextlim(current).to_string() +
                             "))");
}

struct Program {
  MachineSpec spec;
  std::vector<Instruction> instructions;
  std::map<RegisterSetId, Bits> preload;  // cells set before the run starts

  friend bool operator==(const Program&, const Program&) = default;

  std::set<Ordinal> current_states() const {
    std::set<Ordinal> out;
    for (const auto& ins : instructions) out.insert(ins.current);
    return out;
  }

  std::set<Ordinal> all_states() const {
    std::set<Ordinal> out{Ordinal(0)};
    for (const auto& ins : instructions) {
      out.insert(ins.current);
      out.insert(ins.next);
    }
    return out;
  }

  /// Fills derived surrogates and checks the structural invariants.
  void validate() {
    for (const auto& ins : instructions) {
      check_accessible(ins.current, ins.next);
      if (ins.action.is_write() && ins.action.target.kind == SetKind::Input)
        throw DomainError("input registers are read-only: " + ins.to_string());
    }
    for (const auto& [set, bits] : preload)
      if (set.kind == SetKind::Input) throw DomainError("preload cannot target the input registers");
    const std::uint64_t used_length = current_states().size();
    const std::uint64_t used_states = all_states().size();
    if (spec.length == 0) spec.length = used_length;
    if (spec.states == 0) spec.states = std::max(used_states, spec.length);
    if (used_length > spec.length)
      throw DomainError("program has " + std::to_string(used_length) + " table entries, header allows len=" +
                        std::to_string(spec.length));
    if (used_states > spec.states)
      throw DomainError("program uses " + std::to_string(used_states) + " states, header allows states=" +
                        std::to_string(spec.states));
    if (spec.length > spec.states) throw DomainError("len must not exceed states");
    if (!spec.cap.is_zero() && !spec.cap.is_finite() && !spec.cap.is_limit())
      throw DomainError("clock cap must be a natural number or a limit ordinal, got " + spec.cap.to_string());
  }
};

/// One register set: head position and the positions holding 1.
struct Register {
  std::uint64_t head = 0;
  std::set<std::uint64_t> ones;
  friend bool operator==(const Register&, const Register&) = default;
};

struct Configuration {
  Ordinal state;
  Ordinal clock;
  std::map<RegisterSetId, Register> registers;

  /// Absent registers and registers with head 0 and no ones compare equal.
  friend bool operator==(const Configuration& a, const Configuration& b) {
    if (a.state != b.state || a.clock != b.clock) return false;
    return a.same_registers(b) && b.same_registers(a);
  }

  bool same_registers(const Configuration& other) const {
    static const Register empty;
    for (const auto& [r, reg] : registers) {
      auto it = other.registers.find(r);
      if (reg != (it == other.registers.end() ? empty : it->second)) return false;
    }
    return true;
  }

  std::uint64_t head(const RegisterSetId& r) const {
    auto it = registers.find(r);
    return it == registers.end() ? 0 : it->second.head;
  }

  bool cell(const RegisterSetId& r, std::uint64_t pos) const {
    auto it = registers.find(r);
    return it != registers.end() && it->second.ones.count(pos) > 0;
  }

  Bits dense(const RegisterSetId& r, std::uint64_t width) const {
    Bits out(width);
    for (std::uint64_t i = 0; i < width; ++i) out[i] = cell(r, i);
    return out;
  }

  void set_cell(const RegisterSetId& r, std::uint64_t pos, bool value) {
    if (value) registers[r].ones.insert(pos);
    else if (auto it = registers.find(r); it != registers.end()) it->second.ones.erase(pos);
  }

  void load(const RegisterSetId& r, const Bits& bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) set_cell(r, i, bits[i]);
  }

  /// Drops register entries that are indistinguishable from absent ones.
  void normalize() {
    for (auto it = registers.begin(); it != registers.end();) {
      if (it->second.head == 0 && it->second.ones.empty()) it = registers.erase(it);
      else ++it;
    }
  }
};

/// Program plus a per-state index, the unit that gets executed.
class Machine {
 public:
  explicit Machine(Program program) : program_(std::move(program)) {
    program_.validate();
    for (std::size_t i = 0; i < program_.instructions.size(); ++i)
      by_state_[program_.instructions[i].current].push_back(i);
  }

  const Program& program() const noexcept { return program_; }
  const MachineSpec& spec() const noexcept { return program_.spec; }
  std::uint64_t registers() const noexcept { return program_.spec.registers; }

  /// Indices of the instructions whose current state is `state`, in program order.
  const std::vector<std::size_t>* rows(const Ordinal& state) const {
    auto it = by_state_.find(state);
    return it == by_state_.end() ? nullptr : &it->second;
  }

  void set_registers(std::uint64_t n) { program_.spec.registers = n; }

 private:
  Program program_;
  std::unordered_map<Ordinal, std::vector<std::size_t>> by_state_;
};

/// Input images per register set; unnamed sets start all-zero.
using Inputs = std::map<RegisterSetId, Bits>;

inline Configuration init_configuration(const Machine& m, const Inputs& inputs) {
  const std::uint64_t n = m.registers();
  if (n == 0) throw DomainError("register surrogate N not set (use a header or a truncation)");
  Configuration c;
  auto load = [&](const RegisterSetId& r, const Bits& bits) {
    if (bits.size() > n)
      throw DomainError("input for " + r.to_string() + " has " + std::to_string(bits.size()) +
                        " bits, more than N=" + std::to_string(n));
    c.load(r, bits);
  };
  for (const auto& [r, bits] : m.program().preload) load(r, bits);
  for (const auto& [r, bits] : inputs) load(r, bits);
  return c;
}

inline Configuration init_configuration(const Machine& m, const Bits& input) {
  return init_configuration(m, Inputs{{RegisterSetId::input(), input}});
}

/// Output registers [0, N) as a dense bit sequence.
inline Bits read_output(const Configuration& c, std::uint64_t n) { return c.dense(RegisterSetId::output(), n); }

inline bool matches(const Instruction& ins, const Configuration& c, std::uint64_t n) {
  const std::uint64_t h = c.head(ins.set);
  return h < n && c.cell(ins.set, h) == ins.symbol;
}

/// Every instruction firing in the current configuration, in program order.
inline std::vector<Instruction> dispatch(const Configuration& c, const Machine& m) {
  std::vector<Instruction> out;
  if (const auto* rows = m.rows(c.state))
    for (std::size_t i : *rows) {
      const auto& ins = m.program().instructions[i];
      if (matches(ins, c, m.registers())) out.push_back(ins);
    }
  return out;
}

enum class HaltReason { NoInstruction, HaltState, ClockCap };

inline const char* to_string(HaltReason r) {
  switch (r) {
    case HaltReason::NoInstruction: return "no-instruction";
    case HaltReason::HaltState: return "halt-state";
    case HaltReason::ClockCap: return "clock-cap";
  }
  return "?";
}

struct StepOptions {
  bool strict_conflicts = false;
};

/// What one matched instruction did, for traces.
struct StepEffect {
  RegisterSetId set;
  std::uint64_t head = 0;
  std::optional<bool> wrote;
};

namespace detail {

/// Fires the matched rows on `c` in place; returns false (and leaves `c`
/// untouched) when nothing matched.
inline bool fire(Configuration& c, const Machine& m, const StepOptions& opt, std::vector<StepEffect>* effects) {
  const auto* rows = m.rows(c.state);
  if (!rows) return false;
  const std::uint64_t n = m.registers();
  const auto& prog = m.program().instructions;

  // Matching and every write/move position use the pre-step configuration.
  std::vector<const Instruction*> fired;
  for (std::size_t i : *rows)
    if (matches(prog[i], c, n)) fired.push_back(&prog[i]);
  if (fired.empty()) return false;

  if (opt.strict_conflicts)
    for (const auto* ins : fired)
      if (ins->next != fired.back()->next)
        throw MachineFault("conflicting next states " + ins->next.to_string() + " and " +
                           fired.back()->next.to_string() + " in state " + c.state.to_string());

  std::map<RegisterSetId, std::uint64_t> heads_before;
  for (const auto* ins : fired)
    if (ins->action.kind != ActionKind::Nop) heads_before.emplace(ins->action.target, c.head(ins->action.target));

  std::map<RegisterSetId, std::uint64_t> new_heads;
  for (const auto* ins : fired) {
    const Action& a = ins->action;
    if (a.kind == ActionKind::Nop) {
      if (effects) effects->push_back({ins->set, c.head(ins->set), std::nullopt});
      continue;
    }
    const std::uint64_t h = heads_before.at(a.target);
    switch (a.kind) {
      case ActionKind::Write0:
      case ActionKind::Write1: {
        if (h >= n) throw MachineFault("head out of range: write at limit position of " + a.target.to_string());
        const bool bit = a.kind == ActionKind::Write1;
        c.set_cell(a.target, h, bit);
        if (effects) effects->push_back({a.target, h, bit});
        continue;
      }
      case ActionKind::Left: new_heads[a.target] = (h == 0 || h >= n) ? h : h - 1; break;
      case ActionKind::Right:
        if (h >= n) throw MachineFault("head out of range: right move past N on " + a.target.to_string());
        new_heads[a.target] = h + 1;
        break;
      case ActionKind::Reset: new_heads[a.target] = 0; break;
      case ActionKind::Nop: break;
    }
    if (effects) effects->push_back({a.target, h, std::nullopt});
  }
  for (const auto& [r, h] : new_heads) {
    if (h == 0 && c.registers.find(r) == c.registers.end()) continue;
    c.registers[r].head = h;
  }
  c.state = fired.back()->next;
  return true;
}

}  // namespace detail

struct StepOutcome {
  enum class Kind { Advanced, Halted };
  Kind kind = Kind::Advanced;
  Configuration config;
  HaltReason reason = HaltReason::NoInstruction;
};

inline HaltReason no_match_reason(const Configuration& c, const Machine& m) {
  return m.rows(c.state) ? HaltReason::NoInstruction : HaltReason::HaltState;
}

/// One successor step. Faults surface as MachineFault exceptions.
inline StepOutcome step_successor(const Configuration& c, const Machine& m, const StepOptions& opt = {}) {
  StepOutcome out{StepOutcome::Kind::Advanced, c, HaltReason::NoInstruction};
  if (!detail::fire(out.config, m, opt, nullptr)) {
    out.kind = StepOutcome::Kind::Halted;
    out.reason = no_match_reason(c, m);
    return out;
  }
  out.config.clock = ord_add(c.clock, 1);
  return out;
}

}  // namespace hvm

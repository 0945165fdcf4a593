#pragma once

// Compiles first-order formulas over n-bit strings into machine programs.
//
// Serial form. Connectives become control flow: every subformula is emitted
// with a "true" and a "false" continuation state. A quantifier owns three
// working sets:
//   D  the domain track (encode_domain: each element followed by a marker),
//   V  the current element, copied out of D,
//   S  one (present=1, truth) pair per visited element.
// Its loop re-arms D's markers with a sweep guided by a shared ruler track
// (ones over the length of D), then repeatedly copies the next element into V,
// clears its marker and runs the body. A marker cell reading 0 ends the loop.
// The fold scans S like the conjunction (for all) or disjunction (exists)
// program and jumps to the outer continuation.
//
// Atoms:
//   a = b     bitwise comparison loop over the V sets (or against a constant);
//   t in X    loop over X's track (marker 1, then the element's bits) comparing
//             each entry with t;
//   P(a, b)   truth-table lookup: the table head is moved right by the index
//             of the argument tuple, read off V bit by bit.
// The program writes the result to W[0][0] and O[0] and halts.
//
// Parallel form. The formula is put in prenex form Q1 x1 ... Qk xk M. Stage 1
// has one bank per tuple (x1, ..., xk) evaluating M with the V sets preloaded;
// each further stage folds blocks of 2^n bits with the conjunction or
// disjunction corpus program reading I. The last stage's management step
// applies Q1.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hvm/bits.hpp"
#include "hvm/corpus.hpp"
#include "hvm/errors.hpp"
#include "hvm/formula.hpp"
#include "hvm/limit.hpp"
#include "hvm/machine.hpp"
#include "hvm/parallel.hpp"

namespace hvm::logic {

inline constexpr std::uint64_t kMinCompileWidth = 1;
inline constexpr std::uint64_t kMaxCompileWidth = 6;
inline constexpr std::uint64_t kMaxBanks = 1ULL << 16;

struct LoopLayout {
  std::string var;
  bool universal = true;
  RegisterSetId domain;
  RegisterSetId value;
  RegisterSetId truth;
  std::uint64_t label = 0;  // loop label: copies the next element
};

struct SerialCompilation {
  Program program;
  std::vector<LoopLayout> loops;
  RegisterSetId ruler = RegisterSetId::working(1);
  std::map<std::string, RegisterSetId> tracks;  // set and table tracks by name
};

namespace compiler_detail {

inline void check_width(const DomainSpec& d) {
  if (d.n < kMinCompileWidth || d.n > kMaxCompileWidth)
    throw DomainError("domain width must be in [" + std::to_string(kMinCompileWidth) + ", " +
                      std::to_string(kMaxCompileWidth) + "], got " + std::to_string(d.n));
}

class Builder {
 public:
  Builder(const Environment& env, std::uint64_t n) : env_(env), n_(n) { need(1); }

  std::uint64_t state() { return next_state_++; }

  RegisterSetId fresh() { return RegisterSetId::working(next_reg_++); }

  void row(std::uint64_t cur, RegisterSetId set, bool sym, Action a, std::uint64_t next) {
    out_.program.instructions.push_back({Ordinal(cur), set, sym, a, Ordinal(next)});
  }
  void always(std::uint64_t cur, Action a, std::uint64_t next) { row(cur, zero(), false, a, next); }
  void jump(std::uint64_t cur, std::uint64_t next) { always(cur, Action::nop(), next); }

  void bind(const std::string& var, RegisterSetId value) { scope_.emplace_back(var, value); }

  void preload(RegisterSetId r, Bits bits) {
    need(bits.size() + 1);
    out_.program.preload[r] = std::move(bits);
  }

  /// Emits `f` so that it continues in `t` when true and `f_` when false.
  std::uint64_t emit(const Formula& f, std::uint64_t t, std::uint64_t f_) {
    using K = Formula::Kind;
    switch (f.kind) {
      case K::Not: return emit(*f.lhs, f_, t);
      case K::And: return emit(*f.lhs, emit(*f.rhs, t, f_), f_);
      case K::Or: return emit(*f.lhs, t, emit(*f.rhs, t, f_));
      case K::Implies: return emit(*f.lhs, emit(*f.rhs, t, f_), t);
      case K::Iff: {
        const std::uint64_t if_true = emit(*f.rhs, t, f_);
        const std::uint64_t if_false = emit(*f.rhs, f_, t);
        return emit(*f.lhs, if_true, if_false);
      }
      case K::ForAll:
      case K::Exists: return emit_loop(f, t, f_);
      case K::Equal: return emit_equal(f, t, f_);
      case K::Member: return emit_member(f, t, f_);
      case K::Predicate: return emit_lookup(f, t, f_);
    }
    throw DomainError("unknown formula node");
  }

  /// Start state 0 jumps to the formula; the result goes to W[0][0] and O[0].
  SerialCompilation finish(const Formula& f) {
    const std::uint64_t start = state();
    const std::uint64_t yes = state();
    const std::uint64_t no = state();
    const std::uint64_t halt = state();
    jump(start, emit(f, yes, no));
    always(yes, Action::write1(zero()), halt);
    always(yes, Action::write1(RegisterSetId::output()), halt);
    always(no, Action::write0(RegisterSetId::output()), halt);
    if (!out_.loops.empty()) preload(out_.ruler, Bits((1ULL << n_) * (n_ + 1), true));
    out_.program.spec.registers = registers_;
    out_.program.spec.cap = Ordinal::omega();
    out_.program.validate();
    return std::move(out_);
  }

 private:
  const Environment& env_;
  std::uint64_t n_;
  std::uint64_t next_state_ = 0;
  std::uint64_t next_reg_ = 2;  // W[0]: result and constant 0; W[1]: ruler
  std::uint64_t registers_ = 1;
  std::vector<std::pair<std::string, RegisterSetId>> scope_;
  SerialCompilation out_;

  static RegisterSetId zero() { return RegisterSetId::working(0); }
  void need(std::uint64_t cells) { registers_ = std::max(registers_, cells); }

  struct Operand {
    bool constant = false;
    std::uint64_t value = 0;  // constants
    RegisterSetId reg;        // variables
    bool flipped = false;
  };

  Operand operand(const Term& t) const {
    Operand o;
    o.flipped = t.flipped;
    if (t.kind == Term::Kind::Const) {
      o.constant = true;
      o.value = element_value(t.text, n_);
      if (t.flipped) o.value ^= (1ULL << n_) - 1;
      return o;
    }
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == t.text) {
        o.reg = it->second;
        return o;
      }
    throw DomainError("unbound variable '" + t.text + "'");
  }

  bool bit(std::uint64_t value, std::uint64_t k) const { return (value >> (n_ - 1 - k)) & 1; }

  const Relation& relation(const std::string& name) const {
    auto it = env_.find(name);
    if (it == env_.end()) throw DomainError("undefined relation '" + name + "'");
    return it->second;
  }

  std::uint64_t emit_loop(const Formula& f, std::uint64_t t, std::uint64_t f_) {
    const bool all = f.kind == Formula::Kind::ForAll;
    const std::uint64_t n = n_;
    LoopLayout lay{f.name, all, fresh(), fresh(), fresh(), 0};
    preload(lay.domain, encode_domain({n}));
    need((1ULL << n) * (n + 1) + n + 1);  // the end-of-track marker read
    need(2 * (1ULL << n) + 1);
    const RegisterSetId D = lay.domain, V = lay.value, S = lay.truth, Ru = out_.ruler;

    const std::uint64_t init = state();
    std::vector<std::uint64_t> sweep(n + 1), copy(n + 1);
    for (auto& s : sweep) s = state();
    const std::uint64_t rewound = state();
    for (auto& s : copy) s = state();
    const std::uint64_t yes = state(), yes2 = state(), no = state(), no2 = state();
    const std::uint64_t fold0 = state(), fold1 = state();
    lay.label = copy[0];

    // Re-arm every marker of D.
    always(init, Action::reset(D), sweep[0]);
    always(init, Action::reset(Ru), sweep[0]);
    always(init, Action::reset(S), sweep[0]);
    for (std::uint64_t k = 0; k <= n; ++k) {
      const std::uint64_t nxt = k == n ? sweep[0] : sweep[k + 1];
      if (k == n) row(sweep[k], Ru, true, Action::write1(D), nxt);
      row(sweep[k], Ru, true, Action::right(D), nxt);
      row(sweep[k], Ru, true, Action::right(Ru), nxt);
      row(sweep[k], Ru, false, Action::nop(), rewound);
    }
    always(rewound, Action::reset(D), copy[0]);
    always(rewound, Action::reset(V), copy[0]);

    // Copy the element into V, then consume its marker.
    for (std::uint64_t k = 0; k < n; ++k)
      for (bool b : {false, true}) {
        row(copy[k], D, b, b ? Action::write1(V) : Action::write0(V), copy[k + 1]);
        row(copy[k], D, b, Action::right(D), copy[k + 1]);
        row(copy[k], D, b, Action::right(V), copy[k + 1]);
      }
    scope_.emplace_back(f.name, V);
    out_.loops.push_back(lay);
    const std::uint64_t body = emit(*f.lhs, yes, no);
    scope_.pop_back();
    row(copy[n], D, true, Action::write0(D), body);
    row(copy[n], D, true, Action::right(D), body);
    row(copy[n], D, false, Action::reset(S), fold0);

    // Record (present, truth), rewind V and go round again.
    always(yes, Action::write1(S), yes2);
    always(yes, Action::right(S), yes2);
    always(yes2, Action::write1(S), copy[0]);
    always(yes2, Action::right(S), copy[0]);
    always(yes2, Action::reset(V), copy[0]);
    always(no, Action::write1(S), no2);
    always(no, Action::right(S), no2);
    always(no2, Action::write0(S), copy[0]);
    always(no2, Action::right(S), copy[0]);
    always(no2, Action::reset(V), copy[0]);

    // Fold: fold0 expects a present bit, fold1 a truth bit.
    row(fold0, S, true, Action::right(S), fold1);
    row(fold0, S, false, Action::nop(), all ? t : f_);
    if (all) {
      row(fold1, S, true, Action::right(S), fold0);
      row(fold1, S, false, Action::nop(), f_);
    } else {
      row(fold1, S, false, Action::right(S), fold0);
      row(fold1, S, true, Action::nop(), t);
    }
    return init;
  }

  std::uint64_t emit_equal(const Formula& f, std::uint64_t t, std::uint64_t f_) {
    const Operand a = operand(f.args[0]);
    const Operand b = operand(f.args[1]);
    const std::uint64_t entry = state();
    if (a.constant && b.constant) {
      jump(entry, a.value == b.value ? t : f_);
      return entry;
    }
    if (!a.constant && !b.constant && a.reg == b.reg) {
      jump(entry, a.flipped == b.flipped ? t : f_);
      return entry;
    }
    if (a.constant || b.constant) {
      const Operand& v = a.constant ? b : a;
      const std::uint64_t c = a.constant ? a.value : b.value;
      std::vector<std::uint64_t> s(n_);
      for (auto& x : s) x = state();
      always(entry, Action::reset(v.reg), s[0]);
      for (std::uint64_t k = 0; k < n_; ++k) {
        const bool want = bit(c, k) != v.flipped;
        row(s[k], v.reg, want, Action::right(v.reg), k + 1 < n_ ? s[k + 1] : t);
        row(s[k], v.reg, !want, Action::nop(), f_);
      }
      return entry;
    }
    std::vector<std::uint64_t> s(n_), seen0(n_), seen1(n_);
    for (std::uint64_t k = 0; k < n_; ++k) {
      s[k] = state();
      seen0[k] = state();
      seen1[k] = state();
    }
    always(entry, Action::reset(a.reg), s[0]);
    always(entry, Action::reset(b.reg), s[0]);
    for (std::uint64_t k = 0; k < n_; ++k) {
      const std::uint64_t nxt = k + 1 < n_ ? s[k + 1] : t;
      row(s[k], a.reg, false, Action::right(a.reg), seen0[k]);
      row(s[k], a.reg, true, Action::right(a.reg), seen1[k]);
      for (bool sym : {false, true}) {
        const std::uint64_t here = sym ? seen1[k] : seen0[k];
        const bool want = (sym != a.flipped) != b.flipped;
        row(here, b.reg, want, Action::right(b.reg), nxt);
        row(here, b.reg, !want, Action::nop(), f_);
      }
    }
    return entry;
  }

  RegisterSetId track(const std::string& key) {
    auto it = out_.tracks.find(key);
    if (it != out_.tracks.end()) return it->second;
    const RegisterSetId r = fresh();
    out_.tracks[key] = r;
    return r;
  }

  std::uint64_t emit_member(const Formula& f, std::uint64_t t, std::uint64_t f_) {
    const Relation& rel = relation(f.name);
    if (rel.arity > 1) throw DomainError("'in' needs a set of elements: " + f.name);
    const Operand x = operand(f.args[0]);
    const std::uint64_t entry = state();
    if (x.constant) {
      jump(entry, rel.tuples.count(std::vector<std::string>{hvm::to_string(bits_of(x.value, n_))}) ? t : f_);
      return entry;
    }
    const bool fresh_track = !out_.tracks.count("in:" + f.name);
    const RegisterSetId M = track("in:" + f.name);
    if (fresh_track) {
      Bits image;
      for (const auto& tuple : rel.tuples) {
        image.push_back(true);
        const Bits e = bits_of(element_value(tuple[0], n_), n_);
        image.insert(image.end(), e.begin(), e.end());
      }
      preload(M, image);
    }
    const std::uint64_t block = state();
    std::vector<std::uint64_t> s(n_), seen0(n_), seen1(n_), skip(n_);
    for (std::uint64_t k = 0; k < n_; ++k) {
      s[k] = state();
      seen0[k] = state();
      seen1[k] = state();
      skip[k] = k == 0 ? block : state();
    }
    always(entry, Action::reset(M), block);
    row(block, M, true, Action::right(M), s[0]);
    row(block, M, true, Action::reset(x.reg), s[0]);
    row(block, M, false, Action::nop(), f_);
    for (std::uint64_t j = 1; j < n_; ++j) always(skip[j], Action::right(M), skip[j - 1]);
    for (std::uint64_t k = 0; k < n_; ++k) {
      row(s[k], x.reg, false, Action::right(x.reg), seen0[k]);
      row(s[k], x.reg, true, Action::right(x.reg), seen1[k]);
      for (bool sym : {false, true}) {
        const std::uint64_t here = sym ? seen1[k] : seen0[k];
        const bool actual = sym != x.flipped;
        row(here, M, actual, Action::right(M), k + 1 < n_ ? s[k + 1] : t);
        row(here, M, !actual, Action::right(M), skip[n_ - 1 - k]);
      }
    }
    return entry;
  }

  std::uint64_t moves(RegisterSetId r, std::uint64_t count, std::uint64_t next) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::uint64_t s = state();
      always(s, Action::right(r), next);
      next = s;
    }
    return next;
  }

  std::uint64_t emit_lookup(const Formula& f, std::uint64_t t, std::uint64_t f_) {
    const std::size_t arity = f.args.size();
    if (arity == 0 || arity > 2)
      throw DomainError("unsupported atom arity " + std::to_string(arity) + " for '" + f.name + "' (at most 2)");
    const Relation& rel = relation(f.name);
    const std::string key = "table:" + f.name + "/" + std::to_string(arity);
    const bool fresh_track = !out_.tracks.count(key);
    const RegisterSetId T = track(key);
    if (fresh_track) preload(T, truth_table(rel, arity, n_));
    need(1ULL << (n_ * arity));

    const std::uint64_t read = state();
    row(read, T, true, Action::nop(), t);
    row(read, T, false, Action::nop(), f_);
    std::uint64_t cont = read;
    for (std::size_t i = arity; i-- > 0;) {
      const std::uint64_t weight = 1ULL << (n_ * (arity - 1 - i));
      const Operand x = operand(f.args[i]);
      if (x.constant) {
        cont = moves(T, x.value * weight, cont);
        continue;
      }
      std::uint64_t after = cont;
      for (std::uint64_t k = n_; k-- > 0;) {
        const std::uint64_t s = state();
        const std::uint64_t jumped = moves(T, weight << (n_ - 1 - k), after);
        row(s, x.reg, !x.flipped, Action::right(x.reg), jumped);
        row(s, x.reg, x.flipped, Action::right(x.reg), after);
        after = s;
      }
      const std::uint64_t rewind = state();
      always(rewind, Action::reset(x.reg), after);
      cont = rewind;
    }
    const std::uint64_t entry = state();
    always(entry, Action::reset(T), cont);
    return entry;
  }
};

}  // namespace compiler_detail

/// Serial program plus the register layout of its quantifier loops.
inline SerialCompilation compile_serial_layout(const Formula& f, const Environment& env, const DomainSpec& d) {
  compiler_detail::check_width(d);
  compiler_detail::Builder b(env, d.n);
  return b.finish(f);
}

inline Program compile_serial(const Formula& f, const Environment& env, const DomainSpec& d) {
  return compile_serial_layout(f, env, d).program;
}

inline Program compile_serial(const FormulaText& t, const DomainSpec& d) { return compile_serial(*t.formula, t.env, d); }

/// Runs a compiled serial program; returns its flag W[0][0].
inline bool run_serial(const Program& p, std::uint64_t budget = 100'000'000) {
  RunOptions opt;
  opt.budget = budget;
  auto res = run(Machine(p), Bits{}, opt);
  if (!res.halted()) throw DomainError("compiled program did not halt within the step budget");
  return res.flag();
}

// ---------------------------------------------------------------------------
// Prenex form.

struct PrenexForm {
  std::vector<std::pair<bool, std::string>> prefix;  // (universal, variable), outermost first
  FormulaPtr matrix;
};

namespace compiler_detail {

/// Negation normal form without -> and <->; negations sit on atoms only.
inline FormulaPtr nnf(const FormulaPtr& f, bool neg) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Equal:
    case K::Member:
    case K::Predicate: return neg ? negate(f) : f;
    case K::Not: return nnf(f->lhs, !neg);
    case K::And:
      return neg ? either(nnf(f->lhs, true), nnf(f->rhs, true)) : both(nnf(f->lhs, false), nnf(f->rhs, false));
    case K::Or:
      return neg ? both(nnf(f->lhs, true), nnf(f->rhs, true)) : either(nnf(f->lhs, false), nnf(f->rhs, false));
    case K::Implies:
      return neg ? both(nnf(f->lhs, false), nnf(f->rhs, true)) : either(nnf(f->lhs, true), nnf(f->rhs, false));
    case K::Iff:
      return neg ? either(both(nnf(f->lhs, false), nnf(f->rhs, true)), both(nnf(f->lhs, true), nnf(f->rhs, false)))
                 : either(both(nnf(f->lhs, false), nnf(f->rhs, false)), both(nnf(f->lhs, true), nnf(f->rhs, true)));
    case K::ForAll:
    case K::Exists: {
      const bool all = (f->kind == K::ForAll) != neg;
      return all ? forall(f->name, nnf(f->lhs, neg)) : exists(f->name, nnf(f->lhs, neg));
    }
  }
  throw DomainError("unknown formula node");
}

inline Term rename(Term t, const std::map<std::string, std::string>& names) {
  if (t.kind == Term::Kind::Var)
    if (auto it = names.find(t.text); it != names.end()) t.text = it->second;
  return t;
}

/// Pulls quantifiers out of an NNF formula, renaming bound variables apart.
inline FormulaPtr pull(const FormulaPtr& f, std::map<std::string, std::string> names, PrenexForm& out,
                       std::size_t& counter) {
  using K = Formula::Kind;
  switch (f->kind) {
    case K::Equal:
    case K::Member:
    case K::Predicate: {
      Formula g = *f;
      for (auto& a : g.args) a = rename(a, names);
      return make(std::move(g));
    }
    case K::Not: return negate(pull(f->lhs, names, out, counter));
    case K::And: return both(pull(f->lhs, names, out, counter), pull(f->rhs, names, out, counter));
    case K::Or: return either(pull(f->lhs, names, out, counter), pull(f->rhs, names, out, counter));
    case K::ForAll:
    case K::Exists: {
      const std::string fresh = "_q" + std::to_string(counter++);
      names[f->name] = fresh;
      out.prefix.emplace_back(f->kind == K::ForAll, fresh);
      return pull(f->lhs, names, out, counter);
    }
    default: throw DomainError("formula not in negation normal form");
  }
}

}  // namespace compiler_detail

/// Equivalent prenex form over a nonempty domain.
inline PrenexForm prenex(const FormulaPtr& f) {
  PrenexForm out;
  std::size_t counter = 0;
  out.matrix = compiler_detail::pull(compiler_detail::nnf(f, false), {}, out, counter);
  return out;
}

// ---------------------------------------------------------------------------
// Parallel form.

/// Stage 1 of a compiled parallel program; exposed for chaining experiments.
inline ParallelProgram compile_matrix_stage(const PrenexForm& pf, const Environment& env, const DomainSpec& d) {
  compiler_detail::check_width(d);
  const std::size_t k = pf.prefix.size();
  if (d.n * k > 16 || (1ULL << (d.n * k)) > kMaxBanks)
    throw DomainError("parallel form needs 2^" + std::to_string(d.n * k) + " banks, over the budget");
  compiler_detail::Builder b(env, d.n);
  std::vector<RegisterSetId> values;
  for (const auto& [all, var] : pf.prefix) {
    values.push_back(b.fresh());
    b.bind(var, values.back());
    b.preload(values.back(), Bits(d.n, false));
  }
  SerialCompilation sc = b.finish(*pf.matrix);
  for (const auto& v : values) sc.program.preload.erase(v);

  ParallelProgram stage;
  const std::uint64_t banks = 1ULL << (d.n * k);
  for (std::uint64_t idx = 0; idx < banks; ++idx) {
    Bank bank;
    bank.program = sc.program;
    bank.input_length = 0;
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint64_t e = (idx >> (d.n * (k - 1 - j))) & ((1ULL << d.n) - 1);
      bank.preload[values[j]] = bits_of(e, d.n);
    }
    stage.banks.push_back(std::move(bank));
  }
  return stage;
}

inline ParallelProgram compile_parallel(const Formula& f, const Environment& env, const DomainSpec& d) {
  const PrenexForm pf = prenex(std::make_shared<const Formula>(f));
  ParallelProgram first = compile_matrix_stage(pf, env, d);
  const std::size_t k = pf.prefix.size();
  const std::uint64_t block = 1ULL << d.n;
  auto mode = [](bool all) { return all ? Combine::ForAll : Combine::Exists; };
  if (k == 0) {
    first.combine = Combine::ForAll;  // a single bank: the fold is its own bit
    return first;
  }
  std::vector<ParallelProgram> stages{std::move(first)};
  for (std::size_t j = k; j-- > 1;) {
    // Fold quantifier j over consecutive blocks of the previous outputs.
    const bool all = pf.prefix[j].first;
    ParallelProgram st;
    const std::uint64_t banks = 1ULL << (d.n * j);
    st.input_arity = banks * block;
    const Program fold = all ? corpus::conj(block, "I", "O") : corpus::disj(block, "I", "O");
    for (std::uint64_t g = 0; g < banks; ++g) {
      Bank bank;
      bank.program = fold;
      bank.input_offset = g * block;
      bank.input_length = block;
      st.banks.push_back(std::move(bank));
    }
    stages.push_back(std::move(st));
  }
  stages.back().combine = mode(pf.prefix[0].first);
  ParallelProgram out = std::move(stages.back());
  for (std::size_t i = stages.size() - 1; i-- > 0;) out = chain(std::move(stages[i]), std::move(out));
  return out;
}

inline ParallelProgram compile_parallel(const FormulaText& t, const DomainSpec& d) {
  return compile_parallel(*t.formula, t.env, d);
}

/// Runs a compiled parallel program; returns the final management bit.
inline bool run_compiled_parallel(const ParallelProgram& pp) {
  auto res = run_parallel(pp, Bits{});
  if (res.undetermined || !res.management()) throw DomainError("parallel run did not reach a decision");
  return *res.management();
}

}  // namespace hvm::logic

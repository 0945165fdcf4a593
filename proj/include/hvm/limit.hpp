#pragma once

// Transfinite execution: concrete successor steps plus limit jumps justified
// by a certified cycle.
//
// A cycle is a pair of configurations q < q+p in the current segment such that
// the run from q+p repeats the run from q, up to moving every register set R
// right by a fixed shift s_R >= 0. With all shifts 0 this is an exact cycle.
// At the next limit the lim-sup rule is evaluated on the repeating pattern:
//   - a cell is 1 iff it is 1 at some point of the cycle (sets with s = 0),
//     or, for s > 0, cells behind the window are frozen and repeat the pattern
//     left behind during one period;
//   - state and non-moving heads take their maximum over the cycle;
//   - a head with s > 0 is unbounded and lands on the limit position N.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "hvm/errors.hpp"
#include "hvm/machine.hpp"
#include "hvm/ordinal.hpp"

namespace hvm {

enum class CertificateKind { ExactCycle, TranslationalCycle, Undetermined };

inline const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::ExactCycle: return "exact";
    case CertificateKind::TranslationalCycle: return "translational";
    case CertificateKind::Undetermined: return "undetermined";
  }
  return "?";
}

struct LimitCertificate {
  CertificateKind kind = CertificateKind::Undetermined;
  std::uint64_t prefix_length = 0;  // q, counted from the start of the window
  std::uint64_t period = 0;         // p
  std::map<RegisterSetId, std::uint64_t> head_shift;  // sets with s > 0
  std::map<RegisterSetId, std::uint64_t> window_low;  // lowest head visited during the period, per moving set
};

namespace detail {

inline std::vector<RegisterSetId> sets_in(const std::vector<Configuration>& h, std::size_t from, std::size_t to) {
  std::vector<RegisterSetId> out;
  for (std::size_t i = from; i <= to; ++i)
    for (const auto& [r, reg] : h[i].registers) out.push_back(r);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline const Register& reg_of(const Configuration& c, const RegisterSetId& r) {
  static const Register empty;
  auto it = c.registers.find(r);
  return it == c.registers.end() ? empty : it->second;
}

/// Checks whether h[q+p] (the run's position `end`) repeats h[q].
inline LimitCertificate certify(const std::vector<Configuration>& h, std::size_t q, std::size_t end,
                                std::uint64_t n) {
  LimitCertificate none;
  const std::size_t p = end - q;
  if (p == 0 || h[q].state != h[end].state) return none;
  LimitCertificate cert{CertificateKind::ExactCycle, q, p, {}, {}};
  for (const auto& r : sets_in(h, q, end)) {
    const Register& a = reg_of(h[q], r);
    const Register& b = reg_of(h[end], r);
    if (b.head < a.head) return none;
    const std::uint64_t s = b.head - a.head;
    if (s == 0) {
      if (a != b) return none;
      continue;
    }
    std::uint64_t lo = a.head, hi = a.head;
    for (std::size_t i = q; i < end; ++i) {
      const std::uint64_t x = reg_of(h[i], r).head;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    // Position 0 and the limit position N behave differently from their
    // translates (left is a no-op there), so the window must avoid both.
    if (lo == 0 || hi >= n) return none;
    auto ai = a.ones.lower_bound(lo);
    auto bi = b.ones.lower_bound(lo + s);
    for (; ai != a.ones.end() && bi != b.ones.end(); ++ai, ++bi)
      if (*ai + s != *bi) return none;
    if (ai != a.ones.end() || bi != b.ones.end()) return none;
    cert.kind = CertificateKind::TranslationalCycle;
    cert.head_shift[r] = s;
    cert.window_low[r] = lo;
  }
  return cert;
}

/// Hash of what a cycle must preserve: the state and, per set, the 1-cells at
/// or ahead of the head relative to the head.
inline std::size_t signature(const Configuration& c) {
  std::size_t h = std::hash<Ordinal>{}(c.state);
  auto mix = [&](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  for (const auto& [r, reg] : c.registers) {
    if (reg.ones.empty() && reg.head == 0) continue;
    mix(static_cast<std::size_t>(r.kind) * 1315423911U + r.index);
    for (auto it = reg.ones.lower_bound(reg.head); it != reg.ones.end(); ++it) mix(*it - reg.head);
    mix(0xabcdef);
  }
  return h;
}

}  // namespace detail

/// Looks for the shortest cycle ending at the last configuration of `window`
/// (consecutive configurations of one run segment).
inline LimitCertificate detect_cycle(const std::vector<Configuration>& window, std::uint64_t n) {
  if (window.size() < 2) return {};
  const std::size_t end = window.size() - 1;
  for (std::size_t q = end; q-- > 0;) {
    auto cert = detail::certify(window, q, end, n);
    if (cert.kind != CertificateKind::Undetermined) return cert;
  }
  return {};
}

struct LimitResult {
  Configuration config;
  std::vector<RegisterSetId> clamped;  // heads sent to the limit position
};

/// Lim-sup configuration at `lambda` for a run whose segment `window` ends in
/// the certified cycle.
inline LimitResult apply_limit(const LimitCertificate& cert, const std::vector<Configuration>& window,
                               const Ordinal& lambda, std::uint64_t n) {
  if (cert.kind == CertificateKind::Undetermined) throw DomainError("no limit certificate");
  if (!lambda.is_limit()) throw DomainError("limit stage must be a limit ordinal, got " + lambda.to_string());
  const std::size_t q = cert.prefix_length;
  const std::size_t end = q + cert.period;
  if (end >= window.size()) throw DomainError("certificate does not fit the history window");

  LimitResult out;
  Configuration& c = out.config;
  c.clock = lambda;
  c.state = window[q].state;
  for (std::size_t i = q; i < end; ++i) c.state = std::max(c.state, window[i].state);

  for (const auto& r : detail::sets_in(window, q, end)) {
    Register limit;
    auto shift = cert.head_shift.find(r);
    if (shift == cert.head_shift.end()) {
      for (std::size_t i = q; i < end; ++i) {
        const Register& reg = detail::reg_of(window[i], r);
        limit.head = std::max(limit.head, reg.head);
        limit.ones.insert(reg.ones.begin(), reg.ones.end());
      }
    } else {
      const std::uint64_t s = shift->second;
      const std::uint64_t lo = cert.window_low.at(r);
      const Register& last = detail::reg_of(window[end], r);
      for (std::uint64_t x : last.ones)
        if (x < lo) limit.ones.insert(x);
      for (std::uint64_t x = lo; x < n; ++x)
        if (last.ones.count(lo + (x - lo) % s)) limit.ones.insert(x);
      limit.head = n;
      out.clamped.push_back(r);
    }
    if (limit.head != 0 || !limit.ones.empty()) c.registers[r] = std::move(limit);
  }
  return out;
}

struct RunOptions {
  std::uint64_t budget = 1'000'000;  // concrete steps allowed per segment between limits
  bool limits = true;
  bool trace = false;
  StepOptions step;
  std::size_t max_candidates = 256;  // earlier configurations verified per hash hit
};

struct LimitEvent {
  Ordinal lambda;
  LimitCertificate certificate;
  std::vector<RegisterSetId> clamped;
};

struct RunResult {
  enum class Outcome { Halted, Undetermined };
  Outcome outcome = Outcome::Halted;
  HaltReason reason = HaltReason::NoInstruction;
  Configuration config;
  std::uint64_t steps = 0;  // concrete steps executed, all segments
  std::vector<LimitEvent> limits;
  std::vector<std::string> trace;

  bool halted() const { return outcome == Outcome::Halted; }
  bool flag() const { return config.cell(RegisterSetId::working(0), 0); }
};

namespace detail {

inline std::string trace_line(const Ordinal& clock, const Ordinal& state, const StepEffect* e, const char* event,
                              bool clamped = false) {
  std::ostringstream out;
  out << "clock=" << clock << " state=" << state;
  if (e) {
    out << " set=" << e->set.to_string() << " head=" << e->head << " wrote=";
    if (e->wrote) out << e->head << ':' << (*e->wrote ? 1 : 0);
    else out << '-';
  } else {
    out << " set=- head=- wrote=-";
  }
  out << " event=" << event;
  if (clamped) out << " note=clamped";
  return out.str();
}

/// Segment history with hashed lookup of candidate cycle starts.
class CycleWindow {
 public:
  explicit CycleWindow(std::size_t max_candidates) : max_candidates_(max_candidates) {}

  void clear() {
    history_.clear();
    buckets_.clear();
  }

  const std::vector<Configuration>& history() const { return history_; }

  LimitCertificate push(const Configuration& c, std::uint64_t n) {
    history_.push_back(c);
    const std::size_t end = history_.size() - 1;
    auto& bucket = buckets_[signature(c)];
    LimitCertificate found;
    std::size_t checked = 0;
    for (auto it = bucket.rbegin(); it != bucket.rend() && checked < max_candidates_; ++it, ++checked) {
      found = certify(history_, *it, end, n);
      if (found.kind != CertificateKind::Undetermined) break;
    }
    bucket.push_back(end);
    return found;
  }

 private:
  std::size_t max_candidates_;
  std::vector<Configuration> history_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> buckets_;
};

}  // namespace detail

/// Runs from `start` until halt, the clock cap, or budget exhaustion.
/// Faults propagate as MachineFault.
inline RunResult run_from(const Machine& m, Configuration start, const RunOptions& opt = {}) {
  const std::uint64_t n = m.registers();
  const Ordinal& cap = m.spec().cap;
  RunResult res;
  res.config = std::move(start);
  Configuration& c = res.config;
  detail::CycleWindow window(opt.max_candidates);
  const bool detect = opt.limits;
  if (detect) window.push(c, n);
  std::uint64_t segment_steps = 0;
  std::vector<StepEffect> effects;
  std::vector<StepEffect>* fx = opt.trace ? &effects : nullptr;

  auto record_step = [&](const Ordinal& clock, const Ordinal& state, const char* event) {
    if (!opt.trace) return;
    if (effects.empty()) res.trace.push_back(detail::trace_line(clock, state, nullptr, event));
    for (const auto& e : effects) res.trace.push_back(detail::trace_line(clock, state, &e, event));
    effects.clear();
  };

  while (true) {
    if (c.clock == cap) {
      // Completion flag, then one last dispatch round without advancing the clock.
      c.set_cell(RegisterSetId::working(0), 0, true);
      const Ordinal clock = c.clock;
      detail::fire(c, m, opt.step, fx);
      record_step(clock, c.state, "halt");
      res.reason = HaltReason::ClockCap;
      return res;
    }
    const Ordinal clock = c.clock;
    if (!detail::fire(c, m, opt.step, fx)) {
      res.reason = no_match_reason(c, m);
      if (opt.trace) res.trace.push_back(detail::trace_line(c.clock, c.state, nullptr, "halt"));
      return res;
    }
    c.clock = ord_add(c.clock, 1);
    ++res.steps;
    ++segment_steps;
    record_step(clock, c.state, "step");

    if (detect) {
      const LimitCertificate cert = window.push(c, n);
      if (cert.kind != CertificateKind::Undetermined) {
        const Ordinal lambda = nextlim(c.clock);
        if (lambda <= cap) {
          auto lim = apply_limit(cert, window.history(), lambda, n);
          res.limits.push_back({lambda, cert, lim.clamped});
          c = std::move(lim.config);
          if (opt.trace) {
            res.trace.push_back(detail::trace_line(c.clock, c.state, nullptr, "limit", !lim.clamped.empty()));
          }
          window.clear();
          window.push(c, n);
          segment_steps = 0;
          continue;
        }
        if (cert.kind == CertificateKind::ExactCycle) {
          // Finite cap inside this block: skip whole periods, the configuration repeats.
          const auto [inf, fin] = split_inf_fin(c.clock);
          const auto [cap_inf, cap_fin] = split_inf_fin(cap);
          if (inf == cap_inf && cap_fin > fin) {
            const std::uint64_t skip = (cap_fin - fin) / cert.period * cert.period;
            c.clock = ord_add(inf, fin + skip);
          }
          window.clear();
          window.push(c, n);
        }
      }
    }
    if (segment_steps >= opt.budget) {
      res.outcome = RunResult::Outcome::Undetermined;
      return res;
    }
  }
}

inline RunResult run(const Machine& m, const Inputs& inputs, const RunOptions& opt = {}) {
  return run_from(m, init_configuration(m, inputs), opt);
}

inline RunResult run(const Machine& m, const Bits& input, const RunOptions& opt = {}) {
  return run_from(m, init_configuration(m, input), opt);
}

}  // namespace hvm

#pragma once

// Finite-length information experiments: lossless compressibility of bit
// strings, a binary-search membership decider, membership by interleaved
// enumeration of a set and its complement, and associated sets.
//
// A string s is compressible when s is the length-|s| prefix of u p p p ...
// for some u and nonempty p with |u| + |p| < |s|; the last repetition of p may
// be cut short.

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "hvm/bits.hpp"
#include "hvm/errors.hpp"
#include "hvm/ordinal.hpp"

namespace hvm::info {

struct Decomposition {
  bool compressible = false;
  Bits initial;  // u
  Bits pattern;  // p
};

/// Smallest |u| + |p| over all qualifying splits; ties go to the shorter p.
inline Decomposition min_decomposition(const Bits& s) {
  const std::size_t n = s.size();
  if (n == 0) throw DomainError("min_decomposition needs a nonempty string");
  // Suffixes of s are prefixes of its reverse; a string and its reverse have
  // the same periods, so one prefix-function pass gives every suffix's period.
  Bits r(s.rbegin(), s.rend());
  std::vector<std::size_t> pi(n, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::size_t k = pi[i - 1];
    while (k > 0 && r[i] != r[k]) k = pi[k - 1];
    if (r[i] == r[k]) ++k;
    pi[i] = k;
  }
  Decomposition best;
  std::size_t best_total = n;
  for (std::size_t u = n; u-- > 0;) {  // larger u first: shorter p wins ties
    const std::size_t len = n - u;
    const std::size_t period = len - pi[len - 1];
    if (u + period < best_total) {
      best_total = u + period;
      best.compressible = true;
      best.initial.assign(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(u));
      best.pattern.assign(s.begin() + static_cast<std::ptrdiff_t>(u),
                          s.begin() + static_cast<std::ptrdiff_t>(u + period));
    }
  }
  return best;
}

struct Census {
  std::uint64_t compressible = 0;
  std::uint64_t incompressible = 0;
};

inline constexpr std::uint64_t kMaxCensusLength = 20;

/// Classifies all 2^n strings of length n, sharded across `threads` workers.
inline Census census(std::uint64_t n, unsigned threads = 0) {
  if (n > kMaxCensusLength) throw DomainError("census supports n <= " + std::to_string(kMaxCensusLength));
  if (n == 0) return {0, 1};
  const std::uint64_t total = 1ULL << n;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, total));
  std::vector<std::uint64_t> counts(threads, 0);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::uint64_t lo = total * t / threads, hi = total * (t + 1) / threads;
      for (std::uint64_t v = lo; v < hi; ++v)
        if (min_decomposition(bits_of(v, n)).compressible) ++counts[t];
    });
  }
  for (auto& th : pool) th.join();
  Census c;
  for (auto k : counts) c.compressible += k;
  c.incompressible = total - c.compressible;
  return c;
}

// ---------------------------------------------------------------------------
// Binary search over a 1-based ascending table.

struct SearchResult {
  bool found = false;
  std::uint64_t probes = 0;      // defined members examined
  std::uint64_t iterations = 0;  // loop passes
};

/// Slots 0..2^n: slot 0 unused, members of X ascending from slot 1, -1 after.
inline std::vector<std::int64_t> search_table(const std::set<std::int64_t>& x, std::uint64_t n) {
  const std::uint64_t size = 1ULL << n;
  if (x.size() > size) throw DomainError("set has more than 2^n members");
  std::vector<std::int64_t> table(size + 1, -1);
  std::size_t i = 1;
  for (auto v : x) table[i++] = v;
  return table;
}

/// left = 0, right = 2^n; loop while left <= right on mid = (left + right) / 2.
/// A defined entry steers the search as usual. An undefined entry (-1) is
/// read as lying past every member when mid >= 1 (the unused tail of the
/// table) and before every member at slot 0, which keeps the loop finite.
inline SearchResult binary_search_decide(const std::vector<std::int64_t>& table, std::int64_t x, std::uint64_t n) {
  const std::int64_t size = static_cast<std::int64_t>(1ULL << n);
  if (static_cast<std::int64_t>(table.size()) < size + 1) throw DomainError("search table needs 2^n + 1 slots");
  SearchResult r;
  std::int64_t left = 0, right = size;
  while (left <= right) {
    ++r.iterations;
    const std::int64_t mid = (left + right) / 2;
    const std::int64_t v = table[static_cast<std::size_t>(mid)];
    if (v >= 0) {
      ++r.probes;
      if (v == x) {
        r.found = true;
        return r;
      }
      if (v < x) left = mid + 1;
      else right = mid - 1;
    } else if (mid == 0) {
      left = mid + 1;
    } else {
      right = mid - 1;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Interleaved enumeration.

struct EnumerationPair {
  std::vector<Bits> f;  // enumerates X
  std::vector<Bits> g;  // enumerates the complement
};

inline std::vector<Bits> universe(std::uint64_t n) {
  if (n > kMaxCensusLength) throw DomainError("universe too large");
  std::vector<Bits> out;
  for (std::uint64_t v = 0; v < (1ULL << n); ++v) out.push_back(bits_of(v, n));
  return out;
}

/// X and its complement, each in ascending order.
inline EnumerationPair enumeration_pair(const std::set<Bits>& x, std::uint64_t n) {
  EnumerationPair p;
  for (auto& e : universe(n)) (x.count(e) ? p.f : p.g).push_back(e);
  if (p.f.size() != x.size()) throw DomainError("set contains strings outside the universe");
  return p;
}

inline void check_partition(const EnumerationPair& p, std::uint64_t n) {
  std::set<Bits> seen;
  for (const auto* seq : {&p.f, &p.g})
    for (const auto& e : *seq) {
      if (e.size() != n) throw DomainError("enumeration entry " + to_string(e) + " is not an n-bit string");
      if (!seen.insert(e).second) throw DomainError("enumeration lists " + to_string(e) + " twice");
    }
  if (seen.size() != (1ULL << n)) throw DomainError("enumerations do not cover the universe");
}

struct Decision {
  bool member = false;
  std::uint64_t steps = 0;
};

/// Walks h(a) = f(i) or g(i) with (source, i) = interleave_index(a) until x
/// appears. Slots past the end of the shorter sequence are empty but counted.
inline Decision interleave_decide(const EnumerationPair& p, const Bits& x) {
  const std::uint64_t n = x.size();
  check_partition(p, n);
  const std::uint64_t limit = 2 * std::max(p.f.size(), p.g.size());
  for (std::uint64_t a = 0; a < limit; ++a) {
    const auto [source, index] = interleave_index(Ordinal(a));
    const auto& seq = source == Source::F ? p.f : p.g;
    const std::uint64_t i = *index.to_natural();
    if (i < seq.size() && seq[i] == x) return {source == Source::F, a + 1};
  }
  throw DomainError("x = " + to_string(x) + " is outside the universe");
}

// ---------------------------------------------------------------------------
// Associated sets: every universe element with its membership bit appended.

struct AssociatedSet {
  std::uint64_t n = 0;
  std::vector<Bits> entries;  // universe order
};

inline AssociatedSet associated_set(const std::set<Bits>& x, std::uint64_t n) {
  AssociatedSet a;
  a.n = n;
  std::size_t hits = 0;
  for (auto e : universe(n)) {
    const bool in = x.count(e) > 0;
    hits += in;
    e.push_back(in);
    a.entries.push_back(std::move(e));
  }
  if (hits != x.size()) throw DomainError("set contains strings outside the universe");
  return a;
}

struct AssocDecision {
  bool member = false;
  std::uint64_t bits_read = 0;
};

/// Finds x's entry by its first n bits and reads the appended bit.
inline AssocDecision assoc_decide(const AssociatedSet& a, const Bits& x) {
  if (x.size() != a.n) throw DomainError("x = " + to_string(x) + " is outside the universe");
  const Bits& entry = a.entries.at(value_of(x));
  AssocDecision d;
  for (std::uint64_t i = 0; i < a.n; ++i, ++d.bits_read)
    if (entry[i] != x[i]) throw DomainError("associated set is out of universe order");
  d.member = entry[a.n];
  ++d.bits_read;
  return d;
}

}  // namespace hvm::info

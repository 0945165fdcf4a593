#include <gtest/gtest.h>

#include <set>

#include "hvm/infotheory.hpp"

using namespace hvm;
using namespace hvm::info;

namespace {

// Tries every (|u|, |p|) pair directly against the prefix-of-u.p.p... rule.
std::optional<std::pair<std::size_t, std::size_t>> brute_force(const Bits& s) {
  const std::size_t n = s.size();
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t total = 1; total < n && !best; ++total)
    for (std::size_t p = 1; p <= total && !best; ++p) {
      const std::size_t u = total - p;
      bool ok = true;
      for (std::size_t i = u; i < n && ok; ++i) ok = s[i] == s[u + (i - u) % p];
      if (ok) best = std::make_pair(u, p);
    }
  return best;
}

std::set<Bits> set_of(std::initializer_list<const char*> xs) {
  std::set<Bits> out;
  for (auto x : xs) out.insert(parse_bits(x));
  return out;
}

}  // namespace

TEST(Compress, Examples) {
  auto d = min_decomposition(parse_bits("010101"));
  ASSERT_TRUE(d.compressible);
  EXPECT_EQ(to_string(d.initial), "");
  EXPECT_EQ(to_string(d.pattern), "01");
  EXPECT_FALSE(min_decomposition(parse_bits("0")).compressible);
  auto e = min_decomposition(parse_bits("1101010"));
  auto oracle = brute_force(parse_bits("1101010"));
  ASSERT_TRUE(oracle);
  EXPECT_EQ(e.initial.size() + e.pattern.size(), oracle->first + oracle->second);
  EXPECT_EQ(to_string(e.initial), "1");
  EXPECT_EQ(to_string(e.pattern), "10");
  EXPECT_THROW(min_decomposition(Bits{}), DomainError);
}

TEST(Compress, AgreesWithBruteForceUpToLength14) {
  for (std::size_t n = 1; n <= 14; ++n)
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
      const Bits s = bits_of(v, n);
      const auto d = min_decomposition(s);
      const auto o = brute_force(s);
      ASSERT_EQ(d.compressible, o.has_value()) << to_string(s);
      if (!o) continue;
      // Brute force scans totals upward and, within a total, shorter p first.
      ASSERT_EQ(d.initial.size(), o->first) << to_string(s);
      ASSERT_EQ(d.pattern.size(), o->second) << to_string(s);
    }
}

TEST(Compress, ComplementSymmetry) {
  for (std::size_t n = 1; n <= 12; ++n)
    for (std::uint64_t v = 0; v < (1ULL << n); ++v) {
      Bits s = bits_of(v, n), c = s;
      c.flip();
      EXPECT_EQ(min_decomposition(s).compressible, min_decomposition(c).compressible);
    }
}

TEST(Census, SmallCases) {
  auto one = census(1);
  EXPECT_EQ(one.compressible, 0u);
  EXPECT_EQ(one.incompressible, 2u);
  std::uint64_t comp = 0;
  for (const char* s : {"00", "01", "10", "11"}) comp += brute_force(parse_bits(s)).has_value();
  EXPECT_EQ(census(2).compressible, comp);
  EXPECT_THROW(census(21), DomainError);
}

TEST(Census, ShardingDoesNotChangeCounts) {
  auto a = census(12, 1), b = census(12, 7);
  EXPECT_EQ(a.compressible, b.compressible);
  EXPECT_EQ(a.compressible + a.incompressible, 4096u);
}

TEST(BinarySearch, Examples) {
  const std::set<std::int64_t> odd{1, 3, 5, 7, 9, 11, 13, 15};
  auto table = search_table(odd, 3);
  auto hit = binary_search_decide(table, 9, 3);
  EXPECT_TRUE(hit.found);
  EXPECT_LE(hit.probes, 4u);
  auto miss = binary_search_decide(table, 4, 3);
  EXPECT_FALSE(miss.found);
  EXPECT_LE(miss.probes, 4u);
  auto empty = binary_search_decide(search_table({}, 3), 2, 3);
  EXPECT_FALSE(empty.found);
  EXPECT_EQ(empty.probes, 0u);
  EXPECT_FALSE(binary_search_decide(table, 99, 3).found);
}

TEST(BinarySearch, ExhaustiveUpToFourBits) {
  for (std::uint64_t n = 1; n <= 4; ++n) {
    const std::uint64_t size = 1ULL << n;
    for (std::uint64_t mask = 0; mask < (1ULL << size); ++mask) {
      std::set<std::int64_t> x;
      for (std::uint64_t i = 0; i < size; ++i)
        if (mask >> i & 1) x.insert(static_cast<std::int64_t>(i));
      const auto table = search_table(x, n);
      for (std::int64_t q = 0; q < static_cast<std::int64_t>(size); ++q) {
        const auto r = binary_search_decide(table, q, n);
        ASSERT_EQ(r.found, x.count(q) > 0);
        ASSERT_LE(r.probes, n + 1);
        ASSERT_LE(r.iterations, n + 1);
      }
    }
  }
}

TEST(Interleave, Examples) {
  EnumerationPair p = enumeration_pair(set_of({"00"}), 2);
  auto d = interleave_decide(p, parse_bits("00"));
  EXPECT_TRUE(d.member);
  EXPECT_EQ(d.steps, 1u);
  p.g = {parse_bits("11"), parse_bits("01"), parse_bits("10")};
  auto e = interleave_decide(p, parse_bits("11"));
  EXPECT_FALSE(e.member);
  EXPECT_EQ(e.steps, 2u);
  EXPECT_THROW(interleave_decide(p, parse_bits("111")), DomainError);
  p.g.pop_back();
  EXPECT_THROW(interleave_decide(p, parse_bits("11")), DomainError);
}

TEST(Interleave, ExhaustiveAgreementAndStepBound) {
  for (std::uint64_t n = 1; n <= 3; ++n) {
    const auto all = universe(n);
    for (std::uint64_t mask = 0; mask < (1ULL << all.size()); ++mask) {
      std::set<Bits> x;
      for (std::size_t i = 0; i < all.size(); ++i)
        if (mask >> i & 1) x.insert(all[i]);
      const auto p = enumeration_pair(x, n);
      for (const auto& e : all) {
        const auto d = interleave_decide(p, e);
        ASSERT_EQ(d.member, x.count(e) > 0);
        ASSERT_LE(d.steps, 1ULL << (n + 1));
      }
    }
  }
}

TEST(Associated, Examples) {
  auto a = associated_set(set_of({"01"}), 2);
  std::set<std::string> entries;
  for (const auto& e : a.entries) entries.insert(to_string(e));
  EXPECT_EQ(entries, (std::set<std::string>{"000", "011", "100", "110"}));
  auto d = assoc_decide(a, parse_bits("01"));
  EXPECT_TRUE(d.member);
  EXPECT_EQ(d.bits_read, 3u);
  auto none = associated_set({}, 2);
  for (const auto& e : universe(2)) {
    auto r = assoc_decide(none, e);
    EXPECT_FALSE(r.member);
    EXPECT_EQ(r.bits_read, 3u);
  }
  EXPECT_THROW(assoc_decide(a, parse_bits("0")), DomainError);
  EXPECT_THROW(associated_set(set_of({"011"}), 2), DomainError);
}

TEST(Associated, AgreesWithMembership) {
  const auto all = universe(3);
  for (std::uint64_t mask = 0; mask < 256; ++mask) {
    std::set<Bits> x;
    for (std::size_t i = 0; i < 8; ++i)
      if (mask >> i & 1) x.insert(all[i]);
    const auto a = associated_set(x, 3);
    for (const auto& e : all) {
      const auto d = assoc_decide(a, e);
      ASSERT_EQ(d.member, x.count(e) > 0);
      ASSERT_EQ(d.bits_read, 4u);
    }
  }
}

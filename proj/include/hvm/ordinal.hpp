#pragma once

// Ordinals below w^w in Cantor normal form.
//
// An ordinal is a strictly decreasing sequence of terms w^e * c with natural
// exponents e and coefficients c >= 1; the empty sequence is 0. Textual form:
// `w^2*3+w+4`, whitespace-insensitive, `w` standing for omega.

#include <compare>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hvm/errors.hpp"

namespace hvm {

class Ordinal {
 public:
  struct Term {
    std::uint64_t exponent = 0;
    std::uint64_t coefficient = 1;
    friend bool operator==(const Term&, const Term&) = default;
  };

  Ordinal() = default;
  Ordinal(std::uint64_t n) {  // NOLINT(google-explicit-constructor): naturals are ordinals
    if (n != 0) terms_.push_back({0, n});
  }

  static Ordinal omega() { return omega_power(1); }
  static Ordinal omega_power(std::uint64_t e, std::uint64_t c = 1) {
    Ordinal o;
    if (c != 0) o.terms_.push_back({e, c});
    return o;
  }

  /// Builds from terms, validating the normal form.
  static Ordinal from_terms(std::vector<Term> terms) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].coefficient == 0) throw DomainError("ordinal term with zero coefficient");
      if (i > 0 && terms[i].exponent >= terms[i - 1].exponent)
        throw DomainError("ordinal exponents must strictly decrease");
    }
    Ordinal o;
    o.terms_ = std::move(terms);
    return o;
  }

  const std::vector<Term>& terms() const noexcept { return terms_; }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_finite() const noexcept { return terms_.empty() || (terms_.size() == 1 && terms_[0].exponent == 0); }
  bool is_limit() const noexcept { return !terms_.empty() && terms_.back().exponent != 0; }
  bool is_successor() const noexcept { return !terms_.empty() && terms_.back().exponent == 0; }

  /// Finite tail (coefficient of w^0).
  std::uint64_t finite_part() const noexcept {
    return is_successor() ? terms_.back().coefficient : 0;
  }

  /// Limit part: the ordinal with its finite tail removed (0 for naturals).
  Ordinal infinite_part() const {
    Ordinal o = *this;
    if (o.is_successor()) o.terms_.pop_back();
    return o;
  }

  std::optional<std::uint64_t> to_natural() const noexcept {
    if (!is_finite()) return std::nullopt;
    return finite_part();
  }

  std::uint64_t leading_exponent() const noexcept { return terms_.empty() ? 0 : terms_.front().exponent; }

  friend bool operator==(const Ordinal&, const Ordinal&) = default;

  friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b) noexcept {
    const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
    for (std::size_t i = 0; i < n; ++i) {
      const Term& x = a.terms_[i];
      const Term& y = b.terms_[i];
      if (x.exponent != y.exponent) return x.exponent <=> y.exponent;
      if (x.coefficient != y.coefficient) return x.coefficient <=> y.coefficient;
    }
    return a.terms_.size() <=> b.terms_.size();
  }

  std::string to_string() const;
  static Ordinal parse(std::string_view text,
                       std::uint64_t max_exponent = std::numeric_limits<std::uint64_t>::max());

 private:
  std::vector<Term> terms_;
};

namespace detail {

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw DomainError("ordinal coefficient overflow");
  return a + b;
}

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a)
    throw DomainError("ordinal coefficient overflow");
  return a * b;
}

}  // namespace detail

inline Ordinal ord_add(const Ordinal& a, const Ordinal& b) {
  if (b.is_zero()) return a;
  const auto& bt = b.terms();
  const std::uint64_t lead = bt.front().exponent;
  std::vector<Ordinal::Term> out;
  out.reserve(a.terms().size() + bt.size());
  for (const auto& t : a.terms()) {
    if (t.exponent > lead) {
      out.push_back(t);
    } else {
      if (t.exponent == lead) {
        out.push_back({lead, detail::checked_add(t.coefficient, bt.front().coefficient)});
        out.insert(out.end(), bt.begin() + 1, bt.end());
        return Ordinal::from_terms(std::move(out));
      }
      break;
    }
  }
  out.insert(out.end(), bt.begin(), bt.end());
  return Ordinal::from_terms(std::move(out));
}

/// a * b term by term: each w^f*c of b with f >= 1 contributes w^(lead+f)*c,
/// and a finite tail c scales a's leading coefficient. The pieces come out in
/// strictly decreasing exponent order, so they concatenate without carries.
inline Ordinal ord_mul(const Ordinal& a, const Ordinal& b) {
  if (a.is_zero() || b.is_zero()) return Ordinal{};
  const auto& at = a.terms();
  const std::uint64_t lead = at.front().exponent;
  std::vector<Ordinal::Term> out;
  out.reserve(b.terms().size() + at.size());
  for (const auto& t : b.terms()) {
    if (t.exponent > 0) {
      out.push_back({detail::checked_add(lead, t.exponent), t.coefficient});
    } else {
      out.push_back({lead, detail::checked_mul(at.front().coefficient, t.coefficient)});
      out.insert(out.end(), at.begin() + 1, at.end());
    }
  }
  return Ordinal::from_terms(std::move(out));
}

inline std::strong_ordering ord_cmp(const Ordinal& a, const Ordinal& b) noexcept { return a <=> b; }

/// Largest limit ordinal <= a, with 0 as the floor below w.
inline Ordinal prevlim(const Ordinal& a) { return a.infinite_part(); }

/// Smallest limit ordinal strictly greater than a.
inline Ordinal nextlim(const Ordinal& a) { return ord_add(a.infinite_part(), Ordinal::omega()); }

inline std::pair<Ordinal, std::uint64_t> split_inf_fin(const Ordinal& a) {
  return {a.infinite_part(), a.finite_part()};
}

/// Which enumeration an interleaved position draws from.
enum class Source { F, G };

/// Interleaved enumeration map: even finite part -> f at inf + fin/2,
/// odd finite part -> g at inf + (fin-1)/2.
inline std::pair<Source, Ordinal> interleave_index(const Ordinal& a) {
  auto [inf, fin] = split_inf_fin(a);
  if (fin % 2 == 0) return {Source::F, ord_add(inf, Ordinal(fin / 2))};
  return {Source::G, ord_add(inf, Ordinal((fin - 1) / 2))};
}

inline std::string Ordinal::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    if (!out.empty()) out += '+';
    if (t.exponent == 0) {
      out += std::to_string(t.coefficient);
      continue;
    }
    out += 'w';
    if (t.exponent != 1) out += '^' + std::to_string(t.exponent);
    if (t.coefficient != 1) out += '*' + std::to_string(t.coefficient);
  }
  return out;
}

inline Ordinal Ordinal::parse(std::string_view text, std::uint64_t max_exponent) {
  std::string s;
  std::vector<std::size_t> column;  // original column of each kept char
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != ' ' && text[i] != '\t') {
      s += text[i];
      column.push_back(i + 1);
    }
  }
  std::size_t pos = 0;
  auto col = [&] { return pos < column.size() ? column[pos] : text.size() + 1; };
  auto fail = [&](const std::string& what) -> Ordinal { throw ParseError(1, col(), what + " in ordinal '" + std::string(text) + "'"); };
  auto number = [&]() -> std::uint64_t {
    if (pos >= s.size() || s[pos] < '0' || s[pos] > '9') fail("expected a number");
    std::uint64_t v = 0;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') {
      const std::uint64_t digit = static_cast<std::uint64_t>(s[pos] - '0');
      if (v > (std::numeric_limits<std::uint64_t>::max() - digit) / 10) fail("number too large");
      v = v * 10 + digit;
      ++pos;
    }
    return v;
  };

  if (s.empty()) fail("empty ordinal");
  Ordinal result;
  while (true) {
    Ordinal term;
    if (s[pos] == 'w') {
      ++pos;
      std::uint64_t exponent = 1;
      if (pos < s.size() && s[pos] == '^') {
        ++pos;
        if (pos < s.size() && s[pos] == 'w') fail("exponent beyond the supported cap w^w");
        exponent = number();
      }
      if (exponent > max_exponent) fail("exponent beyond the configured cap");
      std::uint64_t coefficient = 1;
      if (pos < s.size() && s[pos] == '*') {
        ++pos;
        coefficient = number();
      }
      term = exponent == 0 ? Ordinal(coefficient) : Ordinal::omega_power(exponent, coefficient);
    } else {
      term = Ordinal(number());
    }
    result = ord_add(result, term);
    if (pos == s.size()) break;
    if (s[pos] != '+') fail("unexpected character '" + std::string(1, s[pos]) + "'");
    ++pos;
    if (pos == s.size()) fail("dangling '+'");
  }
  return result;
}

inline std::ostream& operator<<(std::ostream& os, const Ordinal& o) { return os << o.to_string(); }

}  // namespace hvm

template <>
struct std::hash<hvm::Ordinal> {
  std::size_t operator()(const hvm::Ordinal& o) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ULL;
    for (const auto& t : o.terms()) {
      h ^= std::hash<std::uint64_t>{}(t.exponent) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h ^= std::hash<std::uint64_t>{}(t.coefficient) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  }
};

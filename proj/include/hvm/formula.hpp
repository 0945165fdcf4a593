#pragma once

// First-order formulas over the domain of n-bit strings: syntax tree, text
// parser, direct evaluation by enumeration, and a seeded random generator.
//
//   X = {00, 11}
//   R = {(00,01), (11,10)}
//   forall x. exists y. (y = flip(x)) & (x in X)
//
// Terms are variables, bit-string constants and flip(t) (bitwise complement).
// Atoms are t = t, t != t, t in X and P(t, ...). Connectives, loosest first:
// <->, -> (right associative), |, &, then ~ / ! / not. A quantifier body
// extends as far right as possible.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hvm/bits.hpp"
#include "hvm/errors.hpp"

namespace hvm::logic {

struct Term {
  enum class Kind { Var, Const };
  Kind kind = Kind::Var;
  std::string text;  // variable name or bit string
  bool flipped = false;

  static Term var(std::string name, bool flip = false) { return {Kind::Var, std::move(name), flip}; }
  static Term constant(std::string bits, bool flip = false) { return {Kind::Const, std::move(bits), flip}; }
  friend bool operator==(const Term&, const Term&) = default;

  std::string to_string() const { return flipped ? "flip(" + text + ")" : text; }
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  enum class Kind { Equal, Member, Predicate, Not, And, Or, Implies, Iff, ForAll, Exists };
  Kind kind = Kind::Equal;
  std::string name;        // set or predicate name, or the bound variable
  std::vector<Term> args;  // atom arguments
  FormulaPtr lhs;          // operand, or quantifier body
  FormulaPtr rhs;

  bool is_atom() const { return kind == Kind::Equal || kind == Kind::Member || kind == Kind::Predicate; }
  bool is_quantifier() const { return kind == Kind::ForAll || kind == Kind::Exists; }
};

inline FormulaPtr make(Formula f) { return std::make_shared<const Formula>(std::move(f)); }
inline FormulaPtr equal(Term a, Term b) { return make({Formula::Kind::Equal, "", {std::move(a), std::move(b)}, {}, {}}); }
inline FormulaPtr member(Term t, std::string set) {
  return make({Formula::Kind::Member, std::move(set), {std::move(t)}, {}, {}});
}
inline FormulaPtr predicate(std::string name, std::vector<Term> args) {
  return make({Formula::Kind::Predicate, std::move(name), std::move(args), {}, {}});
}
inline FormulaPtr negate(FormulaPtr f) { return make({Formula::Kind::Not, "", {}, std::move(f), {}}); }
inline FormulaPtr both(FormulaPtr a, FormulaPtr b) { return make({Formula::Kind::And, "", {}, std::move(a), std::move(b)}); }
inline FormulaPtr either(FormulaPtr a, FormulaPtr b) { return make({Formula::Kind::Or, "", {}, std::move(a), std::move(b)}); }
inline FormulaPtr implies(FormulaPtr a, FormulaPtr b) {
  return make({Formula::Kind::Implies, "", {}, std::move(a), std::move(b)});
}
inline FormulaPtr iff(FormulaPtr a, FormulaPtr b) { return make({Formula::Kind::Iff, "", {}, std::move(a), std::move(b)}); }
inline FormulaPtr forall(std::string v, FormulaPtr body) {
  return make({Formula::Kind::ForAll, std::move(v), {}, std::move(body), {}});
}
inline FormulaPtr exists(std::string v, FormulaPtr body) {
  return make({Formula::Kind::Exists, std::move(v), {}, std::move(body), {}});
}

/// A named relation given by its tuples. arity 0 means "not yet known" (an
/// empty definition); it is then false for every use.
struct Relation {
  std::size_t arity = 0;
  std::set<std::vector<std::string>> tuples;
};

using Environment = std::map<std::string, Relation>;

struct DomainSpec {
  std::uint64_t n = 1;
};

struct FormulaText {
  FormulaPtr formula;
  Environment env;
};

inline constexpr std::uint64_t kMaxEncodeWidth = 16;

/// Every n-bit string in increasing order, each followed by a marker cell set to 1.
inline Bits encode_domain(const DomainSpec& d) {
  if (d.n > kMaxEncodeWidth) throw DomainError("domain width " + std::to_string(d.n) + " exceeds the register budget");
  Bits out;
  const std::uint64_t size = 1ULL << d.n;
  out.reserve(size * (d.n + 1));
  for (std::uint64_t e = 0; e < size; ++e) {
    const Bits b = bits_of(e, d.n);
    out.insert(out.end(), b.begin(), b.end());
    out.push_back(true);
  }
  return out;
}

inline std::uint64_t element_value(std::string_view bits, std::uint64_t n) {
  if (bits.size() != n)
    throw DomainError("constant '" + std::string(bits) + "' has " + std::to_string(bits.size()) + " bits, domain has " +
                      std::to_string(n));
  return value_of(parse_bits(bits));
}

/// Truth table of a relation over the n-bit domain, first argument most significant.
inline std::vector<bool> truth_table(const Relation& r, std::size_t arity, std::uint64_t n) {
  if (r.arity != 0 && r.arity != arity)
    throw DomainError("relation of arity " + std::to_string(r.arity) + " used with " + std::to_string(arity) +
                      " arguments");
  if (n * arity > 24) throw DomainError("truth table too large");
  std::vector<bool> table(std::size_t{1} << (n * arity), false);
  for (const auto& t : r.tuples) {
    std::uint64_t idx = 0;
    for (const auto& e : t) idx = (idx << n) | element_value(e, n);
    table[idx] = true;
  }
  return table;
}

// ---------------------------------------------------------------------------
// Text form.

inline std::string to_string(const Formula& f);

inline std::string to_string(const FormulaPtr& f) { return to_string(*f); }

inline std::string to_string(const Formula& f) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Equal: return f.args[0].to_string() + " = " + f.args[1].to_string();
    case K::Member: return f.args[0].to_string() + " in " + f.name;
    case K::Predicate: {
      std::string s = f.name + "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) s += (i ? ", " : "") + f.args[i].to_string();
      return s + ")";
    }
    case K::Not: return "~(" + to_string(f.lhs) + ")";
    case K::And: return "(" + to_string(f.lhs) + ") & (" + to_string(f.rhs) + ")";
    case K::Or: return "(" + to_string(f.lhs) + ") | (" + to_string(f.rhs) + ")";
    case K::Implies: return "(" + to_string(f.lhs) + ") -> (" + to_string(f.rhs) + ")";
    case K::Iff: return "(" + to_string(f.lhs) + ") <-> (" + to_string(f.rhs) + ")";
    case K::ForAll: return "forall " + f.name + ". " + to_string(f.lhs);
    case K::Exists: return "exists " + f.name + ". " + to_string(f.lhs);
  }
  return "?";
}

inline std::string to_string(const Environment& env) {
  std::string out;
  for (const auto& [name, r] : env) {
    out += name + " = {";
    bool first = true;
    for (const auto& t : r.tuples) {
      out += first ? "" : ", ";
      first = false;
      if (t.size() == 1) {
        out += t[0];
      } else {
        out += "(";
        for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + t[i];
        out += ")";
      }
    }
    out += "}\n";
  }
  return out;
}

namespace formula_detail {

struct Token {
  enum class Kind { Ident, Bits, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline std::vector<Token> lex(std::string_view src, std::size_t line, std::size_t column) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto col = [&] { return column + i; };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      column = 1 - (i + 1);
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    Token t;
    t.line = line;
    t.column = col();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else if (c == '0' || c == '1') {
      std::size_t j = i;
      while (j < src.size() && (src[j] == '0' || src[j] == '1')) ++j;
      t.kind = Token::Kind::Bits;
      t.text = std::string(src.substr(i, j - i));
      i = j;
    } else {
      t.kind = Token::Kind::Punct;
      for (std::string_view p : {"<->", "->", "!=", "(", ")", ",", ".", "=", "~", "!", "&", "|", "{", "}"}) {
        if (src.substr(i, p.size()) == p) {
          t.text = std::string(p);
          break;
        }
      }
      if (t.text.empty()) throw ParseError(t.line, t.column, std::string("unexpected character '") + c + "'");
      i += t.text.size();
    }
    out.push_back(std::move(t));
  }
  Token end;  // just past the last token
  end.line = out.empty() ? line : out.back().line;
  end.column = out.empty() ? col() : out.back().column + out.back().text.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  FormulaPtr formula() { return parse_iff(); }

  void expect_end() {
    if (peek().kind != Token::Kind::End) fail("unexpected '" + peek().text + "' after formula");
  }

  // `{a, b}` or `{(a,b), (c,d)}`
  Relation relation() {
    expect("{");
    Relation r;
    if (accept("}")) return r;
    do {
      std::vector<std::string> tuple;
      if (accept("(")) {
        do tuple.push_back(bits());
        while (accept(","));
        expect(")");
      } else {
        tuple.push_back(bits());
      }
      if (r.arity != 0 && tuple.size() != r.arity) fail("tuples of one relation must have the same length");
      r.arity = tuple.size();
      r.tuples.insert(std::move(tuple));
    } while (accept(","));
    expect("}");
    return r;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek() const { return toks_[pos_]; }
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(peek().line, peek().column, msg); }

  bool is(std::string_view p) const {
    return (peek().kind == Token::Kind::Punct || peek().kind == Token::Kind::Ident) && peek().text == p;
  }
  bool accept(std::string_view p) {
    if (!is(p)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident) fail("expected a name");
    return toks_[pos_++].text;
  }
  std::string bits() {
    if (peek().kind != Token::Kind::Bits) fail("expected a bit string");
    return toks_[pos_++].text;
  }

  FormulaPtr parse_iff() {
    FormulaPtr f = parse_implies();
    while (accept("<->")) f = iff(f, parse_implies());
    return f;
  }
  FormulaPtr parse_implies() {
    FormulaPtr f = parse_or();
    if (accept("->")) return implies(f, parse_implies());
    return f;
  }
  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (accept("|") || accept("or")) f = either(f, parse_and());
    return f;
  }
  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    while (accept("&") || accept("and")) f = both(f, parse_unary());
    return f;
  }
  FormulaPtr parse_unary() {
    if (accept("~") || accept("!") || accept("not")) return negate(parse_unary());
    if (is("forall") || is("exists")) {
      const bool all = toks_[pos_++].text == "forall";
      std::string v = ident();
      expect(".");
      FormulaPtr body = formula();
      return all ? forall(std::move(v), body) : exists(std::move(v), body);
    }
    if (accept("(")) {
      FormulaPtr f = formula();
      expect(")");
      return f;
    }
    return atom();
  }
  Term term() {
    if (peek().kind == Token::Kind::Bits) return Term::constant(bits());
    std::string name = ident();
    if (name == "flip") {
      expect("(");
      Term t = term();
      expect(")");
      t.flipped = !t.flipped;
      return t;
    }
    return Term::var(std::move(name));
  }
  FormulaPtr atom() {
    if (peek().kind == Token::Kind::Ident && peek().text != "flip" && toks_[pos_ + 1].text == "(" &&
        toks_[pos_ + 1].kind == Token::Kind::Punct) {
      std::string name = ident();
      expect("(");
      std::vector<Term> args;
      do args.push_back(term());
      while (accept(","));
      expect(")");
      return predicate(std::move(name), std::move(args));
    }
    Term a = term();
    if (accept("=")) return equal(std::move(a), term());
    if (accept("!=")) return negate(equal(std::move(a), term()));
    if (accept("in")) return member(std::move(a), ident());
    fail("expected '=', '!=' or 'in'");
  }
};

}  // namespace formula_detail

/// Parses definitions (`Name = {...}` lines) followed by one formula.
inline FormulaText parse_formula(std::string_view source) {
  FormulaText out;
  std::string body;
  std::size_t body_line = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const std::string_view raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++line_no;
    auto toks = formula_detail::lex(raw, line_no, 1);
    if (toks.size() == 1) {
      if (!body.empty()) body += '\n';
      continue;
    }
    const bool definition = toks.size() >= 3 && toks[0].kind == formula_detail::Token::Kind::Ident &&
                            toks[1].text == "=" && toks[2].text == "{";
    if (definition && body_line == 0) {
      formula_detail::Parser p(std::vector<formula_detail::Token>(toks.begin() + 2, toks.end()));
      if (out.env.count(toks[0].text)) throw ParseError(line_no, 1, "relation '" + toks[0].text + "' defined twice");
      out.env[toks[0].text] = p.relation();
      p.expect_end();
      continue;
    }
    if (body_line == 0) body_line = line_no;
    body += std::string(raw) + '\n';
  }
  if (body_line == 0) throw ParseError(line_no, 1, "missing formula");
  formula_detail::Parser p(formula_detail::lex(body, body_line, 1));
  out.formula = p.formula();
  p.expect_end();
  return out;
}

// ---------------------------------------------------------------------------
// Direct evaluation.

namespace formula_detail {

using Assignment = std::map<std::string, std::uint64_t>;

inline std::uint64_t term_value(const Term& t, const Assignment& a, std::uint64_t n) {
  std::uint64_t v = 0;
  if (t.kind == Term::Kind::Const) {
    v = element_value(t.text, n);
  } else {
    auto it = a.find(t.text);
    if (it == a.end()) throw DomainError("unbound variable '" + t.text + "'");
    v = it->second;
  }
  return t.flipped ? v ^ ((1ULL << n) - 1) : v;
}

inline const Relation& lookup(const Environment& env, const std::string& name) {
  auto it = env.find(name);
  if (it == env.end()) throw DomainError("undefined relation '" + name + "'");
  return it->second;
}

inline bool eval(const Formula& f, const Environment& env, std::uint64_t n, Assignment& a) {
  using K = Formula::Kind;
  switch (f.kind) {
    case K::Equal: return term_value(f.args[0], a, n) == term_value(f.args[1], a, n);
    case K::Member:
    case K::Predicate: {
      const Relation& r = lookup(env, f.name);
      if (f.kind == K::Member && r.arity > 1) throw DomainError("'in' needs a set of elements: " + f.name);
      if (r.arity != 0 && r.arity != f.args.size())
        throw DomainError("relation '" + f.name + "' has arity " + std::to_string(r.arity));
      for (const auto& tuple : r.tuples) {
        bool hit = true;
        for (std::size_t i = 0; i < tuple.size() && hit; ++i)
          hit = element_value(tuple[i], n) == term_value(f.args[i], a, n);
        if (hit) return true;
      }
      for (const auto& t : f.args) term_value(t, a, n);  // report unbound variables
      return false;
    }
    case K::Not: return !eval(*f.lhs, env, n, a);
    case K::And: return eval(*f.lhs, env, n, a) && eval(*f.rhs, env, n, a);
    case K::Or: return eval(*f.lhs, env, n, a) || eval(*f.rhs, env, n, a);
    case K::Implies: return !eval(*f.lhs, env, n, a) || eval(*f.rhs, env, n, a);
    case K::Iff: return eval(*f.lhs, env, n, a) == eval(*f.rhs, env, n, a);
    case K::ForAll:
    case K::Exists: {
      const bool all = f.kind == K::ForAll;
      auto saved = a.find(f.name) == a.end() ? std::optional<std::uint64_t>{} : a[f.name];
      bool result = all;
      for (std::uint64_t e = 0; e < (1ULL << n); ++e) {
        a[f.name] = e;
        if (eval(*f.lhs, env, n, a) != all) {
          result = !all;
          break;
        }
      }
      if (saved) a[f.name] = *saved;
      else a.erase(f.name);
      return result;
    }
  }
  return false;
}

}  // namespace formula_detail

/// Tarskian evaluation by enumerating the 2^n elements at every quantifier.
inline bool eval_direct(const Formula& f, const Environment& env, const DomainSpec& d) {
  if (d.n > kMaxEncodeWidth) throw DomainError("domain width too large");
  formula_detail::Assignment a;
  return formula_detail::eval(f, env, d.n, a);
}

inline bool eval_direct(const FormulaText& t, const DomainSpec& d) { return eval_direct(*t.formula, t.env, d); }

/// Number of quantifier nodes in the tree.
inline std::size_t quantifier_count(const Formula& f) {
  std::size_t k = f.is_quantifier() ? 1 : 0;
  if (f.lhs) k += quantifier_count(*f.lhs);
  if (f.rhs) k += quantifier_count(*f.rhs);
  return k;
}

inline std::size_t quantifier_depth(const Formula& f) {
  std::size_t d = 0;
  if (f.lhs) d = quantifier_depth(*f.lhs);
  if (f.rhs) d = std::max(d, quantifier_depth(*f.rhs));
  return d + (f.is_quantifier() ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Random closed formulas.

struct GeneratorOptions {
  std::uint64_t n = 2;
  std::size_t max_quantifiers = 3;  // total, which also bounds the depth
  std::size_t max_size = 6;         // connective budget
};

namespace formula_detail {

class Generator {
 public:
  Generator(std::mt19937_64& rng, const GeneratorOptions& opt) : rng_(rng), opt_(opt) {}

  Environment environment() {
    Environment env;
    const std::uint64_t size = 1ULL << opt_.n;
    auto elem = [&](std::uint64_t v) { return hvm::to_string(bits_of(v, opt_.n)); };
    for (const char* name : {"X", "P"}) {
      Relation r{1, {}};
      for (std::uint64_t v = 0; v < size; ++v)
        if (coin()) r.tuples.insert(std::vector<std::string>{elem(v)});
      env[name] = r;
    }
    Relation rel{2, {}};
    for (std::uint64_t a = 0; a < size; ++a)
      for (std::uint64_t b = 0; b < size; ++b)
        if (pick(4) == 0) rel.tuples.insert(std::vector<std::string>{elem(a), elem(b)});
    env["R"] = rel;
    return env;
  }

  FormulaPtr closed() {
    quantifiers_left_ = opt_.max_quantifiers;
    size_left_ = opt_.max_size;
    return node({}, true);
  }

 private:
  std::mt19937_64& rng_;
  GeneratorOptions opt_;
  std::size_t quantifiers_left_ = 0;
  std::size_t size_left_ = 0;
  std::size_t fresh_ = 0;

  std::uint64_t pick(std::uint64_t k) { return std::uniform_int_distribution<std::uint64_t>(0, k - 1)(rng_); }
  bool coin() { return pick(2) == 1; }

  Term term(const std::vector<std::string>& scope) {
    if (scope.empty() || pick(4) == 0) return Term::constant(hvm::to_string(bits_of(pick(1ULL << opt_.n), opt_.n)), false);
    return Term::var(scope[pick(scope.size())], pick(3) == 0);
  }

  FormulaPtr atom(const std::vector<std::string>& scope) {
    switch (pick(4)) {
      case 0: return equal(term(scope), term(scope));
      case 1: return member(term(scope), "X");
      case 2: return predicate("P", {term(scope)});
      default: return predicate("R", {term(scope), term(scope)});
    }
  }

  // `quantified`: quantifiers may appear below this node.
  FormulaPtr node(std::vector<std::string> scope, bool quantified) {
    const bool can_quantify = quantified && quantifiers_left_ > 0;
    if (can_quantify && (scope.empty() || pick(3) == 0)) {
      --quantifiers_left_;
      std::string v = "v" + std::to_string(fresh_++);
      scope.push_back(v);
      FormulaPtr body = node(scope, true);
      return coin() ? forall(v, body) : exists(v, body);
    }
    if (size_left_ == 0 || pick(3) == 0) return atom(scope);
    --size_left_;
    switch (pick(5)) {
      case 0: return negate(node(scope, quantified));
      case 1: return both(node(scope, quantified), node(scope, quantified));
      case 2: return either(node(scope, quantified), node(scope, quantified));
      case 3: return implies(node(scope, quantified), node(scope, quantified));
      default: return iff(node(scope, false), node(scope, false));  // keeps prenex forms small
    }
  }
};

}  // namespace formula_detail

/// Closed random formula plus a random environment (sets X, P and relation R).
inline FormulaText generate_formula(std::mt19937_64& rng, const GeneratorOptions& opt = {}) {
  formula_detail::Generator g(rng, opt);
  FormulaText out;
  out.env = g.environment();
  out.formula = g.closed();
  return out;
}

}  // namespace hvm::logic

#pragma once

// Program schemas: program text with `$name` placeholders and `for` clauses.
//
//   spec N=$N cap=w
//   instr $a, W[1], 1, right(W[1]), $a+1 for a in 0..N
//
// `$name` is replaced textually by its binding before the line is parsed, so
// ordinal arithmetic such as `$a+1` goes through the ordinal parser. A `for`
// clause iterates its variable from the lower bound (inclusive) to the upper
// bound (exclusive) in steps of +1; several clauses nest left to right. A
// range that spans a limit is truncated to N values. `N` is always bound to
// the truncation.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hvm/errors.hpp"
#include "hvm/machine.hpp"
#include "hvm/ordinal.hpp"
#include "hvm/program_text.hpp"

namespace hvm {

struct LoopClause {
  std::string var;
  std::string lo;
  std::string hi;
};

struct SchemaItem {
  enum class Kind { Instr, Load, Header };
  Kind kind = Kind::Instr;
  std::size_t line = 0;
  std::size_t column = 1;  // column of the body text
  std::string body;
  std::vector<LoopClause> loops;
};

struct Schema {
  std::vector<SchemaItem> items;
};

using Bindings = std::map<std::string, std::string>;

struct Expansion {
  Program program;
  std::vector<std::string> warnings;
};

namespace schema_detail {

inline bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

inline std::string substitute(std::string_view s, const Bindings& env, std::size_t line, std::size_t column) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '$') {
      out += s[i];
      continue;
    }
    std::size_t j = i + 1;
    while (j < s.size() && ident_char(s[j])) ++j;
    const std::string name(s.substr(i + 1, j - i - 1));
    if (name.empty()) throw ParseError(line, column + i, "'$' must be followed by a variable name");
    auto it = env.find(name);
    if (it == env.end()) throw ParseError(line, column + i, "unbound variable '" + name + "'");
    out += it->second;
    i = j - 1;
  }
  return out;
}

inline Ordinal bound_value(std::string_view raw, const Bindings& env, std::size_t line, std::size_t column) {
  std::string s = substitute(text::trim(raw), env, line, column);
  if (auto it = env.find(s); it != env.end()) s = it->second;
  return text::parse_ordinal_at(s, line, column);
}

/// Splits `body for a in x..y for b in ...` into the body and its clauses.
inline SchemaItem split_loops(std::string_view line, std::size_t line_no, std::size_t column) {
  SchemaItem item;
  item.line = line_no;
  item.column = column;
  std::vector<std::size_t> cuts;
  for (std::size_t i = 0; i + 3 <= line.size(); ++i) {
    if (line.substr(i, 3) != "for") continue;
    const bool left_ok = i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1]));
    const bool right_ok = i + 3 < line.size() && std::isspace(static_cast<unsigned char>(line[i + 3]));
    if (left_ok && right_ok) cuts.push_back(i);
  }
  item.body = std::string(text::trim(line.substr(0, cuts.empty() ? line.size() : cuts.front())));
  for (std::size_t k = 0; k < cuts.size(); ++k) {
    const std::size_t from = cuts[k] + 3;
    const std::size_t to = k + 1 < cuts.size() ? cuts[k + 1] : line.size();
    const std::string_view clause = text::trim(line.substr(from, to - from));
    const std::size_t col = column + cuts[k];
    const auto in = clause.find(" in ");
    if (in == std::string_view::npos) throw ParseError(line_no, col, "expected 'for <var> in <lo>..<hi>'");
    LoopClause lc;
    lc.var = std::string(text::trim(clause.substr(0, in)));
    if (lc.var.empty() || !std::all_of(lc.var.begin(), lc.var.end(), ident_char))
      throw ParseError(line_no, col, "bad loop variable '" + lc.var + "'");
    const std::string_view range = text::trim(clause.substr(in + 4));
    const auto dots = range.find("..");
    if (dots == std::string_view::npos) throw ParseError(line_no, col, "expected a range '<lo>..<hi>'");
    lc.lo = std::string(text::trim(range.substr(0, dots)));
    lc.hi = std::string(text::trim(range.substr(dots + 2)));
    item.loops.push_back(std::move(lc));
  }
  return item;
}

inline std::uint64_t literal_header_n(const SchemaItem& header) {
  std::size_t pos = 0;
  const std::string& b = header.body;
  while (pos < b.size()) {
    while (pos < b.size() && std::isspace(static_cast<unsigned char>(b[pos]))) ++pos;
    std::size_t end = pos;
    while (end < b.size() && !std::isspace(static_cast<unsigned char>(b[end]))) ++end;
    const std::string_view token(b.data() + pos, end - pos);
    if (token.substr(0, 2) == "N=" && token.find('$') == std::string_view::npos)
      return text::parse_natural(token.substr(2), header.line, header.column + pos + 2, "N");
    pos = end;
  }
  return 0;
}

}  // namespace schema_detail

inline Schema parse_schema(std::string_view source) {
  Schema s;
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
    auto keyword = [&](std::string_view kw) {
      return line.size() > kw.size() && line.substr(0, kw.size()) == kw &&
             std::isspace(static_cast<unsigned char>(line[kw.size()]));
    };
    SchemaItem item;
    if (keyword("instr")) {
      item = schema_detail::split_loops(line.substr(5), line_no, column + 5);
      item.kind = SchemaItem::Kind::Instr;
    } else if (keyword("load")) {
      item = schema_detail::split_loops(line.substr(4), line_no, column + 4);
      item.kind = SchemaItem::Kind::Load;
    } else if (keyword("spec")) {
      item.kind = SchemaItem::Kind::Header;
      item.line = line_no;
      item.column = column + 4;
      item.body = std::string(line.substr(4));
    } else {
      throw ParseError(line_no, column, "expected 'instr', 'spec' or 'load'");
    }
    s.items.push_back(std::move(item));
  }
  return s;
}

/// Expands at truncation `n` (0 = take N from the header). Accessibility is
/// checked on every emitted instruction.
inline Expansion expand(const Schema& schema, Bindings bindings, std::uint64_t n = 0) {
  Expansion out;
  // N comes from the truncation, or else from a literal N= in the header.
  if (n == 0)
    for (const auto& item : schema.items)
      if (item.kind == SchemaItem::Kind::Header) n = schema_detail::literal_header_n(item);
  if (n != 0) bindings["N"] = std::to_string(n);
  for (const auto& item : schema.items) {
    if (item.kind != SchemaItem::Kind::Header) continue;
    parse_header_fields(schema_detail::substitute(item.body, bindings, item.line, item.column), item.line,
                        item.column, out.program.spec);
  }
  if (n != 0) out.program.spec.registers = n;

  for (const auto& item : schema.items) {
    if (item.kind == SchemaItem::Kind::Header) continue;
    Bindings env = bindings;
    auto emit = [&](const Bindings& e) {
      const std::string body = schema_detail::substitute(item.body, e, item.line, item.column);
      if (item.kind == SchemaItem::Kind::Instr) {
        out.program.instructions.push_back(parse_instruction_fields(body, item.line, item.column));
      } else {
        auto [r, bits] = parse_load(body, item.line, item.column);
        out.program.preload[r] = std::move(bits);
      }
    };
    auto loop = [&](auto&& self, std::size_t depth) -> void {
      if (depth == item.loops.size()) {
        emit(env);
        return;
      }
      const LoopClause& lc = item.loops[depth];
      const Ordinal lo = schema_detail::bound_value(lc.lo, env, item.line, item.column);
      const Ordinal hi = schema_detail::bound_value(lc.hi, env, item.line, item.column);
      const bool spans_limit = lo.infinite_part() != hi.infinite_part() && lo < hi;
      if (spans_limit && n == 0)
        throw DomainError("line " + std::to_string(item.line) + ": range " + lc.lo + ".." + lc.hi +
                          " spans a limit and needs a truncation N");
      std::uint64_t count = 0;
      Ordinal v = lo;
      while (v < hi) {
        if (spans_limit && count == n) {
          out.warnings.push_back("line " + std::to_string(item.line) + ": range " + lc.var + " in " + lc.lo +
                                 ".." + lc.hi + " truncated to " + std::to_string(n) + " values");
          break;
        }
        env[lc.var] = v.to_string();
        self(self, depth + 1);
        v = ord_add(v, 1);
        ++count;
      }
      env.erase(lc.var);
      if (auto it = bindings.find(lc.var); it != bindings.end()) env[lc.var] = it->second;
    };
    loop(loop, 0);
  }
  return out;
}

inline Expansion expand_text(std::string_view source, Bindings bindings = {}, std::uint64_t n = 0) {
  return expand(parse_schema(source), std::move(bindings), n);
}

}  // namespace hvm

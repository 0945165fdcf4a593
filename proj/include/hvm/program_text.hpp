#pragma once

// Text form of programs.
//
//   spec N=8 states=3 len=2 cap=w      # optional header; any subset of keys
//   load W[1]=1011                     # optional preload of a register set
//   instr 1, W[1], 1, write1(W[2]), 1  # current, set, symbol, action, next
//
// Actions are nop, write0(R), write1(R), left(R), right(R), reset(R) or their
// numeric codes (`5`, `<2,3>`). Register sets are I, O and W[<natural>].

#include <cctype>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hvm/errors.hpp"
#include "hvm/machine.hpp"
#include "hvm/ordinal.hpp"

namespace hvm {

namespace text {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

inline std::string_view strip_comment(std::string_view s) {
  const auto hash = s.find('#');
  return hash == std::string_view::npos ? s : s.substr(0, hash);
}

/// Field with its 1-based column in the source line.
struct Field {
  std::string_view text;
  std::size_t column = 1;
};

/// Splits on commas outside (), [] and <>.
inline std::vector<Field> split_fields(std::string_view s, std::size_t base_column) {
  std::vector<Field> out;
  int depth = 0;
  std::size_t start = 0;
  auto push = [&](std::size_t end) {
    std::string_view raw = s.substr(start, end - start);
    std::size_t lead = 0;
    while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) ++lead;
    out.push_back({trim(raw), base_column + start + lead});
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(' || c == '[' || c == '<') ++depth;
    else if (c == ')' || c == ']' || c == '>') --depth;
    else if (c == ',' && depth == 0) {
      push(i);
      start = i + 1;
    }
  }
  push(s.size());
  return out;
}

inline std::uint64_t parse_natural(std::string_view s, std::size_t line, std::size_t column, const char* what) {
  s = trim(s);
  if (s.empty()) throw ParseError(line, column, std::string("expected ") + what);
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') throw ParseError(line, column, std::string("expected ") + what + ", got '" + std::string(s) + "'");
    if (v > (UINT64_MAX - static_cast<std::uint64_t>(c - '0')) / 10) throw ParseError(line, column, "number too large");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

inline Ordinal parse_ordinal_at(std::string_view s, std::size_t line, std::size_t column) {
  try {
    return Ordinal::parse(s);
  } catch (const ParseError& e) {
    throw ParseError(line, column + e.column() - 1, e.what());
  }
}

}  // namespace text

/// Accepts I, O, W[<natural>] and the shorthand W<natural>.
inline RegisterSetId parse_regset(std::string_view s, std::size_t line = 1, std::size_t column = 1) {
  s = text::trim(s);
  if (s == "I") return RegisterSetId::input();
  if (s == "O") return RegisterSetId::output();
  if (s.size() >= 2 && s[0] == 'W') {
    std::string_view idx = s.substr(1);
    if (idx.front() == '[') {
      if (idx.back() != ']') throw ParseError(line, column, "unterminated register index in '" + std::string(s) + "'");
      idx = idx.substr(1, idx.size() - 2);
    }
    const Ordinal beta = text::parse_ordinal_at(text::trim(idx), line, column + 2);
    if (!beta.is_finite())
      throw ParseError(line, column, "working register index must be below the surrogate N, got " + beta.to_string());
    return RegisterSetId::working(*beta.to_natural());
  }
  throw ParseError(line, column, "unknown register set '" + std::string(s) + "'");
}

inline Action parse_action(std::string_view s, std::size_t line = 1, std::size_t column = 1) {
  s = text::trim(s);
  if (s == "nop") return Action::nop();
  try {
    if (!s.empty() && s.front() == '<') {
      if (s.back() != '>') throw ParseError(line, column, "unterminated action code");
      auto parts = text::split_fields(s.substr(1, s.size() - 2), column + 1);
      if (parts.size() != 2) throw ParseError(line, column, "action code pair needs two fields");
      const auto type = text::parse_natural(parts[0].text, line, parts[0].column, "action type");
      const auto beta = text::parse_natural(parts[1].text, line, parts[1].column, "register index");
      return action_from_code({static_cast<int>(type), beta});
    }
    if (!s.empty() && std::isdigit(static_cast<unsigned char>(s.front())))
      return action_from_code({static_cast<int>(text::parse_natural(s, line, column, "action code")), std::nullopt});
  } catch (const ParseError&) {
    throw;
  } catch (const DomainError& e) {
    throw ParseError(line, column, e.what());
  }
  const auto open = s.find('(');
  if (open == std::string_view::npos || s.back() != ')')
    throw ParseError(line, column, "unknown action '" + std::string(s) + "'");
  const std::string_view name = text::trim(s.substr(0, open));
  const RegisterSetId target = parse_regset(s.substr(open + 1, s.size() - open - 2), line, column + open + 1);
  if (name == "write0") return Action::write0(target);
  if (name == "write1") return Action::write1(target);
  if (name == "left") return Action::left(target);
  if (name == "right") return Action::right(target);
  if (name == "reset") return Action::reset(target);
  throw ParseError(line, column, "unknown action '" + std::string(name) + "'");
}

/// Parses the five comma-separated instruction fields (without the `instr` keyword).
inline Instruction parse_instruction_fields(std::string_view body, std::size_t line, std::size_t column) {
  const auto f = text::split_fields(body, column);
  if (f.size() != 5)
    throw ParseError(line, column, "instruction needs 5 fields, got " + std::to_string(f.size()));
  Instruction ins;
  ins.current = text::parse_ordinal_at(f[0].text, line, f[0].column);
  ins.set = parse_regset(f[1].text, line, f[1].column);
  if (f[2].text != "0" && f[2].text != "1") throw ParseError(line, f[2].column, "symbol must be 0 or 1");
  ins.symbol = f[2].text == "1";
  ins.action = parse_action(f[3].text, line, f[3].column);
  ins.next = text::parse_ordinal_at(f[4].text, line, f[4].column);
  try {
    check_accessible(ins.current, ins.next);
  } catch (const AccessibilityError& e) {
    throw AccessibilityError("line " + std::to_string(line) + ", column " + std::to_string(f[4].column) + ": " +
                             e.what());
  }
  if (ins.action.is_write() && ins.action.target.kind == SetKind::Input)
    throw ParseError(line, f[3].column, "input registers are read-only");
  return ins;
}

inline void parse_header_fields(std::string_view body, std::size_t line, std::size_t column, MachineSpec& spec) {
  std::size_t pos = 0;
  while (pos < body.size()) {
    while (pos < body.size() && std::isspace(static_cast<unsigned char>(body[pos]))) ++pos;
    if (pos >= body.size()) break;
    std::size_t end = pos;
    while (end < body.size() && !std::isspace(static_cast<unsigned char>(body[end]))) ++end;
    const std::string_view item = body.substr(pos, end - pos);
    const std::size_t col = column + pos;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ParseError(line, col, "expected key=value in header");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "N") spec.registers = text::parse_natural(value, line, col + eq + 1, "N");
    else if (key == "states") spec.states = text::parse_natural(value, line, col + eq + 1, "states");
    else if (key == "len") spec.length = text::parse_natural(value, line, col + eq + 1, "len");
    else if (key == "cap") spec.cap = text::parse_ordinal_at(value, line, col + eq + 1);
    else throw ParseError(line, col, "unknown header key '" + std::string(key) + "'");
    pos = end;
  }
}

/// Parses one `load R=bits` body.
inline std::pair<RegisterSetId, Bits> parse_load(std::string_view body, std::size_t line, std::size_t column) {
  const auto eq = body.find('=');
  if (eq == std::string_view::npos) throw ParseError(line, column, "expected R=bits");
  const RegisterSetId r = parse_regset(body.substr(0, eq), line, column);
  try {
    return {r, parse_bits(text::trim(body.substr(eq + 1)))};
  } catch (const DomainError& e) {
    throw ParseError(line, column + eq + 1, e.what());
  }
}

inline Program parse_program(std::string_view source) {
  Program p;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= source.size()) {
    const auto nl = source.find('\n', pos);
    const std::string_view raw = source.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? source.size() + 1 : nl + 1;
    ++line_no;
    const std::string_view content = text::strip_comment(raw);
    const std::string_view line = text::trim(content);
    if (line.empty()) continue;
    const std::size_t column = static_cast<std::size_t>(line.data() - raw.data()) + 1;
    auto keyword = [&](std::string_view kw) {
      return line.size() > kw.size() && line.substr(0, kw.size()) == kw &&
             std::isspace(static_cast<unsigned char>(line[kw.size()]));
    };
    if (keyword("instr")) {
      p.instructions.push_back(parse_instruction_fields(line.substr(5), line_no, column + 5));
    } else if (keyword("spec")) {
      parse_header_fields(line.substr(4), line_no, column + 4, p.spec);
    } else if (keyword("load")) {
      auto [r, bits] = parse_load(line.substr(4), line_no, column + 4);
      p.preload[r] = std::move(bits);
    } else {
      throw ParseError(line_no, column, "expected 'instr', 'spec' or 'load'");
    }
  }
  return p;
}

inline std::string format_program(const Program& p, bool with_codes = true) {
  std::ostringstream out;
  const MachineSpec& s = p.spec;
  if (s.registers || s.states || s.length || s.cap != Ordinal::omega()) {
    out << "spec";
    if (s.registers) out << " N=" << s.registers;
    if (s.states) out << " states=" << s.states;
    if (s.length) out << " len=" << s.length;
    out << " cap=" << s.cap << '\n';
  }
  for (const auto& [r, bits] : p.preload) out << "load " << r.to_string() << '=' << to_string(bits) << '\n';
  for (const auto& ins : p.instructions) {
    out << "instr " << ins.current << ", " << ins.set.to_string() << ", " << (ins.symbol ? 1 : 0) << ", "
        << ins.action.to_string() << ", " << ins.next;
    if (with_codes) out << "  # " << action_code(ins.action).to_string();
    out << '\n';
  }
  return out.str();
}

}  // namespace hvm

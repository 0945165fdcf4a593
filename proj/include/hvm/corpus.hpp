#pragma once

// Built-in programs, written as schemas and expanded on demand.
//
// Most programs share two fragments: a prologue that leaves state 0 whatever
// the first cell holds, and an epilogue guarded on W[0]. While a program
// runs, W[0] reads 0 and the epilogue only resets the W[0] head. When the
// clock reaches the cap the completion flag W[0][0] becomes 1 and the final
// dispatch sends the program to its halting state. The epilogue rows come
// first so that, in the same state, the working rows (listed later) decide
// the next state.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

#include "hvm/errors.hpp"
#include "hvm/machine.hpp"
#include "hvm/schema.hpp"

namespace hvm::corpus {

// $src: scanned set, $dst: set receiving the result in cell 0.
inline constexpr std::string_view kConj = R"(
spec cap=w
instr 0, $src, 0, nop, 1
instr 0, $src, 1, nop, 1
instr 1, W[0], 0, reset(W[0]), 1
instr 1, W[0], 1, reset(W[0]), 1
instr 1, W[0], 1, nop, 2
instr 1, $src, 1, write1($dst), 1
instr 1, $src, 1, right($src), 1
instr 1, $src, 0, write0($dst), 2
)";

// Dual of kConj: stops at the first 1.
inline constexpr std::string_view kDisj = R"(
spec cap=w
instr 0, $src, 0, nop, 1
instr 0, $src, 1, nop, 1
instr 1, W[0], 0, reset(W[0]), 1
instr 1, W[0], 1, reset(W[0]), 1
instr 1, W[0], 1, nop, 2
instr 1, $src, 0, write0($dst), 1
instr 1, $src, 0, right($src), 1
instr 1, $src, 1, write1($dst), 2
)";

// I -> W[1].
inline constexpr std::string_view kCopyIn = R"(
spec cap=w
instr 0, I, 0, nop, 1
instr 0, I, 1, nop, 1
instr 1, W[0], 0, reset(W[0]), 1
instr 1, W[0], 1, reset(W[0]), 1
instr 1, W[0], 1, nop, 2
instr 1, I, 0, write0(W[1]), 1
instr 1, I, 1, write1(W[1]), 1
instr 1, I, 0, right(I), 1
instr 1, I, 1, right(I), 1
instr 1, I, 0, right(W[1]), 1
instr 1, I, 1, right(W[1]), 1
)";

// W[$beta] -> O; the output head moves right along with the source.
inline constexpr std::string_view kCopyOut = R"(
spec cap=w
instr 0, W[$beta], 0, nop, 1
instr 0, W[$beta], 1, nop, 1
instr 1, W[0], 0, reset(W[0]), 1
instr 1, W[0], 1, reset(W[0]), 1
instr 1, W[0], 1, nop, 2
instr 1, W[$beta], 0, write0(O), 1
instr 1, W[$beta], 1, write1(O), 1
instr 1, W[$beta], 0, right(W[$beta]), 1
instr 1, W[$beta], 1, right(W[$beta]), 1
instr 1, W[$beta], 0, right(O), 1
instr 1, W[$beta], 1, right(O), 1
)";

// I -> W[1] and I -> O in one pass.
inline constexpr std::string_view kCopyThrough = R"(
spec cap=w
instr 0, I, 0, nop, 1
instr 0, I, 1, nop, 1
instr 1, W[0], 0, reset(W[0]), 1
instr 1, W[0], 1, reset(W[0]), 1
instr 1, W[0], 1, nop, 2
instr 1, I, 0, write0(W[1]), 1
instr 1, I, 1, write1(W[1]), 1
instr 1, I, 0, write0(O), 1
instr 1, I, 1, write1(O), 1
instr 1, I, 0, right(I), 1
instr 1, I, 1, right(I), 1
instr 1, I, 0, right(W[1]), 1
instr 1, I, 1, right(W[1]), 1
instr 1, I, 0, right(O), 1
instr 1, I, 1, right(O), 1
)";

// Bitwise comparison of W[1] and W[2]; W[3][0] ends 1 iff they agree.
// State 4 is the main loop; 3 and 2 remember that W[1] held 0 or 1.
// A mismatch halts in state 5; running off the end halts in state 4.
inline constexpr std::string_view kCompare = R"(
spec cap=w
instr 0, W[1], 0, nop, 1
instr 0, W[1], 1, nop, 1
instr 1, W[0], 0, reset(W[0]), 1
instr 1, W[0], 1, reset(W[0]), 1
instr 1, W[0], 1, nop, 5
instr 1, W[1], 0, write1(W[3]), 4
instr 1, W[1], 1, write1(W[3]), 4
instr 4, W[1], 0, right(W[1]), 3
instr 4, W[1], 1, right(W[1]), 2
instr 3, W[2], 1, write0(W[3]), 5
instr 2, W[2], 0, write0(W[3]), 5
instr 3, W[2], 0, right(W[2]), 4
instr 2, W[2], 1, right(W[2]), 4
)";

// Toggles W[1][0] forever.
inline constexpr std::string_view kBlinker = R"(
spec cap=w
instr 0, W[1], 0, write1(W[1]), 0
instr 0, W[1], 1, write0(W[1]), 0
)";

// Writes 1 and moves right forever.
inline constexpr std::string_view kRightMover = R"(
spec cap=w
instr 0, W[1], 0, write1(W[1]), 0
instr 0, W[1], 0, right(W[1]), 0
)";

// Copies I[0, k) to W[1] and I[k, 2k) to W[2], then runs the comparison
// loop above on them with its states moved up by $o = 2k+1. W[3][0] ends 1
// iff the two halves agree. $k2 = 2k.
inline constexpr std::string_view kSplitCompare = R"(
spec cap=w
instr $a, I, 0, write0(W[1]), $a+1 for a in 0..$k
instr $a, I, 1, write1(W[1]), $a+1 for a in 0..$k
instr $a, I, 0, write0(W[2]), $a+1 for a in $k..$k2
instr $a, I, 1, write1(W[2]), $a+1 for a in $k..$k2
instr $a, I, 0, right(I), $a+1 for a in 0..$k2
instr $a, I, 1, right(I), $a+1 for a in 0..$k2
instr $a, I, 0, right(W[1]), $a+1 for a in 0..$k
instr $a, I, 1, right(W[1]), $a+1 for a in 0..$k
instr $a, I, 0, right(W[2]), $a+1 for a in $k..$k2
instr $a, I, 1, right(W[2]), $a+1 for a in $k..$k2
instr $k2, W[0], 0, reset(W[1]), $o
instr $k2, W[0], 0, reset(W[2]), $o
instr $o, W[1], 0, write1(W[3]), $o+3
instr $o, W[1], 1, write1(W[3]), $o+3
instr $o+3, W[1], 0, right(W[1]), $o+2
instr $o+3, W[1], 1, right(W[1]), $o+1
instr $o+2, W[2], 1, write0(W[3]), $o+4
instr $o+1, W[2], 0, write0(W[3]), $o+4
instr $o+2, W[2], 0, right(W[2]), $o+3
instr $o+1, W[2], 1, right(W[2]), $o+3
)";

struct Params {
  std::uint64_t n = 8;
  std::uint64_t beta = 1;  // copy_out source
  std::string src = "W[1]";
  std::string dst = "W[2]";
};

inline const std::map<std::string, std::string_view, std::less<>>& sources() {
  static const std::map<std::string, std::string_view, std::less<>> table{
      {"conj", kConj},       {"disj", kDisj},       {"copy_in", kCopyIn},         {"copy_out", kCopyOut},
      {"compare", kCompare}, {"blinker", kBlinker}, {"right_mover", kRightMover}, {"copy_through", kCopyThrough},
  };
  return table;
}

/// Schema text of a named program.
inline std::string_view source(std::string_view name) {
  auto it = sources().find(name);
  if (it == sources().end()) throw DomainError("unknown corpus program '" + std::string(name) + "'");
  return it->second;
}

inline Bindings bindings_for(const Params& p) {
  return {{"src", p.src}, {"dst", p.dst}, {"beta", std::to_string(p.beta)}};
}

inline Program get(std::string_view name, const Params& p = {}) {
  Program prog = expand_text(source(name), bindings_for(p), p.n).program;
  prog.validate();
  return prog;
}

inline Program conj(std::uint64_t n, const std::string& src = "W[1]", const std::string& dst = "W[2]") {
  return get("conj", {n, 1, src, dst});
}

inline Program disj(std::uint64_t n, const std::string& src = "W[1]", const std::string& dst = "W[2]") {
  return get("disj", {n, 1, src, dst});
}

inline Program copy_in(std::uint64_t n) { return get("copy_in", {n}); }
inline Program copy_out(std::uint64_t n, std::uint64_t beta = 1) { return get("copy_out", {n, beta}); }
inline Program copy_through(std::uint64_t n) { return get("copy_through", {n}); }
inline Program compare(std::uint64_t n) { return get("compare", {n}); }
inline Program blinker(std::uint64_t n) { return get("blinker", {n}); }
inline Program right_mover(std::uint64_t n) { return get("right_mover", {n}); }

/// Compares the two k-bit halves of a 2k-bit input; N = 2k.
inline Program split_compare(std::uint64_t k) {
  if (k == 0) throw DomainError("split_compare needs k >= 1");
  Bindings b{{"k", std::to_string(k)}, {"k2", std::to_string(2 * k)}, {"o", std::to_string(2 * k + 1)}};
  Program prog = expand_text(kSplitCompare, b, 2 * k).program;
  prog.validate();
  return prog;
}

}  // namespace hvm::corpus

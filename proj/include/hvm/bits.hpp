#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hvm/errors.hpp"

namespace hvm {

using Bits = std::vector<bool>;

inline Bits parse_bits(std::string_view text) {
  Bits out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == '0') out.push_back(false);
    else if (c == '1') out.push_back(true);
    else throw DomainError("not a bit string: '" + std::string(text) + "'");
  }
  return out;
}

inline std::string to_string(const Bits& bits) {
  std::string out;
  out.reserve(bits.size());
  for (bool b : bits) out += b ? '1' : '0';
  return out;
}

/// Most significant bit first, `width` bits.
inline Bits bits_of(std::uint64_t value, std::size_t width) {
  Bits out(width);
  for (std::size_t i = 0; i < width; ++i) out[i] = (value >> (width - 1 - i)) & 1U;
  return out;
}

inline std::uint64_t value_of(const Bits& bits) {
  std::uint64_t v = 0;
  for (bool b : bits) v = (v << 1) | (b ? 1U : 0U);
  return v;
}

}  // namespace hvm

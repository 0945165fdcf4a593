#pragma once

#include "hvm/bits.hpp"
#include "hvm/corpus.hpp"
#include "hvm/errors.hpp"
#include "hvm/formula.hpp"
#include "hvm/infotheory.hpp"
#include "hvm/limit.hpp"
#include "hvm/logic_compiler.hpp"
#include "hvm/machine.hpp"
#include "hvm/ordinal.hpp"
#include "hvm/parallel.hpp"
#include "hvm/program_text.hpp"
#include "hvm/schema.hpp"

namespace hvm {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hvm

#pragma once

// Canonical text form of a formula: parenthesized prefix notation,
//
//   (always w=[0.5,1] beta=1 window=[0,1] (atom a=[1] u=0.25))
//
// Reals are printed with 17 significant digits so parse(print(f)) == f
// bit for bit. Atom keys family/feature/view/offset are only printed when
// they differ from their defaults (linear, 0, 0, 0).

#include "wstl/logic.hpp"

#include <string>
#include <string_view>

namespace wstl {

std::string to_canonical(const FormulaNode& node);
FormulaNode parse_canonical(std::string_view text);

/// Shortest round-trip-safe decimal form used by all model/report writers.
std::string format_real(double value);

} // namespace wstl

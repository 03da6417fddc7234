#pragma once

#include "wstl/dataset.hpp"

#include <cstddef>
#include <cstdint>

namespace wstl {

struct BumpSpec {
  std::size_t length = 50;
  std::size_t bump_lo = 10;
  std::size_t bump_hi = 15; // inclusive
  double flat_max = 0.2;    // every sample of a flat series lies in [0, flat_max)
  double bump_min = 0.85;   // bump samples lie in [bump_min, 1)
};

/// Two balanced classes with raw labels "0" (flat noise) and "1" (the same
/// noise plus a plateau on the bump window), in shuffled order.
LabeledDataset make_bump_dataset(std::size_t count, std::uint64_t seed, const BumpSpec& shape = {});

} // namespace wstl

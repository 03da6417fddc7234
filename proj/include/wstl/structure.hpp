#pragma once

// The fixed menu of formula skeletons searched at every tree node, and their
// instantiation into a trainable per-view conjunction.

#include "wstl/logic.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace wstl {

enum class TemplateId {
  B1And,              // pi_0 and pi_1 and ... (one predicate per index)
  B1Or,               // pi_0 or pi_1 or ...
  B2Always,           // always pi
  B2Eventually,       // eventually pi
  B3AlwaysEventually, // always eventually pi
  B3EventuallyAlways, // eventually always pi
};

std::string_view to_string(TemplateId id);
TemplateId template_id_from_string(std::string_view name);

struct StructureTemplate {
  TemplateId id = TemplateId::B1And;
  PredicateFamily family = PredicateFamily::LinearHalfspace;

  bool per_index_predicates() const noexcept { return id == TemplateId::B1And || id == TemplateId::B1Or; }
  std::size_t temporal_depth() const noexcept;
};

/// The six templates in their fixed search order (B1-and first).
std::vector<StructureTemplate> enumerate_structures(PredicateFamily family = PredicateFamily::LinearHalfspace);

// Initial values for freshly instantiated parameters.
inline constexpr double kInitPredicateValue = 1e-5;
inline constexpr double kInitBias = 1.0;
inline constexpr double kWeightFloor = 1e-6;

/// Build the template over every view (window [0, L_v - 1]) and conjoin the
/// views under a weighted And; a single view is returned without the And.
/// Weights are drawn uniformly from [0, 1) and floored at kWeightFloor.
FormulaNode instantiate(const StructureTemplate& structure, std::span<const std::size_t> view_lengths,
                        std::size_t dim, std::uint64_t seed);

} // namespace wstl

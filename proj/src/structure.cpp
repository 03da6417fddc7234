#include "wstl/structure.hpp"

#include "wstl/error.hpp"
#include "wstl/random.hpp"

#include <algorithm>
#include <string>

namespace wstl {

std::string_view to_string(TemplateId id) {
  switch (id) {
  case TemplateId::B1And: return "B1-and";
  case TemplateId::B1Or: return "B1-or";
  case TemplateId::B2Always: return "B2-always";
  case TemplateId::B2Eventually: return "B2-eventually";
  case TemplateId::B3AlwaysEventually: return "B3-always-eventually";
  case TemplateId::B3EventuallyAlways: return "B3-eventually-always";
  }
  return "?";
}

TemplateId template_id_from_string(std::string_view name) {
  for (const auto& s : enumerate_structures())
    if (to_string(s.id) == name)
      return s.id;
  fail(ErrorCode::Format, "unknown structure template '" + std::string(name) + "'");
}

std::size_t StructureTemplate::temporal_depth() const noexcept {
  switch (id) {
  case TemplateId::B1And:
  case TemplateId::B1Or: return 0;
  case TemplateId::B2Always:
  case TemplateId::B2Eventually: return 1;
  case TemplateId::B3AlwaysEventually:
  case TemplateId::B3EventuallyAlways: return 2;
  }
  return 0;
}

std::vector<StructureTemplate> enumerate_structures(PredicateFamily family) {
  std::vector<StructureTemplate> out;
  for (TemplateId id : {TemplateId::B1And, TemplateId::B1Or, TemplateId::B2Always, TemplateId::B2Eventually,
                        TemplateId::B3AlwaysEventually, TemplateId::B3EventuallyAlways})
    out.push_back({id, family});
  return out;
}

namespace {

class Builder {
public:
  Builder(PredicateFamily family, std::size_t dim, std::uint64_t seed)
      : family_(family), dim_(dim), rng_(make_rng(seed)) {}

  std::vector<double> weights(std::size_t n) {
    std::vector<double> w(n);
    for (double& x : w)
      x = std::max(uniform01(rng_), kWeightFloor);
    return w;
  }

  // One predicate on the sample at `offset`. Axis-aligned families use one
  // atom per feature joined by `joiner` (a single atom when dim == 1).
  FormulaNode predicate_group(std::size_t view, std::size_t offset, NodeKind joiner) {
    if (family_ == PredicateFamily::LinearHalfspace)
      return make_atom(predicate(view, offset, 0));
    if (dim_ == 1)
      return make_atom(predicate(view, offset, 0));
    std::vector<FormulaNode> atoms;
    for (std::size_t j = 0; j < dim_; ++j)
      atoms.push_back(make_atom(predicate(view, offset, j)));
    auto w = weights(dim_);
    return joiner == NodeKind::Or ? make_or(std::move(atoms), std::move(w), kInitBias)
                                  : make_and(std::move(atoms), std::move(w), kInitBias);
  }

  FormulaNode view_formula(TemplateId id, std::size_t view, std::size_t length) {
    const std::size_t last = length - 1;
    switch (id) {
    case TemplateId::B1And:
    case TemplateId::B1Or: {
      const NodeKind joiner = id == TemplateId::B1And ? NodeKind::And : NodeKind::Or;
      if (length == 1)
        return predicate_group(view, 0, joiner);
      std::vector<FormulaNode> parts;
      for (std::size_t k = 0; k < length; ++k)
        parts.push_back(predicate_group(view, k, joiner));
      auto w = weights(length);
      return joiner == NodeKind::And ? make_and(std::move(parts), std::move(w), kInitBias)
                                     : make_or(std::move(parts), std::move(w), kInitBias);
    }
    case TemplateId::B2Always:
    case TemplateId::B2Eventually: {
      auto inner = predicate_group(view, 0, NodeKind::And);
      auto w = weights(length);
      return id == TemplateId::B2Always ? make_always(std::move(inner), 0, last, std::move(w), kInitBias)
                                        : make_eventually(std::move(inner), 0, last, std::move(w), kInitBias);
    }
    case TemplateId::B3AlwaysEventually:
    case TemplateId::B3EventuallyAlways: {
      auto atom = predicate_group(view, 0, NodeKind::And);
      auto outer_w = weights(length);
      auto inner_w = weights(length);
      if (id == TemplateId::B3AlwaysEventually)
        return make_always(make_eventually(std::move(atom), 0, last, std::move(inner_w), kInitBias), 0, last,
                           std::move(outer_w), kInitBias);
      return make_eventually(make_always(std::move(atom), 0, last, std::move(inner_w), kInitBias), 0, last,
                             std::move(outer_w), kInitBias);
    }
    }
    fail(ErrorCode::Config, "unknown template");
  }

private:
  Predicate predicate(std::size_t view, std::size_t offset, std::size_t feature) {
    Predicate p;
    p.family = family_;
    p.direction.assign(dim_, family_ == PredicateFamily::AxisAligned ? 0.0 : kInitPredicateValue);
    p.direction[feature] = kInitPredicateValue;
    p.threshold = kInitPredicateValue;
    p.feature = family_ == PredicateFamily::AxisAligned ? feature : 0;
    p.view = view;
    p.offset = offset;
    return p;
  }

  PredicateFamily family_;
  std::size_t dim_;
  Rng rng_;
};

} // namespace

FormulaNode instantiate(const StructureTemplate& structure, std::span<const std::size_t> view_lengths,
                        std::size_t dim, std::uint64_t seed) {
  if (view_lengths.empty())
    fail(ErrorCode::Config, "instantiation needs at least one enabled view");
  if (dim == 0)
    fail(ErrorCode::Shape, "signal dimension must be positive");
  for (std::size_t len : view_lengths)
    if (len == 0)
      fail(ErrorCode::Shape, "view length must be positive");
  Builder builder(structure.family, dim, seed);
  std::vector<FormulaNode> per_view;
  for (std::size_t v = 0; v < view_lengths.size(); ++v)
    per_view.push_back(builder.view_formula(structure.id, v, view_lengths[v]));
  if (per_view.size() == 1)
    return std::move(per_view.front());
  auto w = builder.weights(per_view.size());
  return make_and(std::move(per_view), std::move(w), kInitBias);
}

} // namespace wstl

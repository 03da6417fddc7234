#pragma once

// Reading a trained tree back as one formula per class: every root-to-leaf
// path is a conjunction of node formulas (negated on violating branches),
// and a class formula is the disjunction of the paths ending in its leaves.
// Also: weight-based pruning and plain-text rendering for explanations.

#include "wstl/logic.hpp"
#include "wstl/tree.hpp"
#include "wstl/views.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace wstl {

struct PathLiteral {
  std::size_t node = 0;
  bool negated = false;

  friend bool operator==(const PathLiteral&, const PathLiteral&) = default;
};

struct PathFormula {
  std::vector<PathLiteral> literals; // empty conjunction = true
  std::size_t leaf = 0;
};

struct ClassFormula {
  int class_id = 0;
  std::vector<PathFormula> disjuncts; // empty disjunction = unsatisfiable

  bool unsatisfiable() const noexcept { return disjuncts.empty(); }
};

/// One formula per class of the tree, in class order.
std::vector<ClassFormula> tctf(const TreeClassifier& tree);

/// Soft formula for a class: an unweighted (unit weights, beta = 1) Or of
/// And-paths over the node formulas. Informational only; routing decisions
/// use per-node thresholding.
FormulaNode materialize(const TreeClassifier& tree, const ClassFormula& formula);

/// True when every literal of the path holds for the instance under the
/// node-level >= 0.5 decision (negation flips it).
bool path_holds(const TreeClassifier& tree, const PathFormula& path, const MultiViewInstance& instance);

struct RouteViolation {
  std::size_t instance = 0;
  int predicted = 0;
  std::vector<int> matched_classes;
};

struct RouteReport {
  std::size_t checked = 0;
  std::vector<RouteViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

/// Every instance must match exactly one class formula, and it must be the
/// class the tree predicts.
RouteReport route_consistency(const TreeClassifier& tree, std::span<const ClassFormula> formulas,
                              std::span<const MultiViewInstance> data);

struct DroppedTerm {
  std::string path; // child positions from the root, e.g. "0/2"
  std::size_t index = 0;
  double normalized_weight = 0.0;
};

struct PrunedFormula {
  FormulaNode formula;
  std::vector<DroppedTerm> dropped;
};

/// Drop And/Or children and temporal offsets whose normalized weight is
/// below `min_weight`, renormalize the survivors (dropped temporal offsets
/// keep weight 0) and collapse single-child And/Or nodes. A node never loses
/// its last term: if every weight is below the bar the largest survives.
PrunedFormula prune_by_weight(const FormulaNode& formula, double min_weight);

struct RenderOptions {
  std::vector<std::string> view_names{"x"};
  // Per view: indices at or past the base length are interval features.
  std::vector<std::size_t> base_lengths;
  std::vector<Aggregation> aggregations;
  std::size_t interval_len = 0;
  std::vector<std::string> feature_names; // per signal dimension
  bool show_weights = false;
  int digits = 4;
};

RenderOptions render_options_for(const TreeClassifier& tree);

std::string render_text(const FormulaNode& formula, const RenderOptions& options = {});

/// Surviving (positive-weight) offsets of a temporal node as "a..b, c".
std::string index_ranges(const FormulaNode& temporal);

} // namespace wstl

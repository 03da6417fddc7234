#pragma once

// Weighted signal temporal logic: signals, predicates, formula trees and the
// bounded truth-degree semantics.
//
// A formula is evaluated over one or more views of the same instance (raw,
// spectral, derivative). Every atom names the view it reads; single-signal
// evaluation is the one-view special case. Truth degrees live in [0, 1]:
//
//   atom      sigmoid(a_hat . x(k + offset) - u),   a_hat = a / |a|
//   not       1 - p
//   and       h(beta - sum_j wbar_j (1 - p_j))
//   or        h(1 - beta + sum_j wbar_j p_j)
//   eventually h(1 - beta + sum_k' wbar_k' p(k + k') 1(k + k' < K))
//   always     h(beta - sum_k' wbar_k' (1 - p(k + k')) 1(k + k' < K))
//
// with h the unit clamp and wbar the weights normalized over the full vector
// (masked window terms are zeroed, never renormalized).

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace wstl {

/// Samples x(0..K-1), each a p-dimensional vector, stored row-major.
class Signal {
public:
  Signal() = default;
  Signal(std::size_t dim, std::vector<double> samples);

  static Signal univariate(std::vector<double> values);

  std::size_t length() const noexcept { return dim_ == 0 ? 0 : samples_.size() / dim_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const double> at(std::size_t k) const;
  double value(std::size_t k, std::size_t feature) const { return samples_[k * dim_ + feature]; }
  const std::vector<double>& samples() const noexcept { return samples_; }

  friend bool operator==(const Signal&, const Signal&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<double> samples_;
};

enum class PredicateFamily { LinearHalfspace, AxisAligned };

std::string_view to_string(PredicateFamily family);
PredicateFamily predicate_family_from_string(std::string_view name);

/// Atomic predicate a^T x - u >= 0 with an unconstrained stored direction.
/// Evaluation always uses the unit-normalized direction.
struct Predicate {
  std::vector<double> direction;
  double threshold = 0.0;
  PredicateFamily family = PredicateFamily::LinearHalfspace;
  // axis-aligned only: the single component allowed to be nonzero
  std::size_t feature = 0;
  // index of the view the atom reads
  std::size_t view = 0;
  // fixed time shift, the atom reads x(k + offset)
  std::size_t offset = 0;

  std::size_t dim() const noexcept { return direction.size(); }

  /// Effective direction, norm exactly 1. Linear directions shorter than
  /// 1e-12 fall back to the first basis vector; axis-aligned directions are
  /// +-e_feature with the sign of the stored component (zero counts as +).
  std::vector<double> unit_direction() const;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

enum class NodeKind { True, Atom, Not, And, Or, Eventually, Always };

std::string_view to_string(NodeKind kind);

struct FormulaNode {
  NodeKind kind = NodeKind::True;
  std::vector<FormulaNode> children;
  // And/Or: one per child; Eventually/Always: one per window offset
  std::vector<double> weights;
  double bias = 0.0;
  std::size_t window_lo = 0;
  std::size_t window_hi = 0;
  std::optional<Predicate> predicate;

  bool is_temporal() const noexcept {
    return kind == NodeKind::Eventually || kind == NodeKind::Always;
  }
  bool is_weighted() const noexcept {
    return kind == NodeKind::And || kind == NodeKind::Or || is_temporal();
  }
  std::size_t window_width() const noexcept { return window_hi - window_lo + 1; }

  friend bool operator==(const FormulaNode&, const FormulaNode&) = default;
};

FormulaNode make_true();
FormulaNode make_atom(Predicate predicate);
FormulaNode make_not(FormulaNode child);
FormulaNode make_and(std::vector<FormulaNode> children, std::vector<double> weights, double bias);
FormulaNode make_or(std::vector<FormulaNode> children, std::vector<double> weights, double bias);
FormulaNode make_eventually(FormulaNode child, std::size_t lo, std::size_t hi,
                            std::vector<double> weights, double bias);
FormulaNode make_always(FormulaNode child, std::size_t lo, std::size_t hi,
                        std::vector<double> weights, double bias);

/// Structural checks (arity, weight lengths, nonnegative weights with a
/// positive entry, windows, predicate shape). Throws wstl::Error.
void validate(const FormulaNode& node);

/// View whose length bounds a temporal node's mask: the view read by the
/// atoms below it. Throws if the atoms disagree; empty when there are none.
std::optional<std::size_t> scope_view(const FormulaNode& node);

/// Number of learnable scalars (weights, biases, directions, thresholds).
std::size_t parameter_count(const FormulaNode& node);

// --- activation functions -------------------------------------------------

double clamp_unit(double z);

double eval_predicate(std::span<const double> x, const Predicate& predicate);

double and_af(std::span<const double> weights, double beta, std::span<const double> truths);
double or_af(std::span<const double> weights, double beta, std::span<const double> truths);

/// `valid` holds the indicator 1(k + k' < K) per window offset.
double eventually_af(std::span<const double> weights, double beta,
                     std::span<const double> truths, std::span<const bool> valid);
double always_af(std::span<const double> weights, double beta,
                 std::span<const double> truths, std::span<const bool> valid);

// --- formula evaluation ---------------------------------------------------

/// Truth degree p(x, node, k) over a multi-view input.
double eval_formula(std::span<const Signal> views, const FormulaNode& node, std::size_t k = 0);
double eval_formula(const Signal& signal, const FormulaNode& node, std::size_t k = 0);

} // namespace wstl

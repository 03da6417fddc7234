#pragma once

// Compiled form of a formula tree. Each node becomes one neuron whose
// parameters live in a flat vector, so the same object serves forward
// evaluation, reverse-mode gradients and optimizer updates.
//
// A forward pass computes every neuron's truth degree over the contiguous
// range of time indices its parent actually needs (one index at the root,
// the window-shifted range below a temporal operator). The tape keeps those
// traces plus the pre-clamp activations for the backward pass.

#include "wstl/logic.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wstl {

enum class ParamKind { Weight, Bias, Direction, Threshold };

class Network;

/// Per-forward-pass record. Reusable across instances with the same view
/// lengths; the range plan is only rebuilt when the shape changes.
class Tape {
public:
  double output() const noexcept { return output_; }

private:
  friend class Network;

  struct Range {
    std::size_t lo = 0;
    std::size_t hi = 0; // exclusive
    std::size_t slot = 0;
  };

  std::uint64_t plan_owner_ = 0; // id of the network that built the plan
  std::vector<std::size_t> plan_lengths_;
  std::size_t plan_time_ = 0;
  bool planned_ = false;
  std::vector<Range> ranges_;
  std::vector<double> values_;
  std::vector<double> pre_clamp_;
  std::vector<double> adjoint_;
  std::vector<double> wbar_;    // normalized weights, laid out like the parameters
  std::vector<double> unit_;    // unit directions, laid out like the parameters
  std::vector<double> weight_grad_; // d loss / d wbar scratch
  std::vector<double> unit_grad_;   // d loss / d a_hat scratch
  std::vector<const Signal*> views_;
  double output_ = 0.0;
};

class Network {
public:
  explicit Network(const FormulaNode& root);

  std::size_t parameter_count() const noexcept { return params_.size(); }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> parameters() noexcept { return params_; }
  std::span<const ParamKind> parameter_kinds() const noexcept { return kinds_; }
  std::size_t node_count() const noexcept { return ops_.size(); }

  /// Rebuild the formula tree with the current parameter values.
  FormulaNode to_formula() const;

  double forward(std::span<const Signal> views, std::size_t k, Tape& tape) const;

  /// Accumulate seed * d(output)/d(parameter) into `grad` for the pass
  /// recorded in `tape`. Clamp corners and saturated regions get zero.
  void backward(Tape& tape, double seed, std::span<double> grad) const;

  double evaluate(std::span<const Signal> views, std::size_t k = 0) const;

private:
  struct Op {
    NodeKind kind = NodeKind::True;
    std::vector<std::size_t> children;
    std::size_t weight_offset = 0;
    std::size_t weight_count = 0;
    std::size_t bias_offset = 0;
    std::size_t direction_offset = 0;
    std::size_t dim = 0;
    std::size_t threshold_offset = 0;
    PredicateFamily family = PredicateFamily::LinearHalfspace;
    std::size_t feature = 0;
    std::size_t view = 0;
    std::size_t shift = 0;
    std::size_t window_lo = 0;
    std::size_t window_hi = 0;
    std::size_t scope = 0;
    bool has_scope = false;
  };

  std::size_t compile(const FormulaNode& node);
  FormulaNode rebuild(std::size_t op) const;
  void plan(std::span<const Signal> views, std::size_t k, Tape& tape) const;
  void prepare_parameters(Tape& tape) const;

  std::vector<Op> ops_; // pre-order: parents precede children
  std::vector<double> params_;
  std::vector<ParamKind> kinds_;
  std::vector<std::size_t> referenced_views_;
  std::uint64_t id_ = 0; // unique per constructed network, keys tape plans
};

} // namespace wstl

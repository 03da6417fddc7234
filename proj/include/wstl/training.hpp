#pragma once

// Node classifier training: one-vs-rest label encoding, imbalance-weighted
// cross-entropy, reverse-mode gradients through the formula network, AdamW
// with a projection onto nonnegative weights, and the epoch loop that keeps
// the lowest-loss parameters.

#include "wstl/logic.hpp"
#include "wstl/network.hpp"
#include "wstl/views.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace wstl {

struct EncodedDataset {
  std::vector<const MultiViewInstance*> instances;
  std::vector<int> targets; // 1 iff the instance belongs to the positive class
  double imbalance_ratio = 0.0;

  std::size_t size() const noexcept { return instances.size(); }
  std::size_t positives() const;
};

/// Encode `class_id` vs rest; I_R = #negatives / #positives.
/// Throws EmptyClass when no instance carries the label.
EncodedDataset encode_labels(std::span<const MultiViewInstance> data, int class_id);
EncodedDataset encode_labels(std::span<const MultiViewInstance* const> data, int class_id);

struct TrainConfig {
  std::size_t epochs = 100;
  double learning_rate = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double weight_decay = 0.01;
  // 0 selects the default policy: full batch up to 256 instances, else 64.
  std::size_t batch_size = 0;
  double weight_floor = 1e-6;
  double probability_clamp = 1e-7;
  // Flip each fresh predicate direction towards the positive class before
  // training (the magnitudes stay at their initial values).
  bool orient_predicates = true;

  std::size_t resolved_batch_size(std::size_t n) const;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

/// Sum over the batch of -I_R y ln p - (1 - y) ln(1 - p), with p clamped to
/// [eps, 1 - eps].
double weighted_cross_entropy(std::span<const double> truths, std::span<const int> targets, double imbalance_ratio,
                              double probability_clamp);

/// Loss of `network` over the instances selected by `batch` (all if empty),
/// accumulating the gradient into `grad` when it is nonempty.
double loss_and_gradient(const Network& network, const EncodedDataset& data, std::span<const std::size_t> batch,
                         double probability_clamp, std::span<double> grad, Tape& tape);

class AdamW {
public:
  AdamW() = default;
  AdamW(std::size_t parameter_count, const TrainConfig& config);

  /// One decoupled-weight-decay step, then every Weight entry is floored at
  /// config.weight_floor.
  void step(std::span<double> params, std::span<const double> grad, std::span<const ParamKind> kinds);

  std::size_t steps() const noexcept { return step_; }
  const std::vector<double>& first_moment() const noexcept { return m_; }
  const std::vector<double>& second_moment() const noexcept { return v_; }

private:
  TrainConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::size_t step_ = 0;
};

struct NpcModel {
  FormulaNode formula;
  int class_id = 0;
  TrainConfig config;
  std::uint64_t seed = 0;
  AdamW optimizer;
  bool degenerate = false; // data had no positives or no negatives; formula is the template
  double best_loss = 0.0;
  std::vector<double> epoch_losses;

  double truth(const MultiViewInstance& x) const;
};

double loss(const NpcModel& model, const EncodedDataset& batch);

/// Gradient of the loss over `batch` w.r.t. the model's parameters in
/// Network(model.formula) layout.
std::vector<double> backward(const NpcModel& model, const EncodedDataset& batch);

/// Point every fresh predicate towards the side where positives sit: per
/// component, the sign of mean(positive) - mean(negative) of the samples the
/// atom reads (its own index, or the whole view under a temporal operator).
FormulaNode orient_predicates(const FormulaNode& formula, const EncodedDataset& data);

NpcModel train_npc(const EncodedDataset& data, const FormulaNode& initial, const TrainConfig& config, int class_id,
                   std::uint64_t seed);

} // namespace wstl

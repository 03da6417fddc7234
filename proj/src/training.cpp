#include "wstl/training.hpp"

#include "wstl/error.hpp"
#include "wstl/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wstl {

std::size_t EncodedDataset::positives() const {
  return static_cast<std::size_t>(std::count(targets.begin(), targets.end(), 1));
}

namespace {

EncodedDataset encode(std::vector<const MultiViewInstance*> instances, int class_id) {
  EncodedDataset out;
  out.targets.reserve(instances.size());
  for (const auto* x : instances)
    out.targets.push_back(x->label == class_id ? 1 : 0);
  out.instances = std::move(instances);
  const std::size_t pos = out.positives();
  if (pos == 0)
    fail(ErrorCode::EmptyClass, "class " + std::to_string(class_id) + " has no instances");
  out.imbalance_ratio = static_cast<double>(out.size() - pos) / static_cast<double>(pos);
  return out;
}

} // namespace

EncodedDataset encode_labels(std::span<const MultiViewInstance> data, int class_id) {
  std::vector<const MultiViewInstance*> ptrs;
  for (const auto& x : data)
    ptrs.push_back(&x);
  return encode(std::move(ptrs), class_id);
}

EncodedDataset encode_labels(std::span<const MultiViewInstance* const> data, int class_id) {
  return encode({data.begin(), data.end()}, class_id);
}

std::size_t TrainConfig::resolved_batch_size(std::size_t n) const {
  if (batch_size > 0)
    return std::min(batch_size, n);
  return n <= 256 ? n : std::min<std::size_t>(64, n);
}

double weighted_cross_entropy(std::span<const double> truths, std::span<const int> targets, double imbalance_ratio,
                              double probability_clamp) {
  if (truths.size() != targets.size())
    fail(ErrorCode::Shape, "truth and target counts differ");
  double total = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const double p = std::clamp(truths[i], probability_clamp, 1.0 - probability_clamp);
    total += targets[i] ? -imbalance_ratio * std::log(p) : -std::log(1.0 - p);
  }
  return total;
}

double loss_and_gradient(const Network& network, const EncodedDataset& data, std::span<const std::size_t> batch,
                         double probability_clamp, std::span<double> grad, Tape& tape) {
  const std::size_t n = batch.empty() ? data.size() : batch.size();
  double total = 0.0;
  for (std::size_t b = 0; b < n; ++b) {
    const std::size_t i = batch.empty() ? b : batch[b];
    const auto& views = data.instances[i]->views;
    const double p = network.forward(views, 0, tape);
    const bool positive = data.targets[i] == 1;
    const double clamped = std::clamp(p, probability_clamp, 1.0 - probability_clamp);
    total += positive ? -data.imbalance_ratio * std::log(clamped) : -std::log(1.0 - clamped);
    if (grad.empty())
      continue;
    if (p <= probability_clamp || p >= 1.0 - probability_clamp)
      continue;
    const double dp = positive ? -data.imbalance_ratio / p : 1.0 / (1.0 - p);
    if (dp != 0.0)
      network.backward(tape, dp, grad);
  }
  return total;
}

AdamW::AdamW(std::size_t parameter_count, const TrainConfig& config)
    : config_(config), m_(parameter_count, 0.0), v_(parameter_count, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grad, std::span<const ParamKind> kinds) {
  if (params.size() != m_.size() || grad.size() != m_.size() || kinds.size() != m_.size())
    fail(ErrorCode::Shape, "optimizer state does not match parameter count");
  ++step_;
  const double lr = config_.learning_rate;
  const double bc1 = 1.0 - std::pow(config_.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(config_.beta2, static_cast<double>(step_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] *= 1.0 - lr * config_.weight_decay;
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * grad[i];
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * grad[i] * grad[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + config_.adam_epsilon);
    if (kinds[i] == ParamKind::Weight && params[i] < config_.weight_floor)
      params[i] = config_.weight_floor;
  }
}

double NpcModel::truth(const MultiViewInstance& x) const { return Network(formula).evaluate(x.views); }

double loss(const NpcModel& model, const EncodedDataset& batch) {
  Network network(model.formula);
  Tape tape;
  return loss_and_gradient(network, batch, {}, model.config.probability_clamp, {}, tape);
}

std::vector<double> backward(const NpcModel& model, const EncodedDataset& batch) {
  Network network(model.formula);
  Tape tape;
  std::vector<double> grad(network.parameter_count(), 0.0);
  loss_and_gradient(network, batch, {}, model.config.probability_clamp, grad, tape);
  return grad;
}

namespace {

void orient(FormulaNode& node, const EncodedDataset& data, bool under_temporal) {
  const bool temporal = under_temporal || node.is_temporal();
  for (auto& child : node.children)
    orient(child, data, temporal);
  if (node.kind != NodeKind::Atom)
    return;
  Predicate& p = *node.predicate;
  const std::size_t dim = p.dim();
  std::vector<double> pos_sum(dim, 0.0), neg_sum(dim, 0.0);
  double pos_n = 0.0, neg_n = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Signal& sig = data.instances[i]->views.at(p.view);
    const std::size_t lo = temporal ? 0 : p.offset;
    const std::size_t hi = temporal ? sig.length() : p.offset + 1;
    auto& sums = data.targets[i] ? pos_sum : neg_sum;
    for (std::size_t k = lo; k < hi && k < sig.length(); ++k)
      for (std::size_t j = 0; j < dim; ++j)
        sums[j] += sig.value(k, j);
    (data.targets[i] ? pos_n : neg_n) += static_cast<double>(hi - lo);
  }
  if (pos_n == 0.0 || neg_n == 0.0)
    return;
  for (std::size_t j = 0; j < dim; ++j) {
    if (p.family == PredicateFamily::AxisAligned && j != p.feature)
      continue;
    const double diff = pos_sum[j] / pos_n - neg_sum[j] / neg_n;
    p.direction[j] = diff < 0.0 ? -std::abs(p.direction[j]) : std::abs(p.direction[j]);
  }
}

} // namespace

FormulaNode orient_predicates(const FormulaNode& formula, const EncodedDataset& data) {
  FormulaNode out = formula;
  orient(out, data, false);
  return out;
}

NpcModel train_npc(const EncodedDataset& data, const FormulaNode& initial, const TrainConfig& config, int class_id,
                   std::uint64_t seed) {
  NpcModel model;
  model.class_id = class_id;
  model.config = config;
  model.seed = seed;
  model.formula = initial;
  const std::size_t pos = data.positives();
  if (pos == 0 || pos == data.size()) {
    model.degenerate = true;
    return model;
  }
  if (config.orient_predicates)
    model.formula = orient_predicates(initial, data);

  Network network(model.formula);
  Tape tape;
  AdamW optimizer(network.parameter_count(), config);
  std::vector<double> grad(network.parameter_count());
  const std::size_t n = data.size();
  const std::size_t batch_size = config.resolved_batch_size(n);
  const bool full_batch = batch_size == n;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = make_rng(seed, {0x62617463u});

  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_params(network.parameters().begin(), network.parameters().end());
  auto consider = [&](double epoch_loss) {
    model.epoch_losses.push_back(epoch_loss);
    if (epoch_loss < best) {
      best = epoch_loss;
      best_params.assign(network.parameters().begin(), network.parameters().end());
    }
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (!full_batch)
      std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch_size) {
      const std::size_t stop = std::min(start + batch_size, n);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double batch_loss = loss_and_gradient(
          network, data, std::span<const std::size_t>(order.data() + start, stop - start),
          config.probability_clamp, grad, tape);
      // With full batches this forward pass already scores the parameters
      // the previous epoch ended with.
      if (full_batch && epoch > 0)
        consider(batch_loss);
      optimizer.step(network.parameters(), grad, network.parameter_kinds());
    }
    if (!full_batch)
      consider(loss_and_gradient(network, data, {}, config.probability_clamp, {}, tape));
  }
  if (full_batch && config.epochs > 0)
    consider(loss_and_gradient(network, data, {}, config.probability_clamp, {}, tape));

  std::copy(best_params.begin(), best_params.end(), network.parameters().begin());
  model.formula = network.to_formula();
  model.best_loss = config.epochs > 0 ? best : loss_and_gradient(network, data, {}, config.probability_clamp, {}, tape);
  model.optimizer = std::move(optimizer);
  return model;
}

} // namespace wstl

#include "wstl/logic.hpp"

#include "wstl/error.hpp"
#include "wstl/network.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace wstl {

std::string_view error_tag(ErrorCode code) {
  switch (code) {
  case ErrorCode::Domain: return "E_DOMAIN";
  case ErrorCode::Shape: return "E_SHAPE";
  case ErrorCode::DegenerateWeights: return "E_DEGENERATE_WEIGHTS";
  case ErrorCode::OutOfRange: return "E_OUT_OF_RANGE";
  case ErrorCode::EmptyClass: return "E_EMPTY_CLASS";
  case ErrorCode::Config: return "E_CONFIG";
  case ErrorCode::Format: return "E_FORMAT";
  case ErrorCode::Parse: return "E_PARSE";
  case ErrorCode::Empty: return "E_EMPTY";
  case ErrorCode::Io: return "E_IO";
  case ErrorCode::Schema: return "E_SCHEMA";
  case ErrorCode::UnsupportedVersion: return "E_UNSUPPORTED_VERSION";
  case ErrorCode::Integrity: return "E_INTEGRITY";
  case ErrorCode::Stratification: return "E_STRATIFICATION";
  case ErrorCode::Usage: return "E_USAGE";
  }
  return "E_INTERNAL";
}

// --- Signal ---------------------------------------------------------------

Signal::Signal(std::size_t dim, std::vector<double> samples) : dim_(dim), samples_(std::move(samples)) {
  if (dim_ == 0)
    fail(ErrorCode::Shape, "signal dimension must be positive");
  if (samples_.empty() || samples_.size() % dim_ != 0)
    fail(ErrorCode::Shape, "signal needs K >= 1 samples of dimension " + std::to_string(dim_));
}

Signal Signal::univariate(std::vector<double> values) { return Signal(1, std::move(values)); }

std::span<const double> Signal::at(std::size_t k) const {
  if (k >= length())
    fail(ErrorCode::OutOfRange,
         "time index " + std::to_string(k) + " outside signal of length " + std::to_string(length()));
  return {samples_.data() + k * dim_, dim_};
}

// --- Predicate ------------------------------------------------------------

std::string_view to_string(PredicateFamily family) {
  return family == PredicateFamily::AxisAligned ? "axis" : "linear";
}

PredicateFamily predicate_family_from_string(std::string_view name) {
  if (name == "linear")
    return PredicateFamily::LinearHalfspace;
  if (name == "axis")
    return PredicateFamily::AxisAligned;
  fail(ErrorCode::Config, "unknown predicate family '" + std::string(name) + "'");
}

std::vector<double> Predicate::unit_direction() const {
  std::vector<double> unit(direction.size(), 0.0);
  if (unit.empty())
    return unit;
  if (family == PredicateFamily::AxisAligned) {
    unit[feature] = direction[feature] < 0.0 ? -1.0 : 1.0;
    return unit;
  }
  double norm = std::sqrt(std::inner_product(direction.begin(), direction.end(), direction.begin(), 0.0));
  if (norm < 1e-12) {
    unit[0] = 1.0;
    return unit;
  }
  for (std::size_t j = 0; j < unit.size(); ++j)
    unit[j] = direction[j] / norm;
  return unit;
}

// --- FormulaNode ----------------------------------------------------------

std::string_view to_string(NodeKind kind) {
  switch (kind) {
  case NodeKind::True: return "true";
  case NodeKind::Atom: return "atom";
  case NodeKind::Not: return "not";
  case NodeKind::And: return "and";
  case NodeKind::Or: return "or";
  case NodeKind::Eventually: return "eventually";
  case NodeKind::Always: return "always";
  }
  return "?";
}

FormulaNode make_true() { return FormulaNode{}; }

FormulaNode make_atom(Predicate predicate) {
  FormulaNode node;
  node.kind = NodeKind::Atom;
  node.predicate = std::move(predicate);
  return node;
}

FormulaNode make_not(FormulaNode child) {
  FormulaNode node;
  node.kind = NodeKind::Not;
  node.children.push_back(std::move(child));
  return node;
}

namespace {

FormulaNode make_connective(NodeKind kind, std::vector<FormulaNode> children, std::vector<double> weights,
                            double bias) {
  FormulaNode node;
  node.kind = kind;
  node.children = std::move(children);
  node.weights = std::move(weights);
  node.bias = bias;
  return node;
}

FormulaNode make_temporal(NodeKind kind, FormulaNode child, std::size_t lo, std::size_t hi,
                          std::vector<double> weights, double bias) {
  FormulaNode node;
  node.kind = kind;
  node.children.push_back(std::move(child));
  node.window_lo = lo;
  node.window_hi = hi;
  node.weights = std::move(weights);
  node.bias = bias;
  return node;
}

void check_weights(std::span<const double> weights) {
  bool positive = false;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      fail(ErrorCode::Domain, "weights must be finite and nonnegative");
    positive = positive || w > 0.0;
  }
  if (!positive)
    fail(ErrorCode::DegenerateWeights, "weight vector has no positive entry");
}

double weight_sum(std::span<const double> weights) {
  check_weights(weights);
  return std::accumulate(weights.begin(), weights.end(), 0.0);
}

} // namespace

FormulaNode make_and(std::vector<FormulaNode> children, std::vector<double> weights, double bias) {
  return make_connective(NodeKind::And, std::move(children), std::move(weights), bias);
}

FormulaNode make_or(std::vector<FormulaNode> children, std::vector<double> weights, double bias) {
  return make_connective(NodeKind::Or, std::move(children), std::move(weights), bias);
}

FormulaNode make_eventually(FormulaNode child, std::size_t lo, std::size_t hi, std::vector<double> weights,
                            double bias) {
  return make_temporal(NodeKind::Eventually, std::move(child), lo, hi, std::move(weights), bias);
}

FormulaNode make_always(FormulaNode child, std::size_t lo, std::size_t hi, std::vector<double> weights,
                        double bias) {
  return make_temporal(NodeKind::Always, std::move(child), lo, hi, std::move(weights), bias);
}

void validate(const FormulaNode& node) {
  const auto kind_name = std::string(to_string(node.kind));
  switch (node.kind) {
  case NodeKind::True:
  case NodeKind::Atom:
    if (!node.children.empty())
      fail(ErrorCode::Format, kind_name + " node cannot have children");
    if (!node.weights.empty())
      fail(ErrorCode::Format, kind_name + " node carries no weights");
    if (node.kind == NodeKind::Atom) {
      if (!node.predicate)
        fail(ErrorCode::Format, "atom node without predicate");
      const Predicate& p = *node.predicate;
      if (p.direction.empty())
        fail(ErrorCode::Shape, "predicate direction must be nonempty");
      if (!std::isfinite(p.threshold))
        fail(ErrorCode::Domain, "predicate threshold must be finite");
      for (double a : p.direction)
        if (!std::isfinite(a))
          fail(ErrorCode::Domain, "predicate direction must be finite");
      if (p.family == PredicateFamily::AxisAligned) {
        if (p.feature >= p.direction.size())
          fail(ErrorCode::Shape, "axis-aligned feature index out of range");
        for (std::size_t j = 0; j < p.direction.size(); ++j)
          if (j != p.feature && p.direction[j] != 0.0)
            fail(ErrorCode::Format, "axis-aligned predicate has off-axis components");
      }
    } else if (node.predicate) {
      fail(ErrorCode::Format, "true node carries a predicate");
    }
    return;
  case NodeKind::Not:
    if (node.children.size() != 1)
      fail(ErrorCode::Format, "not node needs exactly one child");
    if (!node.weights.empty())
      fail(ErrorCode::Format, "not node carries no weights");
    break;
  case NodeKind::And:
  case NodeKind::Or:
    if (node.children.size() < 2)
      fail(ErrorCode::Format, kind_name + " node needs at least two children");
    if (node.weights.size() != node.children.size())
      fail(ErrorCode::Shape, kind_name + " node needs one weight per child");
    check_weights(node.weights);
    break;
  case NodeKind::Eventually:
  case NodeKind::Always:
    if (node.children.size() != 1)
      fail(ErrorCode::Format, kind_name + " node needs exactly one child");
    if (node.window_lo > node.window_hi)
      fail(ErrorCode::Format, kind_name + " window needs k1 <= k2");
    if (node.weights.size() != node.window_width())
      fail(ErrorCode::Shape, kind_name + " weight count must equal window width");
    check_weights(node.weights);
    break;
  }
  if (node.is_weighted() && !std::isfinite(node.bias))
    fail(ErrorCode::Domain, "bias must be finite");
  if (node.predicate)
    fail(ErrorCode::Format, kind_name + " node carries a predicate");
  for (const auto& child : node.children)
    validate(child);
  if (node.is_temporal())
    (void)scope_view(node);
}

namespace {

void collect_views(const FormulaNode& node, std::optional<std::size_t>& found) {
  if (node.kind == NodeKind::Atom) {
    if (found && *found != node.predicate->view)
      fail(ErrorCode::Format, "temporal operator spans atoms of different views");
    found = node.predicate->view;
    return;
  }
  for (const auto& child : node.children)
    collect_views(child, found);
}

} // namespace

std::optional<std::size_t> scope_view(const FormulaNode& node) {
  std::optional<std::size_t> found;
  collect_views(node, found);
  return found;
}

std::size_t parameter_count(const FormulaNode& node) {
  std::size_t count = 0;
  if (node.is_weighted())
    count += node.weights.size() + 1;
  if (node.kind == NodeKind::Atom)
    count += node.predicate->dim() + 1;
  for (const auto& child : node.children)
    count += parameter_count(child);
  return count;
}

// --- activation functions -------------------------------------------------

double clamp_unit(double z) {
  if (!std::isfinite(z))
    fail(ErrorCode::Domain, "clamp_unit of a non-finite value");
  return std::max(0.0, std::min(z, 1.0));
}

double eval_predicate(std::span<const double> x, const Predicate& predicate) {
  if (x.size() != predicate.dim())
    fail(ErrorCode::Shape, "sample dimension " + std::to_string(x.size()) + " does not match predicate dimension " +
                               std::to_string(predicate.dim()));
  const auto unit = predicate.unit_direction();
  double r = -predicate.threshold;
  for (std::size_t j = 0; j < x.size(); ++j)
    r += unit[j] * x[j];
  return 1.0 / (1.0 + std::exp(-r));
}

namespace {

void check_lengths(std::span<const double> weights, std::span<const double> truths) {
  if (weights.empty() || weights.size() != truths.size())
    fail(ErrorCode::Shape, "weights and truth degrees need the same nonzero length");
}

} // namespace

double and_af(std::span<const double> weights, double beta, std::span<const double> truths) {
  check_lengths(weights, truths);
  const double total = weight_sum(weights);
  double z = beta;
  for (std::size_t j = 0; j < weights.size(); ++j)
    z -= weights[j] / total * (1.0 - truths[j]);
  return clamp_unit(z);
}

double or_af(std::span<const double> weights, double beta, std::span<const double> truths) {
  check_lengths(weights, truths);
  const double total = weight_sum(weights);
  double z = 1.0 - beta;
  for (std::size_t j = 0; j < weights.size(); ++j)
    z += weights[j] / total * truths[j];
  return clamp_unit(z);
}

double eventually_af(std::span<const double> weights, double beta, std::span<const double> truths,
                     std::span<const bool> valid) {
  check_lengths(weights, truths);
  if (valid.size() != weights.size())
    fail(ErrorCode::Shape, "mask length must equal window width");
  const double total = weight_sum(weights);
  double z = 1.0 - beta;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (valid[j])
      z += weights[j] / total * truths[j];
  return clamp_unit(z);
}

double always_af(std::span<const double> weights, double beta, std::span<const double> truths,
                 std::span<const bool> valid) {
  check_lengths(weights, truths);
  if (valid.size() != weights.size())
    fail(ErrorCode::Shape, "mask length must equal window width");
  const double total = weight_sum(weights);
  double z = beta;
  for (std::size_t j = 0; j < weights.size(); ++j)
    if (valid[j])
      z -= weights[j] / total * (1.0 - truths[j]);
  return clamp_unit(z);
}

// --- evaluation -----------------------------------------------------------

double eval_formula(std::span<const Signal> views, const FormulaNode& node, std::size_t k) {
  return Network(node).evaluate(views, k);
}

double eval_formula(const Signal& signal, const FormulaNode& node, std::size_t k) {
  return eval_formula(std::span<const Signal>(&signal, 1), node, k);
}

} // namespace wstl

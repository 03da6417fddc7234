#include "wstl/network.hpp"

#include "wstl/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

namespace wstl {

namespace {

inline double unit_clamp(double z) { return z <= 0.0 ? 0.0 : (z >= 1.0 ? 1.0 : z); }
inline bool interior(double z) { return z > 0.0 && z < 1.0; }

} // namespace

namespace {
std::atomic<std::uint64_t> next_network_id{1};
}

Network::Network(const FormulaNode& root) : id_(next_network_id.fetch_add(1, std::memory_order_relaxed)) {
  validate(root);
  compile(root);
  std::set<std::size_t> views;
  for (const auto& op : ops_)
    if (op.kind == NodeKind::Atom)
      views.insert(op.view);
  referenced_views_.assign(views.begin(), views.end());
}

std::size_t Network::compile(const FormulaNode& node) {
  const std::size_t index = ops_.size();
  ops_.emplace_back();
  {
    Op& op = ops_.back();
    op.kind = node.kind;
    if (node.is_weighted()) {
      op.weight_offset = params_.size();
      op.weight_count = node.weights.size();
      params_.insert(params_.end(), node.weights.begin(), node.weights.end());
      kinds_.insert(kinds_.end(), node.weights.size(), ParamKind::Weight);
      op.bias_offset = params_.size();
      params_.push_back(node.bias);
      kinds_.push_back(ParamKind::Bias);
    }
    if (node.is_temporal()) {
      op.window_lo = node.window_lo;
      op.window_hi = node.window_hi;
      if (auto scope = scope_view(node)) {
        op.scope = *scope;
        op.has_scope = true;
      }
    }
    if (node.kind == NodeKind::Atom) {
      const Predicate& p = *node.predicate;
      op.direction_offset = params_.size();
      op.dim = p.dim();
      params_.insert(params_.end(), p.direction.begin(), p.direction.end());
      kinds_.insert(kinds_.end(), p.dim(), ParamKind::Direction);
      op.threshold_offset = params_.size();
      params_.push_back(p.threshold);
      kinds_.push_back(ParamKind::Threshold);
      op.family = p.family;
      op.feature = p.feature;
      op.view = p.view;
      op.shift = p.offset;
    }
  }
  std::vector<std::size_t> children;
  for (const auto& child : node.children)
    children.push_back(compile(child));
  ops_[index].children = std::move(children);
  return index;
}

FormulaNode Network::to_formula() const { return rebuild(0); }

FormulaNode Network::rebuild(std::size_t index) const {
  const Op& op = ops_[index];
  FormulaNode node;
  node.kind = op.kind;
  for (std::size_t child : op.children)
    node.children.push_back(rebuild(child));
  if (op.kind == NodeKind::And || op.kind == NodeKind::Or || op.kind == NodeKind::Eventually ||
      op.kind == NodeKind::Always) {
    node.weights.assign(params_.begin() + op.weight_offset, params_.begin() + op.weight_offset + op.weight_count);
    node.bias = params_[op.bias_offset];
  }
  if (op.kind == NodeKind::Eventually || op.kind == NodeKind::Always) {
    node.window_lo = op.window_lo;
    node.window_hi = op.window_hi;
  }
  if (op.kind == NodeKind::Atom) {
    Predicate p;
    p.direction.assign(params_.begin() + op.direction_offset, params_.begin() + op.direction_offset + op.dim);
    p.threshold = params_[op.threshold_offset];
    p.family = op.family;
    p.feature = op.feature;
    p.view = op.view;
    p.offset = op.shift;
    node.predicate = std::move(p);
  }
  return node;
}

void Network::plan(std::span<const Signal> views, std::size_t k, Tape& tape) const {
  if (views.empty())
    fail(ErrorCode::Shape, "formula evaluation needs at least one view");
  std::vector<std::size_t> lengths;
  lengths.reserve(views.size());
  for (const auto& v : views)
    lengths.push_back(v.length());
  if (tape.planned_ && tape.plan_owner_ == id_ && tape.plan_time_ == k && tape.plan_lengths_ == lengths)
    return;

  for (const auto& op : ops_) {
    if (op.kind != NodeKind::Atom)
      continue;
    if (op.view >= views.size())
      fail(ErrorCode::Shape, "atom reads view " + std::to_string(op.view) + " but only " +
                                 std::to_string(views.size()) + " views were given");
    if (views[op.view].dim() != op.dim)
      fail(ErrorCode::Shape, "view dimension " + std::to_string(views[op.view].dim()) +
                                 " does not match predicate dimension " + std::to_string(op.dim));
  }
  std::size_t horizon = lengths[0];
  if (!referenced_views_.empty()) {
    horizon = lengths[referenced_views_.front()];
    for (std::size_t v : referenced_views_)
      horizon = std::min(horizon, lengths[v]);
  }
  if (k >= horizon)
    fail(ErrorCode::OutOfRange,
         "time index " + std::to_string(k) + " outside signal of length " + std::to_string(horizon));

  auto& ranges = tape.ranges_;
  ranges.assign(ops_.size(), {});
  ranges[0] = {k, k + 1, 0};
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    const auto parent = ranges[i];
    const bool empty = parent.lo >= parent.hi;
    if (op.kind == NodeKind::Atom && !empty && parent.hi - 1 + op.shift >= lengths[op.view])
      fail(ErrorCode::OutOfRange, "atom at time " + std::to_string(parent.hi - 1 + op.shift) +
                                      " outside view of length " + std::to_string(lengths[op.view]));
    for (std::size_t c : op.children) {
      Tape::Range r{};
      if (!empty) {
        if (op.kind == NodeKind::Eventually || op.kind == NodeKind::Always) {
          const std::size_t limit = op.has_scope ? lengths[op.scope] : lengths[0];
          const std::size_t lo = parent.lo + op.window_lo;
          const std::size_t last = std::min(parent.hi - 1 + op.window_hi, limit - 1);
          if (lo <= last && lo < limit)
            r = {lo, last + 1, 0};
        } else {
          r = {parent.lo, parent.hi, 0};
        }
      }
      ranges[c] = r;
    }
  }
  std::size_t slot = 0;
  for (auto& r : ranges) {
    r.slot = slot;
    slot += r.hi > r.lo ? r.hi - r.lo : 0;
  }
  tape.values_.assign(slot, 0.0);
  tape.pre_clamp_.assign(slot, 0.0);
  tape.adjoint_.assign(slot, 0.0);
  tape.plan_lengths_ = std::move(lengths);
  tape.plan_time_ = k;
  tape.plan_owner_ = id_;
  tape.planned_ = true;
}

void Network::prepare_parameters(Tape& tape) const {
  tape.wbar_.assign(params_.size(), 0.0);
  tape.unit_.assign(params_.size(), 0.0);
  for (const auto& op : ops_) {
    if (op.weight_count > 0) {
      double total = 0.0;
      bool positive = false;
      for (std::size_t j = 0; j < op.weight_count; ++j) {
        const double w = params_[op.weight_offset + j];
        if (!std::isfinite(w) || w < 0.0)
          fail(ErrorCode::Domain, "weights must be finite and nonnegative");
        positive = positive || w > 0.0;
        total += w;
      }
      if (!positive)
        fail(ErrorCode::DegenerateWeights, "weight vector has no positive entry");
      for (std::size_t j = 0; j < op.weight_count; ++j)
        tape.wbar_[op.weight_offset + j] = params_[op.weight_offset + j] / total;
    }
    if (op.kind == NodeKind::Atom) {
      const double* a = params_.data() + op.direction_offset;
      double* unit = tape.unit_.data() + op.direction_offset;
      if (op.family == PredicateFamily::AxisAligned) {
        unit[op.feature] = a[op.feature] < 0.0 ? -1.0 : 1.0;
      } else {
        double norm = std::sqrt(std::inner_product(a, a + op.dim, a, 0.0));
        if (norm < 1e-12) {
          unit[0] = 1.0;
        } else {
          for (std::size_t j = 0; j < op.dim; ++j)
            unit[j] = a[j] / norm;
        }
      }
    }
  }
}

double Network::forward(std::span<const Signal> views, std::size_t k, Tape& tape) const {
  plan(views, k, tape);
  prepare_parameters(tape);
  tape.views_.assign(views.size(), nullptr);
  for (std::size_t v = 0; v < views.size(); ++v)
    tape.views_[v] = &views[v];

  const auto& ranges = tape.ranges_;
  double* values = tape.values_.data();
  double* pre = tape.pre_clamp_.data();

  for (std::size_t i = ops_.size(); i-- > 0;) {
    const Op& op = ops_[i];
    const auto r = ranges[i];
    if (r.lo >= r.hi)
      continue;
    double* out = values + r.slot;
    double* z_out = pre + r.slot;
    const std::size_t n = r.hi - r.lo;
    switch (op.kind) {
    case NodeKind::True:
      std::fill(out, out + n, 1.0);
      break;
    case NodeKind::Atom: {
      const Signal& sig = views[op.view];
      const double* unit = tape.unit_.data() + op.direction_offset;
      const double u = params_[op.threshold_offset];
      const double* x = sig.samples().data();
      for (std::size_t t = 0; t < n; ++t) {
        const double* sample = x + (r.lo + t + op.shift) * op.dim;
        double act = -u;
        for (std::size_t j = 0; j < op.dim; ++j)
          act += unit[j] * sample[j];
        z_out[t] = act;
        out[t] = 1.0 / (1.0 + std::exp(-act));
      }
      break;
    }
    case NodeKind::Not: {
      // not not phi reads phi directly: 1 - (1 - p) need not round back to p
      const auto& inner = ops_[op.children[0]];
      if (inner.kind == NodeKind::Not) {
        const double* grandchild = values + ranges[inner.children[0]].slot;
        std::copy(grandchild, grandchild + n, out);
        break;
      }
      const double* child = values + ranges[op.children[0]].slot;
      for (std::size_t t = 0; t < n; ++t)
        out[t] = 1.0 - child[t];
      break;
    }
    case NodeKind::And:
    case NodeKind::Or: {
      const double beta = params_[op.bias_offset];
      const double* wbar = tape.wbar_.data() + op.weight_offset;
      const bool is_and = op.kind == NodeKind::And;
      for (std::size_t t = 0; t < n; ++t) {
        double z = is_and ? beta : 1.0 - beta;
        for (std::size_t j = 0; j < op.children.size(); ++j) {
          const auto cr = ranges[op.children[j]];
          const double p = values[cr.slot + t];
          if (is_and)
            z -= wbar[j] * (1.0 - p);
          else
            z += wbar[j] * p;
        }
        z_out[t] = z;
        out[t] = unit_clamp(z);
      }
      break;
    }
    case NodeKind::Eventually:
    case NodeKind::Always: {
      const double beta = params_[op.bias_offset];
      const double* wbar = tape.wbar_.data() + op.weight_offset;
      const auto cr = ranges[op.children[0]];
      const double* child = values + cr.slot;
      const bool is_always = op.kind == NodeKind::Always;
      for (std::size_t t = 0; t < n; ++t) {
        const std::size_t time = r.lo + t;
        double z = is_always ? beta : 1.0 - beta;
        if (cr.hi > cr.lo && time + op.window_lo < cr.hi) {
          const std::size_t last = std::min(op.window_hi, cr.hi - 1 - time);
          const double* c = child + (time + op.window_lo - cr.lo);
          const double* w = wbar;
          const std::size_t count = last - op.window_lo + 1;
          double acc = 0.0;
          if (is_always) {
            for (std::size_t j = 0; j < count; ++j)
              acc += w[j] * (1.0 - c[j]);
            z -= acc;
          } else {
            for (std::size_t j = 0; j < count; ++j)
              acc += w[j] * c[j];
            z += acc;
          }
        }
        z_out[t] = z;
        out[t] = unit_clamp(z);
      }
      break;
    }
    }
  }
  tape.output_ = values[ranges[0].slot];
  return tape.output_;
}

void Network::backward(Tape& tape, double seed, std::span<double> grad) const {
  if (grad.size() != params_.size())
    fail(ErrorCode::Shape, "gradient buffer does not match parameter count");
  const auto& ranges = tape.ranges_;
  const double* values = tape.values_.data();
  const double* pre = tape.pre_clamp_.data();
  double* adj = tape.adjoint_.data();
  std::fill(tape.adjoint_.begin(), tape.adjoint_.end(), 0.0);
  tape.weight_grad_.assign(params_.size(), 0.0);
  tape.unit_grad_.assign(params_.size(), 0.0);
  adj[ranges[0].slot] = seed;

  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const Op& op = ops_[i];
    const auto r = ranges[i];
    if (r.lo >= r.hi)
      continue;
    const std::size_t n = r.hi - r.lo;
    const double* g = adj + r.slot;
    const double* out = values + r.slot;
    const double* z = pre + r.slot;
    switch (op.kind) {
    case NodeKind::True:
      break;
    case NodeKind::Atom: {
      const Signal& sig = *tape.views_[op.view];
      const double* x = sig.samples().data();
      double* du = tape.unit_grad_.data() + op.direction_offset;
      double dthreshold = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        if (g[t] == 0.0)
          continue;
        const double ds = g[t] * out[t] * (1.0 - out[t]);
        dthreshold -= ds;
        const double* sample = x + (r.lo + t + op.shift) * op.dim;
        for (std::size_t j = 0; j < op.dim; ++j)
          du[j] += ds * sample[j];
      }
      grad[op.threshold_offset] += dthreshold;
      if (op.family == PredicateFamily::LinearHalfspace) {
        const double* a = params_.data() + op.direction_offset;
        const double norm = std::sqrt(std::inner_product(a, a + op.dim, a, 0.0));
        if (norm >= 1e-12) {
          const double* unit = tape.unit_.data() + op.direction_offset;
          const double proj = std::inner_product(unit, unit + op.dim, du, 0.0);
          for (std::size_t j = 0; j < op.dim; ++j)
            grad[op.direction_offset + j] += (du[j] - unit[j] * proj) / norm;
        }
      }
      break;
    }
    case NodeKind::Not: {
      double* child = adj + ranges[op.children[0]].slot;
      for (std::size_t t = 0; t < n; ++t)
        child[t] -= g[t];
      break;
    }
    case NodeKind::And:
    case NodeKind::Or: {
      const double* wbar = tape.wbar_.data() + op.weight_offset;
      double* dw = tape.weight_grad_.data() + op.weight_offset;
      const bool is_and = op.kind == NodeKind::And;
      double dbias = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        if (g[t] == 0.0 || !interior(z[t]))
          continue;
        const double dz = g[t];
        dbias += is_and ? dz : -dz;
        for (std::size_t j = 0; j < op.children.size(); ++j) {
          const std::size_t slot = ranges[op.children[j]].slot + t;
          adj[slot] += dz * wbar[j];
          dw[j] += is_and ? -dz * (1.0 - values[slot]) : dz * values[slot];
        }
      }
      grad[op.bias_offset] += dbias;
      break;
    }
    case NodeKind::Eventually:
    case NodeKind::Always: {
      const double* wbar = tape.wbar_.data() + op.weight_offset;
      double* dw = tape.weight_grad_.data() + op.weight_offset;
      const auto cr = ranges[op.children[0]];
      const bool is_always = op.kind == NodeKind::Always;
      double dbias = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        if (g[t] == 0.0 || !interior(z[t]))
          continue;
        const double dz = g[t];
        dbias += is_always ? dz : -dz;
        const std::size_t time = r.lo + t;
        if (cr.hi <= cr.lo || time + op.window_lo >= cr.hi)
          continue;
        const std::size_t last = std::min(op.window_hi, cr.hi - 1 - time);
        const std::size_t count = last - op.window_lo + 1;
        const std::size_t base = time + op.window_lo - cr.lo;
        const double* c = values + cr.slot + base;
        double* ca = adj + cr.slot + base;
        for (std::size_t j = 0; j < count; ++j)
          ca[j] += dz * wbar[j];
        if (is_always) {
          for (std::size_t j = 0; j < count; ++j)
            dw[j] -= dz * (1.0 - c[j]);
        } else {
          for (std::size_t j = 0; j < count; ++j)
            dw[j] += dz * c[j];
        }
      }
      grad[op.bias_offset] += dbias;
      break;
    }
    }
    if (op.weight_count > 0) {
      const double* w = params_.data() + op.weight_offset;
      const double* wbar = tape.wbar_.data() + op.weight_offset;
      const double* dw = tape.weight_grad_.data() + op.weight_offset;
      double total = 0.0;
      double dot = 0.0;
      for (std::size_t j = 0; j < op.weight_count; ++j) {
        total += w[j];
        dot += dw[j] * wbar[j];
      }
      for (std::size_t j = 0; j < op.weight_count; ++j)
        grad[op.weight_offset + j] += (dw[j] - dot) / total;
    }
  }
}

double Network::evaluate(std::span<const Signal> views, std::size_t k) const {
  Tape tape;
  return forward(views, k, tape);
}

} // namespace wstl

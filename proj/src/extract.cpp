#include "wstl/extract.hpp"

#include "wstl/error.hpp"
#include "wstl/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace wstl {

std::vector<ClassFormula> tctf(const TreeClassifier& tree) {
  std::map<int, ClassFormula> by_class;
  for (int c : tree.classes)
    by_class[c].class_id = c;

  struct Frame {
    std::size_t node;
    std::vector<PathLiteral> literals;
  };
  std::vector<Frame> stack{{0, {}}};
  while (!stack.empty()) {
    Frame frame = std::move(stack.back());
    stack.pop_back();
    const TreeNode& node = tree.nodes.at(frame.node);
    if (node.is_leaf()) {
      auto& entry = by_class[node.leaf_class];
      entry.class_id = node.leaf_class;
      entry.disjuncts.push_back({std::move(frame.literals), frame.node});
      continue;
    }
    auto right = frame.literals;
    right.push_back({frame.node, true});
    auto left = std::move(frame.literals);
    left.push_back({frame.node, false});
    // left subtree first in the output order
    stack.push_back({*node.right, std::move(right)});
    stack.push_back({*node.left, std::move(left)});
  }
  std::vector<ClassFormula> out;
  for (auto& [c, f] : by_class)
    out.push_back(std::move(f));
  return out;
}

FormulaNode materialize(const TreeClassifier& tree, const ClassFormula& formula) {
  if (formula.unsatisfiable())
    return make_not(make_true());
  std::vector<FormulaNode> paths;
  for (const auto& path : formula.disjuncts) {
    std::vector<FormulaNode> conjuncts;
    for (const auto& lit : path.literals) {
      const FormulaNode& f = tree.nodes.at(lit.node).split->formula;
      conjuncts.push_back(lit.negated ? make_not(f) : f);
    }
    if (conjuncts.empty())
      paths.push_back(make_true());
    else if (conjuncts.size() == 1)
      paths.push_back(std::move(conjuncts.front()));
    else {
      const std::size_t n = conjuncts.size();
      paths.push_back(make_and(std::move(conjuncts), std::vector<double>(n, 1.0), 1.0));
    }
  }
  if (paths.size() == 1)
    return std::move(paths.front());
  const std::size_t n = paths.size();
  return make_or(std::move(paths), std::vector<double>(n, 1.0), 1.0);
}

namespace {

bool node_decision(const TreeClassifier& tree, std::size_t node, const MultiViewInstance& instance) {
  return Network(tree.nodes.at(node).split->formula).evaluate(instance.views) >= kSatisfactionThreshold;
}

} // namespace

bool path_holds(const TreeClassifier& tree, const PathFormula& path, const MultiViewInstance& instance) {
  for (const auto& lit : path.literals)
    if (node_decision(tree, lit.node, instance) == lit.negated)
      return false;
  return true;
}

RouteReport route_consistency(const TreeClassifier& tree, std::span<const ClassFormula> formulas,
                              std::span<const MultiViewInstance> data) {
  // Compile every internal node once.
  std::vector<std::optional<Network>> networks(tree.nodes.size());
  for (const auto& node : tree.nodes)
    if (!node.is_leaf())
      networks[node.index].emplace(node.split->formula);

  RouteReport report;
  Tape tape;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::map<std::size_t, bool> decisions;
    auto decide = [&](std::size_t node) {
      auto it = decisions.find(node);
      if (it != decisions.end())
        return it->second;
      const bool d = networks.at(node)->forward(data[i].views, 0, tape) >= kSatisfactionThreshold;
      decisions.emplace(node, d);
      return d;
    };
    std::vector<int> matched;
    for (const auto& cf : formulas) {
      const bool hit = std::any_of(cf.disjuncts.begin(), cf.disjuncts.end(), [&](const PathFormula& path) {
        return std::all_of(path.literals.begin(), path.literals.end(),
                           [&](const PathLiteral& lit) { return decide(lit.node) != lit.negated; });
      });
      if (hit)
        matched.push_back(cf.class_id);
    }
    const int predicted = predict(tree, data[i]);
    ++report.checked;
    if (matched.size() != 1 || matched.front() != predicted)
      report.violations.push_back({i, predicted, std::move(matched)});
  }
  return report;
}

// --- pruning --------------------------------------------------------------

namespace {

std::vector<double> normalized(const std::vector<double>& w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    out[i] = w[i] / total;
  return out;
}

FormulaNode prune(const FormulaNode& node, double min_weight, const std::string& path,
                  std::vector<DroppedTerm>& dropped) {
  auto child_path = [&](std::size_t i) { return path.empty() ? std::to_string(i) : path + "/" + std::to_string(i); };

  if (node.kind == NodeKind::Not) {
    return make_not(prune(node.children.front(), min_weight, child_path(0), dropped));
  }
  if (!node.is_weighted())
    return node;

  const auto wbar = normalized(node.weights);
  std::vector<bool> keep(wbar.size());
  bool any = false;
  for (std::size_t i = 0; i < wbar.size(); ++i) {
    keep[i] = wbar[i] >= min_weight;
    any = any || keep[i];
  }
  if (!any)
    keep[static_cast<std::size_t>(std::max_element(wbar.begin(), wbar.end()) - wbar.begin())] = true;
  for (std::size_t i = 0; i < wbar.size(); ++i)
    if (!keep[i])
      dropped.push_back({path, i, wbar[i]});

  double kept_total = 0.0;
  for (std::size_t i = 0; i < wbar.size(); ++i)
    if (keep[i])
      kept_total += wbar[i];

  if (node.is_temporal()) {
    FormulaNode out = node;
    for (std::size_t i = 0; i < wbar.size(); ++i)
      out.weights[i] = keep[i] ? wbar[i] / kept_total : 0.0;
    out.children.front() = prune(node.children.front(), min_weight, child_path(0), dropped);
    return out;
  }

  std::vector<FormulaNode> children;
  std::vector<double> weights;
  for (std::size_t i = 0; i < wbar.size(); ++i) {
    if (!keep[i])
      continue;
    children.push_back(prune(node.children[i], min_weight, child_path(i), dropped));
    weights.push_back(wbar[i] / kept_total);
  }
  if (children.size() == 1)
    return std::move(children.front());
  FormulaNode out = node;
  out.children = std::move(children);
  out.weights = std::move(weights);
  return out;
}

} // namespace

PrunedFormula prune_by_weight(const FormulaNode& formula, double min_weight) {
  if (!(min_weight >= 0.0 && min_weight < 1.0))
    fail(ErrorCode::Config, "min_weight must lie in [0, 1)");
  PrunedFormula out;
  out.formula = prune(formula, min_weight, "", out.dropped);
  return out;
}

// --- rendering ------------------------------------------------------------

RenderOptions render_options_for(const TreeClassifier& tree) {
  RenderOptions options;
  options.view_names.clear();
  for (ViewKind kind : tree.views.views) {
    switch (kind) {
    case ViewKind::Raw: options.view_names.push_back("x"); break;
    case ViewKind::Spectral: options.view_names.push_back("spec"); break;
    case ViewKind::Derivative: options.view_names.push_back("dx"); break;
    }
    const std::size_t base = kind == ViewKind::Derivative ? tree.raw_length - 1 : tree.raw_length;
    options.base_lengths.push_back(base);
  }
  if (tree.views.interval_features) {
    options.aggregations = tree.views.aggregations;
    options.interval_len = tree.views.resolved_interval_len(tree.raw_length);
  }
  return options;
}

std::string index_ranges(const FormulaNode& temporal) {
  std::string out;
  std::size_t i = 0;
  const std::size_t n = temporal.weights.size();
  while (i < n) {
    if (temporal.weights[i] <= 0.0) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && temporal.weights[j + 1] > 0.0)
      ++j;
    if (!out.empty())
      out += ", ";
    out += std::to_string(temporal.window_lo + i);
    if (j > i)
      out += ".." + std::to_string(temporal.window_lo + j);
    i = j + 1;
  }
  return out;
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  std::string s = buf;
  if (s.find_first_not_of("-0.") == std::string::npos && s.front() == '-')
    s.erase(0, 1); // no "-0.0000"
  return s;
}

class Renderer {
public:
  explicit Renderer(const RenderOptions& options) : options_(options) {}

  std::string render(const FormulaNode& node, bool under_temporal) const {
    switch (node.kind) {
    case NodeKind::True:
      return "true";
    case NodeKind::Atom:
      return atom(*node.predicate, under_temporal);
    case NodeKind::Not:
      return "not (" + render(node.children.front(), under_temporal) + ")";
    case NodeKind::And:
    case NodeKind::Or: {
      const auto wbar = normalized(node.weights);
      const std::string joiner = node.kind == NodeKind::And ? " and " : " or ";
      std::string out;
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i)
          out += joiner;
        out += "(" + render(node.children[i], under_temporal) + ")";
        if (options_.show_weights)
          out += "[w=" + fixed(wbar[i], options_.digits) + "]";
      }
      return out;
    }
    case NodeKind::Eventually:
    case NodeKind::Always: {
      std::string head = node.kind == NodeKind::Always ? "everywhere during " : "somewhere during ";
      return head + index_ranges(node) + " (" + render(node.children.front(), true) + ")";
    }
    }
    return "?";
  }

private:
  std::string view_name(std::size_t view) const {
    if (view < options_.view_names.size())
      return options_.view_names[view];
    return "v" + std::to_string(view);
  }

  std::string feature_name(std::size_t j) const {
    if (j < options_.feature_names.size())
      return options_.feature_names[j];
    return std::to_string(j);
  }

  // Name of the sample an atom reads: "x(34)", "mean(x[26..51])" or "x".
  std::string sample(std::size_t view, std::size_t index, bool under_temporal, const std::string& suffix) const {
    const std::string name = view_name(view) + suffix;
    if (under_temporal)
      return index == 0 ? name : name + "(t+" + std::to_string(index) + ")";
    if (view < options_.base_lengths.size() && index >= options_.base_lengths[view] &&
        !options_.aggregations.empty() && options_.interval_len > 0) {
      const std::size_t base = options_.base_lengths[view];
      const std::size_t chunks = (base + options_.interval_len - 1) / options_.interval_len;
      const std::size_t f = index - base;
      const std::size_t agg = f / chunks;
      const std::size_t chunk = f % chunks;
      if (agg < options_.aggregations.size()) {
        const std::size_t lo = chunk * options_.interval_len;
        const std::size_t hi = std::min(lo + options_.interval_len, base) - 1;
        return std::string(to_string(options_.aggregations[agg])) + "(" + name + "[" + std::to_string(lo) + ".." +
               std::to_string(hi) + "])";
      }
    }
    return name + "(" + std::to_string(index) + ")";
  }

  std::string atom(const Predicate& p, bool under_temporal) const {
    const auto unit = p.unit_direction();
    const int d = options_.digits;
    std::size_t nonzero = 0, axis = 0;
    for (std::size_t j = 0; j < unit.size(); ++j)
      if (unit[j] != 0.0) {
        ++nonzero;
        axis = j;
      }
    if (nonzero == 1) {
      const std::string suffix = unit.size() > 1 ? "[" + feature_name(axis) + "]" : "";
      const std::string s = sample(p.view, p.offset, under_temporal, suffix);
      // a x >= u with a = +-1
      if (unit[axis] > 0.0)
        return s + " is above " + fixed(p.threshold, d);
      return s + " is below " + fixed(-p.threshold, d);
    }
    std::string lhs;
    for (std::size_t j = 0; j < unit.size(); ++j) {
      if (unit[j] == 0.0)
        continue;
      if (!lhs.empty())
        lhs += unit[j] < 0.0 ? " - " : " + ";
      else if (unit[j] < 0.0)
        lhs += "-";
      lhs += fixed(std::abs(unit[j]), d) + "*" + sample(p.view, p.offset, under_temporal, "[" + feature_name(j) + "]");
    }
    return lhs + " >= " + fixed(p.threshold, d);
  }

  const RenderOptions& options_;
};

} // namespace

std::string render_text(const FormulaNode& formula, const RenderOptions& options) {
  return Renderer(options).render(formula, false);
}

} // namespace wstl

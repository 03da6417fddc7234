#include "wstl/tree.hpp"

#include "wstl/error.hpp"
#include "wstl/network.hpp"
#include "wstl/random.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <memory>
#include <set>
#include <thread>

namespace wstl {

std::size_t default_max_depth(std::size_t class_count) {
  if (class_count <= 2)
    return 5;
  return class_count < 10 ? 7 : 9;
}

std::size_t TreeClassifier::depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes)
    d = std::max(d, n.depth);
  return d;
}

std::size_t TreeClassifier::leaf_count() const {
  return static_cast<std::size_t>(std::count_if(nodes.begin(), nodes.end(), [](const auto& n) { return n.is_leaf(); }));
}

double gini_index(std::span<const int> labels) {
  if (labels.empty())
    return 0.0;
  std::map<int, std::size_t> counts;
  for (int y : labels)
    ++counts[y];
  const auto n = static_cast<double>(labels.size());
  double g = 1.0;
  for (const auto& [label, count] : counts) {
    const double f = static_cast<double>(count) / n;
    g -= f * f;
  }
  return g;
}

double gini_criterion(std::span<const int> labels, std::span<const bool> satisfied) {
  if (labels.size() != satisfied.size())
    fail(ErrorCode::Shape, "label and decision counts differ");
  if (labels.empty())
    return 0.0;
  std::vector<int> top, bottom;
  for (std::size_t i = 0; i < labels.size(); ++i)
    (satisfied[i] ? top : bottom).push_back(labels[i]);
  const auto n = static_cast<double>(labels.size());
  return static_cast<double>(top.size()) / n * gini_index(top) +
         static_cast<double>(bottom.size()) / n * gini_index(bottom);
}

std::vector<double> truth_degrees(std::span<const MultiViewInstance* const> data, const FormulaNode& formula) {
  Network network(formula);
  Tape tape;
  std::vector<double> out;
  out.reserve(data.size());
  for (const auto* x : data)
    out.push_back(network.forward(x->views, 0, tape));
  return out;
}

double gini_criterion(std::span<const MultiViewInstance* const> data, const FormulaNode& formula) {
  const auto truths = truth_degrees(data, formula);
  std::vector<int> labels;
  std::unique_ptr<bool[]> satisfied(new bool[data.size()]);
  for (std::size_t i = 0; i < data.size(); ++i) {
    labels.push_back(data[i]->label);
    satisfied[i] = truths[i] >= kSatisfactionThreshold;
  }
  return gini_criterion(labels, std::span<const bool>(satisfied.get(), data.size()));
}

Partition partition(std::span<const double> truths) {
  Partition p;
  for (std::size_t i = 0; i < truths.size(); ++i)
    (truths[i] >= kSatisfactionThreshold ? p.satisfied : p.violated).push_back(i);
  return p;
}

Partition partition(std::span<const MultiViewInstance* const> data, const FormulaNode& formula) {
  return partition(truth_degrees(data, formula));
}

namespace {

struct Candidate {
  int class_id = 0;
  StructureTemplate structure;
  std::size_t template_index = 0;
  NpcModel model;
  std::vector<double> truths;
  double criterion = std::numeric_limits<double>::infinity();
  bool usable = false;
};

class TreeBuilder {
public:
  TreeBuilder(const TreeConfig& config, std::size_t max_depth, std::vector<std::size_t> lengths, std::size_t dim,
              const ProgressFn& progress)
      : config_(config), max_depth_(max_depth), lengths_(std::move(lengths)), dim_(dim), progress_(progress),
        structures_(enumerate_structures(config.family)) {}

  std::vector<TreeNode> build(std::vector<const MultiViewInstance*> data) {
    grow(std::move(data), 0);
    return std::move(nodes_);
  }

private:
  std::size_t grow(std::vector<const MultiViewInstance*> data, std::size_t depth) {
    const std::size_t index = nodes_.size();
    nodes_.emplace_back();
    nodes_[index].index = index;
    nodes_[index].depth = depth;
    for (const auto* x : data)
      ++nodes_[index].histogram[x->label];
    nodes_[index].leaf_class = majority(nodes_[index].histogram);

    const bool pure = nodes_[index].histogram.size() <= 1;
    if (depth >= max_depth_ || pure || data.size() < config_.min_node_size)
      return index;

    auto best = search(data, index);
    if (!best)
      return index;
    auto split = partition(best->truths);
    if (split.satisfied.empty() || split.violated.empty())
      return index;

    if (progress_)
      progress_("node " + std::to_string(index) + " depth " + std::to_string(depth) + ": class " +
                std::to_string(best->class_id) + " " + std::string(to_string(best->structure.id)) + " J=" +
                std::to_string(best->criterion) + " (" + std::to_string(split.satisfied.size()) + "/" +
                std::to_string(split.violated.size()) + ")");

    nodes_[index].split = NodeSplit{std::move(best->model.formula), best->class_id, best->structure.id,
                                    best->criterion};
    std::vector<const MultiViewInstance*> left, right;
    for (std::size_t i : split.satisfied)
      left.push_back(data[i]);
    for (std::size_t i : split.violated)
      right.push_back(data[i]);
    const std::size_t l = grow(std::move(left), depth + 1);
    nodes_[index].left = l;
    const std::size_t r = grow(std::move(right), depth + 1);
    nodes_[index].right = r;
    return index;
  }

  static int majority(const std::map<int, std::size_t>& histogram) {
    int best = 0;
    std::size_t count = 0;
    for (const auto& [label, n] : histogram)
      if (n > count) { // map order: ties keep the smallest label
        best = label;
        count = n;
      }
    return best;
  }

  std::optional<Candidate> search(const std::vector<const MultiViewInstance*>& data, std::size_t node) {
    std::set<int> present;
    for (const auto* x : data)
      present.insert(x->label);
    std::vector<Candidate> candidates;
    for (int c : present)
      for (std::size_t t = 0; t < structures_.size(); ++t) {
        Candidate cand;
        cand.class_id = c;
        cand.structure = structures_[t];
        cand.template_index = t;
        candidates.push_back(std::move(cand));
      }

    std::vector<int> labels;
    for (const auto* x : data)
      labels.push_back(x->label);

    auto run = [&](Candidate& cand) {
      const std::uint64_t tags[] = {node, static_cast<std::uint64_t>(cand.class_id), cand.template_index};
      Rng seeder = make_rng(config_.seed, {tags[0], tags[1], tags[2]});
      const std::uint64_t init_seed = seeder();
      const std::uint64_t train_seed = seeder();
      auto encoded = encode_labels(std::span<const MultiViewInstance* const>(data), cand.class_id);
      auto initial = instantiate(cand.structure, lengths_, dim_, init_seed);
      cand.model = train_npc(encoded, initial, config_.train, cand.class_id, train_seed);
      if (cand.model.degenerate)
        return;
      cand.truths = truth_degrees(data, cand.model.formula);
      std::unique_ptr<bool[]> sat(new bool[data.size()]);
      for (std::size_t i = 0; i < data.size(); ++i)
        sat[i] = cand.truths[i] >= kSatisfactionThreshold;
      cand.criterion = gini_criterion(labels, std::span<const bool>(sat.get(), data.size()));
      cand.usable = true;
    };

    const std::size_t workers = std::max<std::size_t>(1, std::min(config_.jobs, candidates.size()));
    if (workers == 1) {
      for (auto& cand : candidates)
        run(cand);
    } else {
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> errors(workers);
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            for (std::size_t i = next++; i < candidates.size(); i = next++)
              run(candidates[i]);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      for (auto& t : pool)
        t.join();
      for (auto& e : errors)
        if (e)
          std::rethrow_exception(e);
    }

    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < candidates.size(); ++i)
      if (candidates[i].usable && (!best || candidates[i].criterion < candidates[*best].criterion))
        best = i;
    if (!best)
      return std::nullopt;
    return std::move(candidates[*best]);
  }

  const TreeConfig& config_;
  std::size_t max_depth_;
  std::vector<std::size_t> lengths_;
  std::size_t dim_;
  const ProgressFn& progress_;
  std::vector<StructureTemplate> structures_;
  std::vector<TreeNode> nodes_;
};

} // namespace

TreeClassifier dtfl(std::span<const MultiViewInstance> data, const ViewConfig& views, std::size_t raw_length,
                    std::size_t dim, const TreeConfig& config, const ProgressFn& progress) {
  if (data.empty())
    fail(ErrorCode::Empty, "cannot grow a tree on an empty dataset");
  TreeClassifier tree;
  tree.views = views;
  tree.view_lengths = extended_lengths(views, raw_length);
  tree.raw_length = raw_length;
  tree.dim = dim;
  tree.config = config;
  std::set<int> classes;
  std::vector<const MultiViewInstance*> ptrs;
  for (const auto& x : data) {
    if (x.lengths() != tree.view_lengths)
      fail(ErrorCode::Shape, "instance view lengths do not match the view configuration");
    classes.insert(x.label);
    ptrs.push_back(&x);
  }
  tree.classes.assign(classes.begin(), classes.end());
  const std::size_t max_depth = config.max_depth.value_or(default_max_depth(tree.classes.size()));
  TreeBuilder builder(config, max_depth, tree.view_lengths, dim, progress);
  tree.nodes = builder.build(std::move(ptrs));
  return tree;
}

PredictionTrace predict_trace(const TreeClassifier& tree, const MultiViewInstance& instance) {
  if (instance.lengths() != tree.view_lengths)
    fail(ErrorCode::Shape, "instance view lengths do not match the trained model");
  PredictionTrace trace;
  std::size_t at = 0;
  for (;;) {
    const TreeNode& node = tree.nodes.at(at);
    trace.path.push_back(at);
    if (node.is_leaf()) {
      trace.leaf = at;
      trace.predicted = node.leaf_class;
      return trace;
    }
    const double p = Network(node.split->formula).evaluate(instance.views);
    trace.truths.push_back(p);
    at = p >= kSatisfactionThreshold ? *node.left : *node.right;
  }
}

int predict(const TreeClassifier& tree, const MultiViewInstance& instance) {
  return predict_trace(tree, instance).predicted;
}

} // namespace wstl

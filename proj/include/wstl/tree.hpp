#pragma once

// Multiclass classifier built as a binary decision tree whose split at every
// node is a trained formula: instances with truth degree >= 0.5 go left
// (satisfy), the rest go right (violate).

#include "wstl/structure.hpp"
#include "wstl/training.hpp"
#include "wstl/views.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace wstl {

inline constexpr double kSatisfactionThreshold = 0.5;

/// 5 for two classes, 7 for fewer than ten, 9 otherwise.
std::size_t default_max_depth(std::size_t class_count);

struct TreeConfig {
  TrainConfig train;
  std::optional<std::size_t> max_depth; // unset: default_max_depth(#classes)
  std::size_t min_node_size = 2;
  PredicateFamily family = PredicateFamily::LinearHalfspace;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  friend bool operator==(const TreeConfig&, const TreeConfig&) = default;
};

struct NodeSplit {
  FormulaNode formula;
  int class_id = 0;
  TemplateId structure = TemplateId::B1And;
  double criterion = 0.0;
};

struct TreeNode {
  std::size_t index = 0;
  std::size_t depth = 0;
  std::optional<NodeSplit> split; // internal nodes only
  std::optional<std::size_t> left;  // satisfying branch
  std::optional<std::size_t> right; // violating branch
  int leaf_class = 0;
  std::map<int, std::size_t> histogram; // training labels that reached the node

  bool is_leaf() const noexcept { return !split.has_value(); }
};

struct TreeClassifier {
  std::vector<TreeNode> nodes; // nodes[0] is the root
  std::vector<int> classes;
  ViewConfig views;
  std::vector<std::size_t> view_lengths;
  std::size_t raw_length = 0;
  std::size_t dim = 1;
  TreeConfig config;

  const TreeNode& root() const { return nodes.front(); }
  std::size_t depth() const;
  std::size_t leaf_count() const;
};

double gini_index(std::span<const int> labels);

/// Size-weighted Gini impurity of the satisfy/violate split; empty sides
/// contribute 0.
double gini_criterion(std::span<const int> labels, std::span<const bool> satisfied);
double gini_criterion(std::span<const MultiViewInstance* const> data, const FormulaNode& formula);

struct Partition {
  std::vector<std::size_t> satisfied;
  std::vector<std::size_t> violated;
};

/// Split positions by truth degree; exactly 0.5 counts as satisfied.
Partition partition(std::span<const double> truths);
Partition partition(std::span<const MultiViewInstance* const> data, const FormulaNode& formula);

std::vector<double> truth_degrees(std::span<const MultiViewInstance* const> data, const FormulaNode& formula);

using ProgressFn = std::function<void(const std::string&)>;

TreeClassifier dtfl(std::span<const MultiViewInstance> data, const ViewConfig& views, std::size_t raw_length,
                    std::size_t dim, const TreeConfig& config, const ProgressFn& progress = {});

struct PredictionTrace {
  int predicted = 0;
  std::size_t leaf = 0;
  std::vector<std::size_t> path;    // node indices from the root to the leaf
  std::vector<double> truths;       // truth degree at each internal node on the path
};

PredictionTrace predict_trace(const TreeClassifier& tree, const MultiViewInstance& instance);
int predict(const TreeClassifier& tree, const MultiViewInstance& instance);

} // namespace wstl

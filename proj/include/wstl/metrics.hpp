#pragma once

// Classification metrics over class ids 1..C.

#include <cstddef>
#include <span>
#include <vector>

namespace wstl {

struct ClassificationMetrics {
  std::vector<int> classes;
  std::vector<std::vector<std::size_t>> confusion; // confusion[true][predicted], in `classes` order
  double accuracy = 0.0;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> f1;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
};

/// Per-class scores with an empty denominator count as 0. Macro averages run
/// over every class in `classes`.
ClassificationMetrics classification_metrics(std::span<const int> truth, std::span<const int> predicted,
                                             std::span<const int> classes);

/// Share of the most frequent label (ties do not matter for the value).
double majority_baseline(std::span<const int> labels);

} // namespace wstl

#include "wstl/metrics.hpp"

#include "wstl/error.hpp"

#include <algorithm>
#include <map>

namespace wstl {

ClassificationMetrics classification_metrics(std::span<const int> truth, std::span<const int> predicted,
                                             std::span<const int> classes) {
  if (truth.size() != predicted.size())
    fail(ErrorCode::Shape, "truth and prediction counts differ");
  ClassificationMetrics m;
  m.classes.assign(classes.begin(), classes.end());
  const std::size_t c = classes.size();
  std::map<int, std::size_t> slot;
  for (std::size_t i = 0; i < c; ++i)
    slot[classes[i]] = i;
  m.confusion.assign(c, std::vector<std::size_t>(c, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = slot.find(truth[i]), p = slot.find(predicted[i]);
    if (t == slot.end() || p == slot.end())
      fail(ErrorCode::OutOfRange, "label outside the class list");
    ++m.confusion[t->second][p->second];
    correct += truth[i] == predicted[i] ? 1 : 0;
  }
  m.accuracy = truth.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(truth.size());

  auto ratio = [](std::size_t a, std::size_t b) { return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b); };
  for (std::size_t k = 0; k < c; ++k) {
    std::size_t predicted_k = 0, actual_k = 0;
    for (std::size_t j = 0; j < c; ++j) {
      predicted_k += m.confusion[j][k];
      actual_k += m.confusion[k][j];
    }
    const double p = ratio(m.confusion[k][k], predicted_k);
    const double r = ratio(m.confusion[k][k], actual_k);
    m.precision.push_back(p);
    m.recall.push_back(r);
    m.f1.push_back(p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0);
  }
  if (c > 0) {
    for (std::size_t k = 0; k < c; ++k) {
      m.macro_precision += m.precision[k];
      m.macro_recall += m.recall[k];
      m.macro_f1 += m.f1[k];
    }
    m.macro_precision /= static_cast<double>(c);
    m.macro_recall /= static_cast<double>(c);
    m.macro_f1 /= static_cast<double>(c);
  }
  return m;
}

double majority_baseline(std::span<const int> labels) {
  if (labels.empty())
    return 0.0;
  std::map<int, std::size_t> counts;
  for (int y : labels)
    ++counts[y];
  std::size_t best = 0;
  for (const auto& [label, n] : counts)
    best = std::max(best, n);
  return static_cast<double>(best) / static_cast<double>(labels.size());
}

} // namespace wstl

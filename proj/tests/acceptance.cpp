// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Data files are looked up in WSTL_DATA_DIR (environment first, then the
// compile-time default).

#include "wstl/dataset.hpp"
#include "wstl/extract.hpp"
#include "wstl/metrics.hpp"
#include "wstl/model_io.hpp"
#include "wstl/synthetic.hpp"
#include "wstl/tree.hpp"
#include "wstl/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef WSTL_DATA_DIR
#define WSTL_DATA_DIR "data"
#endif

using namespace wstl;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

int failures = 0;

void report(int id, bool ok, const std::string& name, const std::string& detail, double seconds) {
  std::printf("%s %2d %s: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok)
    ++failures;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::string describe(const verify::SuiteResult& r) {
  std::string s = fmt("trials=%zu failures=%zu max_err=%.3g", r.trials, r.failures, r.max_error);
  if (!r.counterexample.empty())
    s += " first=" + r.counterexample;
  return s;
}

void suite(int id, const verify::SuiteResult& r, double limit) {
  report(id, r.passed() && r.seconds < limit, r.name, describe(r) + fmt(" limit=%.0fs", limit), r.seconds);
}

fs::path data_dir() {
  if (const char* env = std::getenv("WSTL_DATA_DIR"))
    return env;
  return WSTL_DATA_DIR;
}

struct Experiment {
  std::string name;
  LabeledDataset train_raw, test_raw;
  std::vector<MultiViewInstance> train, test;
  ViewConfig views;
  TreeConfig config;
  TreeClassifier tree;
  std::string model_text;
  double train_accuracy = 0.0, test_accuracy = 0.0, baseline = 0.0, seconds = 0.0;
};

double accuracy(const TreeClassifier& tree, const std::vector<MultiViewInstance>& data) {
  std::size_t correct = 0;
  for (const auto& inst : data)
    correct += predict(tree, inst) == inst.label;
  return data.empty() ? 0.0 : static_cast<double>(correct) / data.size();
}

void fit(Experiment& e) {
  e.train = build_instances(e.train_raw, e.views);
  e.test = build_instances(e.test_raw, e.views);
  const auto start = Clock::now();
  e.tree = dtfl(e.train, e.views, e.train_raw.length(), e.train_raw.dim(), e.config);
  e.seconds = since(start);
  e.model_text = serialize_model(e.tree, e.train_raw.label_names);
  e.train_accuracy = accuracy(e.tree, e.train);
  e.test_accuracy = accuracy(e.tree, e.test);
  e.baseline = majority_baseline(e.test_raw.labels);
}

std::optional<Experiment> ucr(const std::string& name) {
  const fs::path train = data_dir() / (name + "_TRAIN.tsv"), test = data_dir() / (name + "_TEST.tsv");
  if (!fs::exists(train) || !fs::exists(test))
    return std::nullopt;
  Experiment e;
  e.name = name;
  e.train_raw = load_delimited(train);
  e.test_raw = load_delimited(test);
  apply_label_map(e.test_raw, e.train_raw.label_names);
  return e;
}

// Normalized weights over time indices of the raw-view part of a formula:
// clause weights by offset for B1 shapes, the outer window for temporal ones.
// Entries at or past base_length (interval features) are left out of the
// ranking but stay in the normalization.
std::vector<std::pair<double, std::size_t>> temporal_weights(const FormulaNode& root, std::size_t raw_view,
                                                             std::size_t base_length) {
  const FormulaNode* node = &root;
  if ((root.kind == NodeKind::And) && !root.children.empty() && root.children.front().kind != NodeKind::Atom) {
    // multi-view conjunction: one child per view
    node = nullptr;
    for (const auto& child : root.children)
      if (scope_view(child) == raw_view)
        node = &child;
  }
  std::vector<std::pair<double, std::size_t>> out;
  if (!node)
    return out;
  const double total = std::accumulate(node->weights.begin(), node->weights.end(), 0.0);
  for (std::size_t i = 0; i < node->weights.size(); ++i) {
    std::size_t t;
    if (node->is_temporal())
      t = node->window_lo + i;
    else if (node->children[i].kind == NodeKind::Atom)
      t = node->children[i].predicate->offset;
    else
      continue;
    if (t < base_length)
      out.push_back({node->weights[i] / total, t});
  }
  std::stable_sort(out.begin(), out.end(), [](auto a, auto b) { return a.first > b.first; });
  return out;
}

void persistence(Experiment& e, bool& ok, std::string& detail) {
  const fs::path path = fs::temp_directory_path() / ("wstl_acceptance_" + e.name + ".json");
  save_model(path, e.tree, e.train_raw.label_names);
  const auto back = load_model(path);
  fs::remove(path);
  std::size_t differ = 0;
  for (const auto& inst : e.test)
    differ += predict(back.tree, inst) != predict(e.tree, inst);
  ok = ok && differ == 0;
  detail += fmt("%s %zu/%zu identical; ", e.name.c_str(), e.test.size() - differ, e.test.size());
}

} // namespace

int main() {
  const std::uint64_t seed = 1;

  suite(1, verify::de_morgan(10000, seed), 5.0);
  {
    const auto zero = verify::zero_weight_nonimpact(10000, seed);
    const auto scale = verify::weight_scale_invariance(10000, seed);
    const double t = zero.seconds + scale.seconds;
    report(2, zero.passed() && scale.passed() && zero.max_error == 0.0 && scale.max_error == 0.0 && t < 5.0,
           "zero-weight-nonimpact+weight-scale-invariance",
           "nonimpact{" + describe(zero) + "} scale{" + describe(scale) + "}", t);
  }
  suite(3, verify::monotonicity(10000, seed), 5.0);
  suite(4, verify::gradient_check(500, seed), 60.0);
  suite(5, verify::forward_oracle(1000, seed), 10.0);
  suite(6, verify::dft_oracle(200, seed), 20.0);
  suite(7, verify::temporal_expansion(5000, seed), 5.0);

  // 8: synthetic bump vs flat
  Experiment synth;
  synth.name = "synthetic";
  {
    auto all = make_bump_dataset(100, 7);
    synth.train_raw = all;
    synth.test_raw = all;
    synth.train_raw.series.resize(60);
    synth.train_raw.labels.resize(60);
    synth.test_raw.series.erase(synth.test_raw.series.begin(), synth.test_raw.series.begin() + 60);
    synth.test_raw.labels.erase(synth.test_raw.labels.begin(), synth.test_raw.labels.begin() + 60);
    synth.config.seed = 7;
    fit(synth);
    const auto& root = synth.tree.root();
    std::string top;
    bool in_window = false;
    if (root.split) {
      const auto w = temporal_weights(root.split->formula, 0, synth.train_raw.length());
      in_window = w.size() >= 3;
      for (std::size_t i = 0; i < std::min<std::size_t>(3, w.size()); ++i) {
        top += fmt("%zu:%.4f ", w[i].second, w[i].first);
        in_window = in_window && w[i].second >= 10 && w[i].second <= 15;
      }
      top = std::string(to_string(root.split->structure)) + " top3=" + top;
    }
    const bool ok = synth.train_accuracy == 1.0 && synth.test_accuracy >= 0.95 && in_window && synth.seconds < 120.0;
    report(8, ok, "synthetic-end-to-end",
           fmt("train_acc=%.4f test_acc=%.4f epochs=%zu ", synth.train_accuracy, synth.test_accuracy,
               synth.config.train.epochs) +
               top + (in_window ? "in [10,15]" : "NOT all in [10,15]"),
           synth.seconds);
  }

  // 9: small UCR floors
  std::vector<Experiment> ucrs;
  {
    bool ok = true;
    double total = 0.0;
    std::string detail;
    for (const std::string name : {"BeetleFly", "GunPoint"}) {
      auto e = ucr(name);
      if (!e) {
        ok = false;
        detail += name + ": data not found in " + data_dir().string() + "; ";
        continue;
      }
      fit(*e);
      total += e->seconds;
      const bool pass = e->test_accuracy > e->baseline && e->test_accuracy >= 0.75;
      ok = ok && pass;
      detail += fmt("%s: test_acc=%.4f baseline=%.4f depth=%zu %s; ", name.c_str(), e->test_accuracy, e->baseline,
                    e->tree.depth(), pass ? "ok" : "below floor");
      ucrs.push_back(std::move(*e));
    }
    report(9, ok && total < 900.0, "small-ucr-floors", detail, total);
  }

  // 10: route consistency on every trained model
  {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;
    std::vector<Experiment*> models{&synth};
    for (auto& e : ucrs)
      models.push_back(&e);
    for (auto* e : models) {
      const auto r = route_consistency(e->tree, tctf(e->tree), e->train);
      ok = ok && r.ok();
      detail += fmt("%s %zu checked %zu violations; ", e->name.c_str(), r.checked, r.violations.size());
    }
    const double t = since(start);
    report(10, ok && t < 30.0, "route-consistency", detail, t);
  }

  suite(11, verify::gini_oracle(1000, seed), 5.0);

  // 12: determinism, same seed and jobs 4 versus the jobs 1 models above
  {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;
    std::vector<Experiment*> models{&synth};
    for (auto& e : ucrs)
      models.push_back(&e);
    for (auto* e : models) {
      Experiment again = *e;
      again.config.jobs = 4;
      fit(again);
      const bool same = again.model_text == e->model_text;
      ok = ok && same;
      detail += e->name + (same ? " identical; " : " DIFFERS; ");
    }
    {
      Experiment again = synth;
      fit(again);
      const bool same = again.model_text == synth.model_text;
      ok = ok && same;
      detail += std::string("synthetic rerun jobs=1 ") + (same ? "identical" : "DIFFERS");
    }
    if (ucrs.size() < 2) {
      ok = false;
      detail += "; not every criterion-9 model exists";
    }
    report(12, ok, "determinism", detail, since(start));
  }

  // 13: persistence round trip
  {
    const auto start = Clock::now();
    bool ok = true;
    std::string detail;
    persistence(synth, ok, detail);
    for (auto& e : ucrs)
      persistence(e, ok, detail);
    if (ucrs.size() < 2) {
      ok = false;
      detail += "not every criterion-9 model exists";
    }
    const double t = since(start);
    report(13, ok && t < 30.0, "persistence-round-trip", detail, t);
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

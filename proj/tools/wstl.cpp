// Command-line front end: train, predict, explain, verify.

#include "wstl/dataset.hpp"
#include "wstl/error.hpp"
#include "wstl/extract.hpp"
#include "wstl/formula_io.hpp"
#include "wstl/metrics.hpp"
#include "wstl/model_io.hpp"
#include "wstl/synthetic.hpp"
#include "wstl/tree.hpp"
#include "wstl/verify.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace wstl;

namespace {

int exit_code(ErrorCode code) {
  switch (code) {
  case ErrorCode::Io:
  case ErrorCode::Format:
  case ErrorCode::Parse:
  case ErrorCode::Empty:
  case ErrorCode::Integrity:
  case ErrorCode::UnsupportedVersion:
    return 2;
  case ErrorCode::Schema:
  case ErrorCode::Shape:
    return 3;
  case ErrorCode::Usage:
  case ErrorCode::Config:
  case ErrorCode::Stratification:
    return 4;
  default:
    return 1;
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty())
      out.push_back(item);
  return out;
}

std::size_t default_jobs() {
  if (const char* env = std::getenv("WSTL_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v > 0)
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    fail(ErrorCode::Usage, std::string("WSTL_JOBS must be a positive integer, got '") + env + "'");
  }
  return 1;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush())
    fail(ErrorCode::Io, "cannot write " + path);
}

std::string hex32(std::uint32_t v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", v);
  return buf;
}

std::size_t training_size(const TreeClassifier& tree) {
  std::size_t n = 0;
  for (const auto& [label, count] : tree.root().histogram)
    n += count;
  return n;
}

json config_json(const TreeClassifier& tree) {
  json views = json::array();
  for (ViewKind v : tree.views.views)
    views.push_back(std::string(to_string(v)));
  json aggs = json::array();
  for (Aggregation a : tree.views.aggregations)
    aggs.push_back(std::string(to_string(a)));
  const auto& t = tree.config.train;
  return {
      {"epochs", t.epochs},
      {"learning_rate", t.learning_rate},
      {"batch_size", t.resolved_batch_size(training_size(tree))},
      {"weight_decay", t.weight_decay},
      {"orient_predicates", t.orient_predicates},
      {"seed", tree.config.seed},
      {"max_depth", tree.config.max_depth.value_or(default_max_depth(tree.classes.size()))},
      {"min_node_size", tree.config.min_node_size},
      {"family", std::string(to_string(tree.config.family))},
      {"views", views},
      {"interval_features", tree.views.interval_features},
      {"interval_count", tree.views.interval_count},
      {"interval_len", tree.views.interval_features ? json(tree.views.resolved_interval_len(tree.raw_length)) : json(nullptr)},
      {"aggregations", aggs},
      {"z_normalize", tree.views.z_normalize},
  };
}

json metrics_json(const ClassificationMetrics& m, std::span<const std::string> names) {
  json per_class = json::array();
  json labels = json::array();
  for (std::size_t k = 0; k < m.classes.size(); ++k) {
    const std::string& name = names[static_cast<std::size_t>(m.classes[k] - 1)];
    labels.push_back(name);
    per_class.push_back({{"label", name}, {"precision", m.precision[k]}, {"recall", m.recall[k]}, {"f1", m.f1[k]}});
  }
  return {
      {"accuracy", m.accuracy},
      {"macro_precision", m.macro_precision},
      {"macro_recall", m.macro_recall},
      {"macro_f1", m.macro_f1},
      {"per_class", per_class},
      {"confusion", {{"labels", labels}, {"rows_true_columns_predicted", m.confusion}}},
  };
}

std::vector<int> all_classes(std::size_t count) {
  std::vector<int> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = static_cast<int>(i + 1);
  return out;
}

// Test data must match the model: same length and dimension, known labels.
std::vector<MultiViewInstance> prepare(LabeledDataset& data, const StoredModel& model) {
  if (data.length() != model.tree.raw_length || data.dim() != model.tree.dim)
    fail(ErrorCode::Schema, "data has length " + std::to_string(data.length()) + " and dimension " +
                                std::to_string(data.dim()) + ", the model expects " +
                                std::to_string(model.tree.raw_length) + " and " + std::to_string(model.tree.dim));
  apply_label_map(data, model.label_names);
  return build_instances(data, model.tree.views);
}

// --- train -----------------------------------------------------------------

struct TrainOptions {
  std::string data, test, out = "model.json", report;
  std::uint64_t seed = 0;
  std::size_t epochs = 100;
  double lr = 0.1;
  std::size_t intervals = 20;
  std::size_t interval_len = 0;
  std::string agg, ablate;
  bool no_interval_features = false;
  bool z_normalize = false;
  bool no_orient = false;
  std::size_t max_depth = 0;
  bool max_depth_set = false;
  std::size_t jobs = 0;
  std::size_t batch_size = 0;
  std::string family = "linear";
  bool quiet = false;
};

int cmd_train(const TrainOptions& o) {
  const auto started = std::chrono::steady_clock::now();
  LabeledDataset train = load_delimited(o.data);

  ViewConfig views;
  views.interval_features = !o.no_interval_features;
  views.interval_count = o.intervals;
  if (o.interval_len > 0)
    views.interval_len = o.interval_len;
  views.z_normalize = o.z_normalize;
  if (!o.agg.empty()) {
    views.aggregations.clear();
    for (const auto& name : split_list(o.agg))
      views.aggregations.push_back(aggregation_from_string(name));
  }
  for (const auto& name : split_list(o.ablate)) {
    const ViewKind kind = view_kind_from_string(name);
    std::erase(views.views, kind);
  }
  views.check();

  TreeConfig config;
  config.train.epochs = o.epochs;
  config.train.learning_rate = o.lr;
  config.train.batch_size = o.batch_size;
  config.train.orient_predicates = !o.no_orient;
  if (o.max_depth_set)
    config.max_depth = o.max_depth;
  config.family = predicate_family_from_string(o.family);
  config.seed = o.seed;
  config.jobs = o.jobs > 0 ? o.jobs : default_jobs();

  const auto instances = build_instances(train, views);
  ProgressFn progress;
  if (!o.quiet)
    progress = [](const std::string& line) { std::cerr << line << "\n"; };
  TreeClassifier tree = dtfl(instances, views, train.length(), train.dim(), config, progress);
  save_model(o.out, tree, train.label_names);

  std::vector<int> predicted;
  for (const auto& x : instances)
    predicted.push_back(predict(tree, x));
  const auto classes = all_classes(train.class_count());
  const auto train_metrics = classification_metrics(train.labels, predicted, classes);

  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    json node{{"index", n.index}, {"depth", n.depth}};
    json hist = json::object();
    for (const auto& [label, count] : n.histogram)
      hist[train.label_name(label)] = count;
    node["histogram"] = hist;
    if (n.split) {
      node["class"] = train.label_name(n.split->class_id);
      node["template"] = std::string(to_string(n.split->structure));
      node["criterion"] = n.split->criterion;
      node["left"] = *n.left;
      node["right"] = *n.right;
    } else {
      node["leaf_class"] = train.label_name(n.leaf_class);
    }
    nodes.push_back(std::move(node));
  }

  json report{
      {"command", "train"},
      {"config", config_json(tree)},
      {"jobs", config.jobs},
      {"data", {{"path", o.data}, {"crc32", hex32(train.checksum)}, {"instances", train.size()},
                {"length", train.length()}, {"classes", train.label_names}}},
      {"model", o.out},
      {"train_accuracy", train_metrics.accuracy},
      {"train", metrics_json(train_metrics, train.label_names)},
      {"depth", tree.depth()},
      {"leaves", tree.leaf_count()},
      {"nodes", nodes},
  };
  if (!o.test.empty()) {
    StoredModel stored{tree, train.label_names};
    LabeledDataset test = load_delimited(o.test);
    const auto test_instances = prepare(test, stored);
    std::vector<int> test_pred;
    for (const auto& x : test_instances)
      test_pred.push_back(predict(tree, x));
    const auto m = classification_metrics(test.labels, test_pred, classes);
    report["test_accuracy"] = m.accuracy;
    report["test"] = metrics_json(m, train.label_names);
    report["test"]["path"] = o.test;
    report["test"]["majority_baseline"] = majority_baseline(test.labels);
  }
  report["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  write_text(o.report, report.dump(2) + "\n");
  return 0;
}

// --- predict ---------------------------------------------------------------

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& report_path) {
  const StoredModel model = load_model(model_path);
  LabeledDataset data = load_delimited(data_path);
  const auto instances = prepare(data, model);
  std::vector<int> predicted;
  json rows = json::array();
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto trace = predict_trace(model.tree, instances[i]);
    predicted.push_back(trace.predicted);
    rows.push_back({{"index", i},
                    {"true", model.label_names[static_cast<std::size_t>(data.labels[i] - 1)]},
                    {"predicted", model.label_names[static_cast<std::size_t>(trace.predicted - 1)]},
                    {"leaf", trace.leaf},
                    {"path", trace.path},
                    {"truths", trace.truths}});
  }
  const auto m = classification_metrics(data.labels, predicted, all_classes(model.label_names.size()));
  json report = metrics_json(m, model.label_names);
  report["command"] = "predict";
  report["model"] = model_path;
  report["config"] = config_json(model.tree);
  report["data"] = {{"path", data_path}, {"crc32", hex32(data.checksum)}, {"instances", data.size()}};
  report["instances"] = rows;
  write_text(report_path, report.dump(2) + "\n");
  return 0;
}

// --- explain ---------------------------------------------------------------

void collect_temporal(const FormulaNode& node, const std::string& path, json& out) {
  if (node.is_temporal()) {
    double total = 0.0;
    for (double w : node.weights)
      total += w;
    json surviving = json::array();
    for (std::size_t i = 0; i < node.weights.size(); ++i)
      if (node.weights[i] > 0.0)
        surviving.push_back({{"index", node.window_lo + i}, {"weight", node.weights[i] / total}});
    out.push_back({{"path", path}, {"operator", std::string(to_string(node.kind))}, {"surviving", surviving}});
  }
  for (std::size_t i = 0; i < node.children.size(); ++i)
    collect_temporal(node.children[i], path.empty() ? std::to_string(i) : path + "/" + std::to_string(i), out);
}

int cmd_explain(const std::string& model_path, const std::string& class_filter, double min_weight,
                const std::string& format, bool show_weights, const std::string& out_path) {
  const StoredModel model = load_model(model_path);
  const TreeClassifier& tree = model.tree;
  auto formulas = tctf(tree);
  if (!class_filter.empty()) {
    std::erase_if(formulas, [&](const ClassFormula& f) {
      return model.label_names[static_cast<std::size_t>(f.class_id - 1)] != class_filter;
    });
    if (formulas.empty())
      fail(ErrorCode::Usage, "unknown class '" + class_filter + "'");
  }
  RenderOptions options = render_options_for(tree);
  options.show_weights = show_weights;

  std::map<std::size_t, PrunedFormula> pruned;
  for (const auto& n : tree.nodes)
    if (n.split)
      pruned.emplace(n.index, prune_by_weight(n.split->formula, min_weight));

  auto literal_text = [&](const PathLiteral& lit) {
    const std::string body = render_text(pruned.at(lit.node).formula, options);
    return lit.negated ? "not (" + body + ")" : "(" + body + ")";
  };

  if (format == "json") {
    json classes = json::array();
    for (const auto& f : formulas) {
      json paths = json::array();
      for (const auto& p : f.disjuncts) {
        json lits = json::array();
        for (const auto& lit : p.literals)
          lits.push_back({{"node", lit.node}, {"negated", lit.negated}, {"text", literal_text(lit)}});
        paths.push_back({{"leaf", p.leaf}, {"literals", lits}});
      }
      classes.push_back({{"label", model.label_names[static_cast<std::size_t>(f.class_id - 1)]},
                         {"unsatisfiable", f.unsatisfiable()},
                         {"paths", paths}});
    }
    json nodes = json::array();
    for (const auto& [index, p] : pruned) {
      json dropped = json::array();
      for (const auto& d : p.dropped)
        dropped.push_back({{"path", d.path}, {"index", d.index}, {"weight", d.normalized_weight}});
      json temporal = json::array();
      collect_temporal(p.formula, "", temporal);
      const auto& split = *tree.nodes[index].split;
      nodes.push_back({{"node", index},
                       {"class", model.label_names[static_cast<std::size_t>(split.class_id - 1)]},
                       {"template", std::string(to_string(split.structure))},
                       {"text", render_text(p.formula, options)},
                       {"canonical", to_canonical(split.formula)},
                       {"pruned_canonical", to_canonical(p.formula)},
                       {"dropped", dropped},
                       {"temporal", temporal}});
    }
    json doc{{"min_weight", min_weight}, {"classes", classes}, {"nodes", nodes}};
    write_text(out_path, doc.dump(2) + "\n");
    return 0;
  }
  if (format != "text")
    fail(ErrorCode::Usage, "unknown format '" + format + "' (text or json)");

  std::ostringstream os;
  os << "min weight " << min_weight << "\n";
  for (const auto& f : formulas) {
    os << "\nclass " << model.label_names[static_cast<std::size_t>(f.class_id - 1)] << ":";
    if (f.unsatisfiable()) {
      os << " false (no leaf predicts this class)\n";
      continue;
    }
    os << "\n";
    for (std::size_t d = 0; d < f.disjuncts.size(); ++d) {
      const auto& p = f.disjuncts[d];
      os << (d == 0 ? "      " : "   or ");
      if (p.literals.empty())
        os << "true";
      for (std::size_t i = 0; i < p.literals.size(); ++i)
        os << (i ? "\n      and " : "") << "[node " << p.literals[i].node << "] " << literal_text(p.literals[i]);
      os << "\n";
    }
  }
  os << "\nnode formulas (canonical, unpruned):\n";
  for (const auto& [index, p] : pruned) {
    os << "  node " << index << ": " << to_canonical(tree.nodes[index].split->formula) << "\n";
    if (!p.dropped.empty())
      os << "    pruned " << p.dropped.size() << " term(s) below weight " << min_weight << "\n";
  }
  write_text(out_path, os.str());
  return 0;
}

// --- verify ----------------------------------------------------------------

int cmd_verify(std::size_t trials, std::uint64_t seed, const std::string& fault) {
  verify::AfSet afs = verify::production_afs();
  if (fault == "unclamped-or") {
    afs.or_fn = [](std::span<const double> w, double beta, std::span<const double> p) {
      double total = 0.0, z = 1.0 - beta;
      for (double v : w)
        total += v;
      for (std::size_t i = 0; i < w.size(); ++i)
        z += w[i] / total * p[i];
      return z;
    };
  } else if (!fault.empty()) {
    fail(ErrorCode::Usage, "unknown fault '" + fault + "'");
  }
  auto n = [&](std::size_t fallback) { return trials > 0 ? trials : fallback; };
  std::vector<verify::SuiteResult> results;
  results.push_back(verify::de_morgan(n(10000), seed, afs));
  results.push_back(verify::zero_weight_nonimpact(n(10000), seed, afs));
  results.push_back(verify::weight_scale_invariance(n(10000), seed, afs));
  results.push_back(verify::monotonicity(n(10000), seed, afs));
  results.push_back(verify::temporal_expansion(n(5000), seed));
  results.push_back(verify::gradient_check(n(500), seed));
  results.push_back(verify::forward_oracle(n(1000), seed));
  results.push_back(verify::dft_oracle(n(200), seed));
  results.push_back(verify::gini_oracle(n(1000), seed));

  {
    // Route consistency on a small trained tree.
    const auto started = std::chrono::steady_clock::now();
    const auto data = make_bump_dataset(std::max<std::size_t>(4, std::min<std::size_t>(n(40), 200)), seed);
    ViewConfig views;
    views.views = {ViewKind::Raw};
    TreeConfig config;
    config.train.epochs = 20;
    config.seed = seed;
    const auto instances = build_instances(data, views);
    const auto tree = dtfl(instances, views, data.length(), 1, config);
    const auto formulas = tctf(tree);
    const auto report = route_consistency(tree, formulas, instances);
    verify::SuiteResult r;
    r.name = "route-consistency";
    r.trials = report.checked;
    r.failures = report.violations.size();
    if (!report.ok())
      r.counterexample = "seed=" + std::to_string(seed) + " instance=" + std::to_string(report.violations.front().instance);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    results.push_back(std::move(r));
  }

  bool ok = true;
  for (const auto& r : results) {
    std::printf("%-4s %-24s trials=%-6zu failures=%-5zu max_error=%-10.3g %.2fs\n", r.passed() ? "PASS" : "FAIL",
                r.name.c_str(), r.trials, r.failures, r.max_error, r.seconds);
    if (!r.passed()) {
      ok = false;
      std::printf("     counterexample: %s\n", r.counterexample.c_str());
    }
  }
  return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interpretable time-series classification with weighted temporal logic formulas"};
  app.require_subcommand(1);

  TrainOptions train;
  auto* t = app.add_subcommand("train", "Grow a formula tree and save the model");
  t->add_option("--data", train.data, "Training set (label first, tab or comma separated)")->required();
  t->add_option("--test", train.test, "Optional test set scored into the report");
  t->add_option("--out", train.out, "Model file")->capture_default_str();
  t->add_option("--report", train.report, "Report file (default: stdout)");
  t->add_option("--seed", train.seed, "Random seed")->capture_default_str();
  t->add_option("--epochs", train.epochs, "Training epochs per node classifier")->capture_default_str();
  t->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  t->add_option("--intervals", train.intervals, "Number of intervals for interval features")->capture_default_str();
  t->add_option("--interval-len", train.interval_len, "Explicit interval length (overrides --intervals)");
  t->add_option("--agg", train.agg, "Aggregations: mean,variance,max,min,iqr,slope (default all)");
  t->add_option("--ablate", train.ablate, "Views to disable: raw,spectral,derivative");
  t->add_flag("--no-interval-features", train.no_interval_features, "Disable interval features");
  t->add_flag("--z-normalize", train.z_normalize, "Z-normalize every series before building views");
  t->add_flag("--no-orient", train.no_orient, "Keep fresh predicate directions positive");
  t->add_option("--max-depth", train.max_depth, "Maximum tree depth (default by class count)")
      ->each([&](const std::string&) { train.max_depth_set = true; });
  t->add_option("--jobs", train.jobs, "Parallel candidate trainings (default WSTL_JOBS or 1)");
  t->add_option("--batch-size", train.batch_size, "Mini-batch size (0: full batch up to 256, else 64)");
  t->add_option("--family", train.family, "Predicate family: linear or axis")->capture_default_str();
  t->add_flag("--quiet", train.quiet, "No progress on stderr");

  std::string model, data, report, class_filter, format = "text";
  double min_weight = 0.05;
  bool show_weights = false;
  auto* p = app.add_subcommand("predict", "Classify a dataset with a saved model");
  p->add_option("--model", model, "Model file")->required();
  p->add_option("--data", data, "Dataset to classify")->required();
  p->add_option("--report", report, "Report file (default: stdout)");

  auto* e = app.add_subcommand("explain", "Print one formula per class");
  e->add_option("--model", model, "Model file")->required();
  e->add_option("--class", class_filter, "Only this class (raw label)");
  e->add_option("--min-weight", min_weight, "Prune terms whose normalized weight is below this")->capture_default_str();
  e->add_option("--format", format, "text or json")->capture_default_str();
  e->add_flag("--show-weights", show_weights, "Print normalized weights of connective children");
  e->add_option("--out", report, "Output file (default: stdout)");

  std::size_t trials = 0;
  std::uint64_t seed = 1;
  std::string fault;
  auto* v = app.add_subcommand("verify", "Run the randomized property suites");
  v->add_option("--trials", trials, "Trials per suite (default: suite-specific)");
  v->add_option("--seed", seed, "Base seed")->capture_default_str();
  v->add_option("--fault", fault, "Swap in a known-bad operator (unclamped-or) to see the suites fail");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    std::cerr << "E_USAGE: " << err.what() << "\n";
    return 4;
  }

  try {
    if (*t)
      return cmd_train(train);
    if (*p)
      return cmd_predict(model, data, report);
    if (*e) {
      if (!(min_weight >= 0.0 && min_weight < 1.0))
        fail(ErrorCode::Usage, "--min-weight must lie in [0, 1)");
      return cmd_explain(model, class_filter, min_weight, format, show_weights, report);
    }
    if (*v)
      return cmd_verify(trials, seed, fault);
  } catch (const Error& err) {
    std::cerr << error_tag(err.code()) << ": " << err.what() << "\n";
    return exit_code(err.code());
  } catch (const std::exception& err) {
    std::cerr << "E_INTERNAL: " << err.what() << "\n";
    return 1;
  }
  return 1;
}

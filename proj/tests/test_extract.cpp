#include "doctest.h"

#include "wstl/dataset.hpp"
#include "wstl/error.hpp"
#include "wstl/extract.hpp"
#include "wstl/synthetic.hpp"

#include <cmath>
#include <numeric>
#include <set>

using namespace wstl;

namespace {

ViewConfig raw_only() {
  ViewConfig c;
  c.views = {ViewKind::Raw};
  c.interval_features = false;
  return c;
}

FormulaNode above(double u, std::size_t offset = 0) {
  Predicate p;
  p.direction = {1.0};
  p.threshold = u;
  p.offset = offset;
  return make_atom(p);
}

TreeNode leaf(std::size_t index, std::size_t depth, int c) {
  TreeNode n;
  n.index = index;
  n.depth = depth;
  n.leaf_class = c;
  n.histogram[c] = 1;
  return n;
}

TreeNode split(std::size_t index, std::size_t depth, double u, std::size_t l, std::size_t r) {
  TreeNode n;
  n.index = index;
  n.depth = depth;
  n.split = NodeSplit{above(u), 1, TemplateId::B1And, 0.0};
  n.left = l;
  n.right = r;
  n.histogram[1] = 1;
  return n;
}

TreeClassifier base_tree(std::vector<int> classes) {
  TreeClassifier t;
  t.classes = std::move(classes);
  t.views = raw_only();
  t.view_lengths = {1};
  t.raw_length = 1;
  return t;
}

// Tree of the shape
//   0: B1 -> left 1 (B2), right 2 (B3)
//   1: B2 -> left leaf 3 (class 1), right 4 (B5)
//   4: B5 -> left leaf 5 (class 3), right leaf 6 (class 2)
//   2: B3 -> left 7 (B6), right leaf 8 (class 3)
//   7: B6 -> left leaf 9 (class 2), right leaf 10 (class 1)
// so class 2 reads (B1 and not B2 and not B5) or (not B1 and B3 and B6).
TreeClassifier five_split_tree() {
  auto t = base_tree({1, 2, 3});
  t.nodes = {split(0, 0, 0.5, 1, 2), split(1, 1, 0.7, 3, 4), split(2, 1, 0.3, 7, 8), leaf(3, 2, 1),
             split(4, 2, 0.6, 5, 6), leaf(5, 3, 3),         leaf(6, 3, 2),         split(7, 2, 0.1, 9, 10),
             leaf(8, 2, 3),          leaf(9, 3, 2),          leaf(10, 3, 1)};
  return t;
}

MultiViewInstance point(double v) { return build_multiview(Signal::univariate({v}), raw_only()); }

} // namespace

TEST_CASE("single leaf tree gives one true path") {
  auto t = base_tree({1, 2});
  t.nodes = {leaf(0, 0, 1)};
  const auto f = tctf(t);
  REQUIRE(f.size() == 2);
  CHECK(f[0].class_id == 1);
  REQUIRE(f[0].disjuncts.size() == 1);
  CHECK(f[0].disjuncts[0].literals.empty());
  CHECK(f[1].unsatisfiable());
  CHECK(render_text(materialize(t, f[0])) == "true");
  CHECK(render_text(materialize(t, f[1])) == "not (true)");
}

TEST_CASE("depth-1 tree: class 1 is the node formula, class 2 its negation") {
  auto t = base_tree({1, 2});
  t.nodes = {split(0, 0, 0.5, 1, 2), leaf(1, 1, 1), leaf(2, 1, 2)};
  const auto f = tctf(t);
  REQUIRE(f.size() == 2);
  CHECK(f[0].disjuncts.at(0).literals == std::vector<PathLiteral>{{0, false}});
  CHECK(f[1].disjuncts.at(0).literals == std::vector<PathLiteral>{{0, true}});
  CHECK(materialize(t, f[0]) == above(0.5));
  CHECK(materialize(t, f[1]) == make_not(above(0.5)));
}

TEST_CASE("five-split tree: disjunct and conjunct counts follow the leaves") {
  const auto t = five_split_tree();
  const auto f = tctf(t);
  REQUIRE(f.size() == 3);
  const auto& two = f[1];
  REQUIRE(two.disjuncts.size() == 2);
  CHECK(two.disjuncts[0].literals == std::vector<PathLiteral>{{0, false}, {1, true}, {4, true}});
  CHECK(two.disjuncts[1].literals == std::vector<PathLiteral>{{0, true}, {2, false}, {7, false}});
  for (const auto& cf : f)
    for (const auto& path : cf.disjuncts) {
      CHECK(t.nodes[path.leaf].is_leaf());
      CHECK(t.nodes[path.leaf].leaf_class == cf.class_id);
      CHECK(path.literals.size() == t.nodes[path.leaf].depth);
    }
  std::size_t leaves = 0;
  for (const auto& cf : f)
    leaves += cf.disjuncts.size();
  CHECK(leaves == t.leaf_count());
}

TEST_CASE("route consistency on a hand-built tree and a tampered copy") {
  const auto t = five_split_tree();
  std::vector<MultiViewInstance> data;
  for (int i = 0; i <= 20; ++i)
    data.push_back(point(i * 0.05));
  const auto f = tctf(t);
  const auto report = route_consistency(t, f, data);
  CHECK(report.checked == data.size());
  CHECK(report.ok());

  for (const auto& inst : data) {
    std::size_t holds = 0;
    for (const auto& cf : f)
      for (const auto& path : cf.disjuncts)
        holds += path_holds(t, path, inst);
    CHECK(holds == 1);
  }

  // flip the first literal of class 2's first path: instances routed there
  // no longer match, and those routed to the mirrored path match twice
  auto tampered = f;
  tampered[1].disjuncts[0].literals[0].negated = !tampered[1].disjuncts[0].literals[0].negated;
  CHECK_FALSE(route_consistency(t, tampered, data).ok());
}

TEST_CASE("route consistency on a trained tree") {
  const auto raw = make_bump_dataset(20, 3);
  const auto data = build_instances(raw, raw_only());
  TreeConfig config;
  config.train.epochs = 20;
  const auto tree = dtfl(data, raw_only(), 50, 1, config);
  CHECK(route_consistency(tree, tctf(tree), data).ok());
}

TEST_CASE("pruning worked values") {
  auto phi = make_and({above(0.1), above(0.2)}, {0.0029, 0.9971}, 1.0);
  auto pruned = prune_by_weight(phi, 0.01);
  CHECK(pruned.formula == above(0.2));
  REQUIRE(pruned.dropped.size() == 1);
  CHECK(pruned.dropped[0].index == 0);
  CHECK(pruned.dropped[0].normalized_weight == doctest::Approx(0.0029));

  CHECK(prune_by_weight(phi, 0.0).formula.children == phi.children);
  CHECK(prune_by_weight(phi, 0.0).dropped.empty());

  const std::vector<double> w{0.005, 0.08, 0.824, 0.041, 0.01, 0.04};
  auto box = make_always(above(0.0), 3, 8, w, 1.0);
  pruned = prune_by_weight(box, 0.05);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (pruned.formula.weights[i] > 0.0)
      kept.push_back(i);
  std::vector<std::size_t> expected;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] / total >= 0.05)
      expected.push_back(i);
  CHECK(kept == expected);
  CHECK(index_ranges(pruned.formula) == "4..5");
  CHECK(std::accumulate(pruned.formula.weights.begin(), pruned.formula.weights.end(), 0.0) ==
        doctest::Approx(1.0));

  // a node never empties: the heaviest term survives
  pruned = prune_by_weight(make_or({above(0.1), above(0.2), above(0.3)}, {1, 1, 1.5}, 1.0), 0.9);
  CHECK(pruned.formula == above(0.3));

  CHECK_THROWS_AS(prune_by_weight(phi, 1.0), Error);
  CHECK_THROWS_AS(prune_by_weight(phi, -0.1), Error);
}

TEST_CASE("pruning at zero keeps the truth degree") {
  const auto box = make_eventually(make_and({above(0.1), above(0.4)}, {2, 3}, 1.0), 0, 3, {1, 2, 3, 4}, 0.8);
  const auto pruned = prune_by_weight(box, 0.0).formula;
  const Signal x = Signal::univariate({0.2, 0.5, 0.3, 0.9});
  CHECK(eval_formula(x, pruned) == doctest::Approx(eval_formula(x, box)).epsilon(1e-12));
}

TEST_CASE("rendering") {
  Predicate p;
  p.direction = {-1.0};
  p.threshold = 0.06;
  p.offset = 34;
  CHECK(render_text(make_atom(p)) == "x(34) is below -0.0600");
  CHECK(render_text(make_true()) == "true");
  CHECK(render_text(make_not(make_atom(p))) == "not (x(34) is below -0.0600)");
  CHECK(render_text(above(0.25, 3)) == "x(3) is above 0.2500");

  const auto box = make_always(above(0.5), 10, 15, {1, 1, 1, 1, 1, 1}, 1.0);
  CHECK(render_text(box) == "everywhere during 10..15 (x is above 0.5000)");
  auto dia = make_eventually(above(0.5), 0, 4, {1, 0, 0, 1, 1}, 1.0);
  CHECK(render_text(dia) == "somewhere during 0, 3..4 (x is above 0.5000)");

  CHECK(render_text(make_and({above(0.1), above(0.2, 1)}, {1, 1}, 1.0)) ==
        "(x(0) is above 0.1000) and (x(1) is above 0.2000)");
  RenderOptions weighted;
  weighted.show_weights = true;
  CHECK(render_text(make_or({above(0.1), above(0.2, 1)}, {1, 3}, 1.0), weighted) ==
        "(x(0) is above 0.1000)[w=0.2500] or (x(1) is above 0.2000)[w=0.7500]");

  Predicate lin;
  lin.direction = {3.0, -4.0};
  lin.threshold = 0.5;
  CHECK(render_text(make_atom(lin)) == "0.6000*x[0](0) - 0.8000*x[1](0) >= 0.5000");

  Predicate feature;
  feature.direction = {1.0};
  feature.threshold = 0.0;
  feature.offset = 13;
  RenderOptions options;
  options.base_lengths = {10};
  options.aggregations = {Aggregation::Mean, Aggregation::Max};
  options.interval_len = 4;
  // chunks of 4 over 10 samples: [0..3] [4..7] [8..9]; index 13 is max of the first chunk
  CHECK(render_text(make_atom(feature), options) == "max(x[0..3]) is above 0.0000");
  feature.offset = 12;
  CHECK(render_text(make_atom(feature), options) == "mean(x[8..9]) is above 0.0000");
}

TEST_CASE("distinct pruned structures render distinctly") {
  std::vector<FormulaNode> forms{
      above(0.1),
      make_not(above(0.1)),
      above(0.1, 1),
      make_always(above(0.1), 0, 2, {1, 1, 1}, 1.0),
      make_eventually(above(0.1), 0, 2, {1, 1, 1}, 1.0),
      make_always(above(0.1), 0, 2, {1, 0, 1}, 1.0),
      make_and({above(0.1), above(0.2)}, {1, 1}, 1.0),
      make_or({above(0.1), above(0.2)}, {1, 1}, 1.0),
  };
  std::set<std::string> seen;
  for (const auto& f : forms)
    seen.insert(render_text(prune_by_weight(f, 0.05).formula));
  CHECK(seen.size() == forms.size());
}

#include "doctest.h"

#include "wstl/dataset.hpp"
#include "wstl/error.hpp"
#include "wstl/structure.hpp"
#include "wstl/synthetic.hpp"
#include "wstl/training.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

using namespace wstl;

namespace {

ViewConfig raw_only() {
  ViewConfig c;
  c.views = {ViewKind::Raw};
  c.interval_features = false;
  return c;
}

std::vector<MultiViewInstance> labelled(std::initializer_list<int> labels) {
  std::vector<MultiViewInstance> out;
  double v = 0.0;
  for (int label : labels)
    out.push_back(build_multiview(Signal::univariate({v += 0.1, v + 0.05}), raw_only(), label));
  return out;
}

} // namespace

TEST_CASE("encode_labels one-vs-rest") {
  auto data = labelled({1, 2, 3});
  auto enc = encode_labels(data, 2);
  CHECK(enc.targets == std::vector<int>{0, 1, 0});
  CHECK(enc.imbalance_ratio == 2.0);

  data = labelled({1, 1});
  enc = encode_labels(data, 1);
  CHECK(enc.targets == std::vector<int>{1, 1});
  CHECK(enc.imbalance_ratio == 0.0);

  data = labelled({1, 2, 2, 2});
  enc = encode_labels(data, 1);
  CHECK(enc.targets == std::vector<int>{1, 0, 0, 0});
  CHECK(enc.imbalance_ratio == 3.0);
  CHECK(enc.positives() == 1);

  try {
    (void)encode_labels(data, 7);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyClass);
  }
}

TEST_CASE("weighted cross-entropy worked values") {
  const double eps = 1e-7;
  const std::vector<int> pos_neg{1, 0};
  CHECK(weighted_cross_entropy(std::vector<double>{0.5, 0.5}, pos_neg, 1.0, eps) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(weighted_cross_entropy(std::vector<double>{0.5}, std::vector<int>{1}, 1.0, eps) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const double confident = weighted_cross_entropy(std::vector<double>{1.0 - eps, eps}, pos_neg, 1.0, eps);
  CHECK(confident == doctest::Approx(2.0 * eps).epsilon(1e-6));
  // exact 0 and 1 are clamped, so the loss stays finite
  CHECK(std::isfinite(weighted_cross_entropy(std::vector<double>{0.0, 1.0}, pos_neg, 1.0, eps)));
  // the imbalance ratio weighs only the positive term
  CHECK(weighted_cross_entropy(std::vector<double>{0.5, 0.5}, pos_neg, 3.0, eps) ==
        doctest::Approx(4.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("AdamW scalar trace against a hand-stepped oracle") {
  TrainConfig config;
  AdamW opt(1, config);
  std::vector<double> x{0.5};
  const std::vector<ParamKind> kinds{ParamKind::Bias};
  const std::vector<double> grads{1.0, -0.5, 2.0};

  double ref = 0.5, m = 0.0, v = 0.0;
  for (std::size_t t = 1; t <= grads.size(); ++t) {
    const double g = grads[t - 1];
    opt.step(x, std::vector<double>{g}, kinds);
    ref -= 0.1 * 0.01 * ref;
    m = 0.9 * m + 0.1 * g;
    v = 0.999 * v + 0.001 * g * g;
    const double m_hat = m / (1.0 - std::pow(0.9, double(t)));
    const double v_hat = v / (1.0 - std::pow(0.999, double(t)));
    ref -= 0.1 * m_hat / (std::sqrt(v_hat) + 1e-8);
    CHECK(x[0] == doctest::Approx(ref).epsilon(1e-14));
  }
  CHECK(opt.steps() == 3);
  // first step moves by almost exactly the learning rate
  AdamW fresh(1, config);
  std::vector<double> y{0.0};
  fresh.step(y, std::vector<double>{1.0}, kinds);
  CHECK(y[0] == doctest::Approx(-0.1).epsilon(1e-7));
}

TEST_CASE("AdamW zero gradient without decay is a no-op") {
  TrainConfig config;
  config.weight_decay = 0.0;
  AdamW opt(3, config);
  std::vector<double> x{0.3, -2.0, 7.0};
  const auto before = x;
  const std::vector<ParamKind> kinds{ParamKind::Weight, ParamKind::Threshold, ParamKind::Direction};
  for (int i = 0; i < 5; ++i)
    opt.step(x, std::vector<double>(3, 0.0), kinds);
  CHECK(x == before);
}

TEST_CASE("AdamW floors weights but not other parameters") {
  TrainConfig config;
  AdamW opt(2, config);
  std::vector<double> x{0.01, 0.01};
  const std::vector<ParamKind> kinds{ParamKind::Weight, ParamKind::Bias};
  opt.step(x, std::vector<double>{1.0, 1.0}, kinds);
  CHECK(x[0] == 1e-6);
  CHECK(x[1] < 0.0);
  CHECK_THROWS_AS(opt.step(x, std::vector<double>{1.0}, kinds), Error);
}

TEST_CASE("default batch policy") {
  TrainConfig config;
  CHECK(config.resolved_batch_size(10) == 10);
  CHECK(config.resolved_batch_size(256) == 256);
  CHECK(config.resolved_batch_size(257) == 64);
  config.batch_size = 8;
  CHECK(config.resolved_batch_size(100) == 8);
  CHECK(config.resolved_batch_size(5) == 5);
}

TEST_CASE("loss is invariant under scaling one node's weights") {
  auto data = labelled({1, 2, 1, 2});
  const auto enc = encode_labels(data, 1);
  const std::size_t lengths[] = {2};
  NpcModel model;
  model.formula = instantiate(enumerate_structures()[0], lengths, 1, 3);
  model.config = TrainConfig{};
  const double base = loss(model, enc);
  for (double& w : model.formula.weights)
    w *= 4.0;
  CHECK(loss(model, enc) == base);
}

TEST_CASE("backward matches finite differences of the loss") {
  const auto raw = make_bump_dataset(12, 3);
  const auto data = build_instances(raw, raw_only());
  const auto enc = encode_labels(data, 2);
  const std::size_t lengths[] = {50};
  NpcModel model;
  model.config = TrainConfig{};
  model.formula = instantiate(enumerate_structures()[3], lengths, 1, 5);
  model.formula.bias = 0.7;
  model.formula.children.front().predicate->direction = {1.0};
  model.formula.children.front().predicate->threshold = 0.5;

  const auto grad = backward(model, enc);
  Network net(model.formula);
  std::vector<double> params(net.parameters().begin(), net.parameters().end());
  REQUIRE(grad.size() == params.size());
  // bias and threshold are the informative coordinates here
  for (std::size_t i : {params.size() - 3, params.size() - 1}) {
    const double h = 1e-5;
    auto shifted = [&](double delta) {
      Network n2(model.formula);
      n2.parameters()[i] += delta;
      NpcModel m2 = model;
      m2.formula = n2.to_formula();
      return loss(m2, enc);
    };
    const double fd = (shifted(h) - shifted(-h)) / (2 * h);
    CHECK(grad[i] == doctest::Approx(fd).epsilon(1e-4));
  }
}

TEST_CASE("train_npc separates the bump data with B2-eventually") {
  const auto raw = make_bump_dataset(40, 7);
  const auto data = build_instances(raw, raw_only());
  const auto enc = encode_labels(data, 2);
  const std::size_t lengths[] = {50};
  const auto initial = instantiate(enumerate_structures()[3], lengths, 1, 7);
  const auto model = train_npc(enc, initial, TrainConfig{}, 2, 7);
  CHECK_FALSE(model.degenerate);
  REQUIRE(model.epoch_losses.size() == 100);
  for (double l : model.epoch_losses)
    CHECK(std::isfinite(l));
  CHECK(model.best_loss == *std::min_element(model.epoch_losses.begin(), model.epoch_losses.end()));

  std::size_t correct = 0;
  for (std::size_t i = 0; i < enc.size(); ++i)
    correct += (model.truth(*enc.instances[i]) >= 0.5) == (enc.targets[i] == 1);
  CHECK(correct == enc.size());

  // weights stay above the floor
  std::function<void(const FormulaNode&)> floor_check = [&](const FormulaNode& n) {
    for (double w : n.weights)
      CHECK(w >= 1e-6);
    for (const auto& c : n.children)
      floor_check(c);
  };
  floor_check(model.formula);

  SUBCASE("bit-identical on rerun") {
    const auto again = train_npc(enc, initial, TrainConfig{}, 2, 7);
    CHECK(again.formula == model.formula);
    CHECK(again.epoch_losses == model.epoch_losses);
  }
}

TEST_CASE("all-positive data returns the template flagged degenerate") {
  auto data = labelled({1, 1, 1});
  const auto enc = encode_labels(data, 1);
  const std::size_t lengths[] = {2};
  const auto initial = instantiate(enumerate_structures()[2], lengths, 1, 1);
  const auto model = train_npc(enc, initial, TrainConfig{}, 1, 1);
  CHECK(model.degenerate);
  CHECK(model.formula == initial);
}

TEST_CASE("orientation flips fresh directions towards the positives") {
  const auto raw = make_bump_dataset(20, 2);
  const auto data = build_instances(raw, raw_only());
  const std::size_t lengths[] = {50};
  const auto initial = instantiate(enumerate_structures()[0], lengths, 1, 1);
  const auto up = orient_predicates(initial, encode_labels(data, 2));
  const auto down = orient_predicates(initial, encode_labels(data, 1));
  // inside the bump window the bump class is larger
  CHECK(up.children[12].predicate->direction[0] > 0.0);
  CHECK(down.children[12].predicate->direction[0] < 0.0);
  CHECK(std::abs(up.children[12].predicate->direction[0]) == kInitPredicateValue);
}

#include "wstl/verify.hpp"

#include "wstl/error.hpp"
#include "wstl/formula_io.hpp"
#include "wstl/network.hpp"
#include "wstl/random.hpp"
#include "wstl/structure.hpp"
#include "wstl/tree.hpp"
#include "wstl/views.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <sstream>

namespace wstl::verify {

// --- oracles ---------------------------------------------------------------

namespace {

double clamp_with_margin(double z, double& margin) {
  margin = std::min(margin, std::min(z, 1.0 - z));
  return z < 0.0 ? 0.0 : (z > 1.0 ? 1.0 : z);
}

std::optional<std::size_t> first_atom_view(const FormulaNode& node) {
  if (node.kind == NodeKind::Atom)
    return node.predicate->view;
  for (const auto& c : node.children)
    if (auto v = first_atom_view(c))
      return v;
  return std::nullopt;
}

double eval(const FormulaNode& node, std::span<const Signal> views, std::size_t k, double& margin) {
  switch (node.kind) {
  case NodeKind::True:
    return 1.0;
  case NodeKind::Atom: {
    const Predicate& p = *node.predicate;
    const Signal& x = views[p.view];
    const std::size_t t = k + p.offset;
    if (t >= x.length())
      fail(ErrorCode::OutOfRange, "oracle: atom reads past the end of its view");
    std::vector<double> a(p.dim(), 0.0);
    if (p.family == PredicateFamily::AxisAligned) {
      a[p.feature] = p.direction[p.feature] < 0.0 ? -1.0 : 1.0;
    } else {
      double norm2 = 0.0;
      for (double v : p.direction)
        norm2 += v * v;
      const double norm = std::sqrt(norm2);
      if (norm < 1e-12)
        a[0] = 1.0;
      else
        for (std::size_t j = 0; j < a.size(); ++j)
          a[j] = p.direction[j] / norm;
    }
    double z = -p.threshold;
    for (std::size_t j = 0; j < a.size(); ++j)
      z += a[j] * x.value(t, j);
    return 1.0 / (1.0 + std::exp(-z));
  }
  case NodeKind::Not:
    if (node.children.front().kind == NodeKind::Not)
      return eval(node.children.front().children.front(), views, k, margin);
    return 1.0 - eval(node.children.front(), views, k, margin);
  default:
    break;
  }

  double total = 0.0;
  for (double w : node.weights)
    total += w;
  double sum = 0.0;
  if (node.kind == NodeKind::And || node.kind == NodeKind::Or) {
    for (std::size_t i = 0; i < node.children.size(); ++i) {
      const double p = eval(node.children[i], views, k, margin);
      sum += node.weights[i] / total * (node.kind == NodeKind::And ? 1.0 - p : p);
    }
  } else {
    const auto scope = first_atom_view(node.children.front());
    const std::size_t limit = views[scope.value_or(0)].length();
    for (std::size_t s = node.window_lo; s <= node.window_hi; ++s) {
      if (k + s >= limit)
        continue;
      const double p = eval(node.children.front(), views, k + s, margin);
      const double w = node.weights[s - node.window_lo] / total;
      sum += w * (node.kind == NodeKind::Always ? 1.0 - p : p);
    }
  }
  const bool conjunctive = node.kind == NodeKind::And || node.kind == NodeKind::Always;
  return clamp_with_margin(conjunctive ? node.bias - sum : 1.0 - node.bias + sum, margin);
}

} // namespace

double naive_eval_margin(const FormulaNode& node, std::span<const Signal> views, std::size_t k, double& margin) {
  margin = std::numeric_limits<double>::infinity();
  return eval(node, views, k, margin);
}

double naive_eval(const FormulaNode& node, std::span<const Signal> views, std::size_t k) {
  double margin = 0.0;
  return naive_eval_margin(node, views, k, margin);
}

std::vector<double> naive_dft_magnitude(std::span<const double> x) {
  const std::size_t n = x.size();
  const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  // e^{-2 pi i m / n} for every residue m = (w k) mod n
  std::vector<long double> cosines(n), sines(n);
  for (std::size_t m = 0; m < n; ++m) {
    const long double angle = two_pi * static_cast<long double>(m) / static_cast<long double>(n);
    cosines[m] = std::cos(angle);
    sines[m] = std::sin(angle);
  }
  std::vector<double> out(n);
  for (std::size_t w = 0; w < n; ++w) {
    long double re = 0.0L, im = 0.0L;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t m = (w * k) % n;
      re += x[k] * cosines[m];
      im -= x[k] * sines[m];
    }
    out[w] = static_cast<double>(std::sqrt(re * re + im * im));
  }
  return out;
}

double brute_gini(std::span<const int> labels, std::span<const bool> satisfied) {
  const std::size_t n = labels.size();
  if (n == 0)
    return 0.0;
  const auto [min_label, max_label] = std::minmax_element(labels.begin(), labels.end());
  double j = 0.0;
  for (bool side : {true, false}) {
    std::size_t members = 0;
    for (std::size_t i = 0; i < n; ++i)
      members += satisfied[i] == side ? 1 : 0;
    if (members == 0)
      continue;
    double impurity = 1.0;
    for (int c = *min_label; c <= *max_label; ++c) {
      std::size_t count = 0;
      for (std::size_t i = 0; i < n; ++i)
        count += satisfied[i] == side && labels[i] == c ? 1 : 0;
      const double f = static_cast<double>(count) / static_cast<double>(members);
      impurity -= f * f;
    }
    j += static_cast<double>(members) / static_cast<double>(n) * impurity;
  }
  return j;
}

// --- suites ----------------------------------------------------------------

AfSet production_afs() {
  return {[](auto w, double b, auto p) { return and_af(w, b, p); },
          [](auto w, double b, auto p) { return or_af(w, b, p); }};
}

namespace {

enum SuiteTag : std::uint64_t {
  kDeMorgan = 1,
  kNonimpact,
  kScale,
  kMonotone,
  kTemporal,
  kGradient,
  kForward,
  kDft,
  kGini,
};

class Runner {
public:
  Runner(std::string name, std::uint64_t seed) : seed_(seed), start_(std::chrono::steady_clock::now()) {
    result_.name = std::move(name);
  }

  Rng rng(SuiteTag tag, std::size_t trial) const { return make_rng(seed_, {tag, trial}); }

  // Record one trial with its error; `ok` decides pass/fail.
  void record(std::size_t trial, double error, bool ok, const std::string& detail) {
    ++result_.trials;
    if (std::isfinite(error))
      result_.max_error = std::max(result_.max_error, error);
    if (!ok) {
      if (result_.failures == 0) {
        std::ostringstream os;
        os << "seed=" << seed_ << " trial=" << trial << ": " << detail;
        result_.counterexample = os.str();
      }
      ++result_.failures;
    }
  }

  SuiteResult finish() {
    result_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(result_);
  }

private:
  std::uint64_t seed_;
  std::chrono::steady_clock::time_point start_;
  SuiteResult result_;
};

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

std::size_t pick(Rng& rng, std::size_t lo, std::size_t hi) { // inclusive
  return lo + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(hi - lo + 1));
}

// Nonnegative weights, some exactly zero, at least one positive.
std::vector<double> random_weights(Rng& rng, std::size_t n) {
  std::vector<double> w(n);
  for (auto& v : w)
    v = uniform01(rng) < 0.2 ? 0.0 : uniform01(rng);
  if (std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; }))
    w[pick(rng, 0, n - 1)] = uniform(rng, 0.1, 1.0);
  return w;
}

std::vector<double> random_truths(Rng& rng, std::size_t n) {
  std::vector<double> p(n);
  for (auto& v : p)
    v = uniform01(rng);
  return p;
}

std::string describe(const std::vector<double>& w, double beta, const std::vector<double>& p) {
  std::ostringstream os;
  os << "w=[";
  for (std::size_t i = 0; i < w.size(); ++i)
    os << (i ? "," : "") << format_real(w[i]);
  os << "] beta=" << format_real(beta) << " p=[";
  for (std::size_t i = 0; i < p.size(); ++i)
    os << (i ? "," : "") << format_real(p[i]);
  os << "]";
  return os.str();
}

} // namespace

SuiteResult de_morgan(std::size_t trials, std::uint64_t seed, const AfSet& afs) {
  Runner run("de-morgan", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kDeMorgan, t);
    const std::size_t n = pick(rng, 2, 8);
    const auto w = random_weights(rng, n);
    const double beta = uniform(rng, -1.0, 2.0);
    const auto p = random_truths(rng, n);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i)
      q[i] = 1.0 - p[i];
    const double lhs = afs.or_fn(w, beta, p);
    const double rhs = 1.0 - afs.and_fn(w, beta, q);
    const double err = std::abs(lhs - rhs);
    run.record(t, err, err <= 1e-12, describe(w, beta, p) + " or=" + format_real(lhs) + " 1-and(1-p)=" + format_real(rhs));
  }
  return run.finish();
}

SuiteResult zero_weight_nonimpact(std::size_t trials, std::uint64_t seed, const AfSet& afs) {
  Runner run("zero-weight-nonimpact", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kNonimpact, t);
    const std::size_t n = pick(rng, 1, 7);
    auto w = random_weights(rng, n);
    const double beta = uniform(rng, -1.0, 2.0);
    auto p = random_truths(rng, n);
    const double before_and = afs.and_fn(w, beta, p), before_or = afs.or_fn(w, beta, p);
    const std::size_t at = pick(rng, 0, n);
    w.insert(w.begin() + static_cast<std::ptrdiff_t>(at), 0.0);
    p.insert(p.begin() + static_cast<std::ptrdiff_t>(at), uniform01(rng));
    const double after_and = afs.and_fn(w, beta, p), after_or = afs.or_fn(w, beta, p);
    const double err = std::max(std::abs(after_and - before_and), std::abs(after_or - before_or));
    run.record(t, err, err == 0.0, describe(w, beta, p));
  }
  return run.finish();
}

SuiteResult weight_scale_invariance(std::size_t trials, std::uint64_t seed, const AfSet& afs) {
  Runner run("weight-scale-invariance", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kScale, t);
    const std::size_t n = pick(rng, 1, 8);
    const auto w = random_weights(rng, n);
    const double beta = uniform(rng, -1.0, 2.0);
    const auto p = random_truths(rng, n);
    const double c = std::ldexp(1.0, static_cast<int>(pick(rng, 0, 60)) - 30);
    std::vector<double> scaled(n);
    for (std::size_t i = 0; i < n; ++i)
      scaled[i] = c * w[i];
    const double err = std::max(std::abs(afs.and_fn(scaled, beta, p) - afs.and_fn(w, beta, p)),
                                std::abs(afs.or_fn(scaled, beta, p) - afs.or_fn(w, beta, p)));
    run.record(t, err, err == 0.0, describe(w, beta, p) + " c=" + format_real(c));
  }
  return run.finish();
}

SuiteResult monotonicity(std::size_t trials, std::uint64_t seed, const AfSet& afs) {
  Runner run("monotonicity", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kMonotone, t);
    const std::size_t n = pick(rng, 1, 8);
    const auto w = random_weights(rng, n);
    const double beta = uniform(rng, -1.0, 2.0);
    const auto p = random_truths(rng, n);
    auto raised = p;
    const std::size_t j = pick(rng, 0, n - 1);
    const double d = 0.2 * (1.0 - uniform01(rng)); // (0, 0.2]
    raised[j] = std::min(1.0, p[j] + d);
    const double drop = std::max(afs.and_fn(w, beta, p) - afs.and_fn(w, beta, raised),
                                 afs.or_fn(w, beta, p) - afs.or_fn(w, beta, raised));
    run.record(t, std::max(drop, 0.0), drop <= 0.0,
               describe(w, beta, p) + " j=" + std::to_string(j) + " d=" + format_real(d));
  }
  return run.finish();
}

SuiteResult temporal_expansion(std::size_t trials, std::uint64_t seed) {
  Runner run("temporal-expansion", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kTemporal, t);
    const std::size_t n = pick(rng, 1, 30);
    const auto w = random_weights(rng, n);
    const double beta = uniform(rng, -1.0, 2.0);
    const auto p = random_truths(rng, n);
    std::unique_ptr<bool[]> valid(new bool[n]);
    std::fill(valid.get(), valid.get() + n, true);
    const std::span<const bool> mask(valid.get(), n);
    const double err = std::max(std::abs(always_af(w, beta, p, mask) - and_af(w, beta, p)),
                                std::abs(eventually_af(w, beta, p, mask) - or_af(w, beta, p)));
    run.record(t, err, err == 0.0, describe(w, beta, p));
  }
  return run.finish();
}

// --- random formulas -------------------------------------------------------

namespace {

class FormulaGen {
public:
  FormulaGen(Rng& rng, std::span<const std::size_t> lengths, std::size_t dim)
      : rng_(rng), lengths_(lengths), dim_(dim) {}

  FormulaNode node(std::size_t depth, std::optional<std::size_t> view, bool temporal) {
    if (depth == 0 || uniform01(rng_) < 0.25)
      return leaf(view, temporal);
    const std::size_t choice = pick(rng_, 0, 4);
    if (choice == 0)
      return make_not(node(depth - 1, view, temporal));
    if (choice <= 2) {
      const std::size_t n = pick(rng_, 2, 4);
      std::vector<FormulaNode> children;
      for (std::size_t i = 0; i < n; ++i)
        children.push_back(node(depth - 1, view, temporal));
      auto w = random_weights(rng_, n);
      const double beta = uniform(rng_, -0.5, 1.5);
      return choice == 1 ? make_and(std::move(children), std::move(w), beta)
                         : make_or(std::move(children), std::move(w), beta);
    }
    const std::size_t v = view.value_or(pick(rng_, 0, lengths_.size() - 1));
    const std::size_t lo = pick(rng_, 0, lengths_[v] - 1);
    const std::size_t hi = pick(rng_, lo, std::min(lo + 8, lengths_[v] + 2));
    auto child = node(depth - 1, v, true);
    auto w = random_weights(rng_, hi - lo + 1);
    const double beta = uniform(rng_, -0.5, 1.5);
    return choice == 3 ? make_eventually(std::move(child), lo, hi, std::move(w), beta)
                       : make_always(std::move(child), lo, hi, std::move(w), beta);
  }

private:
  FormulaNode leaf(std::optional<std::size_t> view, bool temporal) {
    if (uniform01(rng_) < 0.05)
      return make_true();
    Predicate p;
    p.direction.resize(dim_);
    for (auto& a : p.direction)
      a = uniform(rng_, -1.0, 1.0);
    if (uniform01(rng_) < 0.2) {
      p.family = PredicateFamily::AxisAligned;
      p.feature = pick(rng_, 0, dim_ - 1);
      for (std::size_t j = 0; j < dim_; ++j)
        if (j != p.feature)
          p.direction[j] = 0.0;
    }
    p.threshold = uniform(rng_, -1.0, 1.0);
    p.view = view.value_or(pick(rng_, 0, lengths_.size() - 1));
    p.offset = temporal ? 0 : pick(rng_, 0, 2);
    return make_atom(std::move(p));
  }

  Rng& rng_;
  std::span<const std::size_t> lengths_;
  std::size_t dim_;
};

std::vector<Signal> random_views(Rng& rng, std::span<const std::size_t> lengths, std::size_t dim) {
  std::vector<Signal> views;
  for (std::size_t len : lengths) {
    std::vector<double> samples(len * dim);
    for (auto& v : samples)
      v = uniform(rng, -1.0, 1.0);
    views.emplace_back(dim, std::move(samples));
  }
  return views;
}

// Time indices at which each child of `node` is evaluated, given the node's own.
std::vector<std::size_t> child_times(const FormulaNode& node, const std::vector<std::size_t>& times,
                                     std::span<const Signal> views) {
  if (!node.is_temporal())
    return times;
  const auto scope = first_atom_view(node.children.front());
  const std::size_t limit = views[scope.value_or(0)].length();
  std::vector<std::size_t> out;
  for (std::size_t t : times)
    for (std::size_t s = node.window_lo; s <= node.window_hi; ++s)
      if (t + s < limit)
        out.push_back(t + s);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Choose every bias bottom-up so the clamp arguments sit around 0.5.
void center_biases(FormulaNode& node, const std::vector<std::size_t>& times, std::span<const Signal> views, Rng& rng) {
  const auto inner = child_times(node, times, views);
  for (auto& c : node.children)
    center_biases(c, inner, views, rng);
  if (!node.is_weighted() || times.empty())
    return;
  // pre-clamp = beta - s (conjunctive) or 1 - beta + s (disjunctive), with s
  // the weighted sum; both are 0.5 at beta = 0.5 + mean(s).
  const bool conjunctive = node.kind == NodeKind::And || node.kind == NodeKind::Always;
  double total = 0.0;
  for (double w : node.weights)
    total += w;
  double mean = 0.0;
  for (std::size_t t : times) {
    double margin = 0.0, s = 0.0;
    if (node.is_temporal()) {
      const auto scope = first_atom_view(node.children.front());
      const std::size_t limit = views[scope.value_or(0)].length();
      for (std::size_t k = node.window_lo; k <= node.window_hi; ++k)
        if (t + k < limit) {
          const double p = naive_eval_margin(node.children.front(), views, t + k, margin);
          s += node.weights[k - node.window_lo] / total * (conjunctive ? 1.0 - p : p);
        }
    } else {
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        const double p = naive_eval_margin(node.children[i], views, t, margin);
        s += node.weights[i] / total * (conjunctive ? 1.0 - p : p);
      }
    }
    mean += s;
  }
  mean /= static_cast<double>(times.size());
  node.bias = 0.5 + mean + uniform(rng, -0.05, 0.05);
}

void randomize_parameters(FormulaNode& node, Rng& rng) {
  for (auto& c : node.children)
    randomize_parameters(c, rng);
  if (node.kind == NodeKind::Atom) {
    auto& p = *node.predicate;
    const bool axis = p.family == PredicateFamily::AxisAligned;
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (std::size_t j = 0; j < p.dim(); ++j) {
        p.direction[j] = axis && j != p.feature ? 0.0 : uniform(rng, -1.0, 1.0);
        norm2 += p.direction[j] * p.direction[j];
      }
    } while (norm2 < 0.04);
    p.threshold = uniform(rng, -0.3, 0.3);
  }
  for (auto& w : node.weights)
    w = uniform(rng, 0.2, 1.0);
}

} // namespace

FormulaNode random_formula(std::uint64_t seed, std::span<const std::size_t> lengths, std::size_t dim) {
  Rng rng = make_rng(seed, {0x666f726du});
  FormulaGen gen(rng, lengths, dim);
  return gen.node(4, std::nullopt, false);
}

SuiteResult gradient_check(std::size_t trials, std::uint64_t seed) {
  Runner run("gradient-check", seed);
  constexpr double kStep = 1e-5;
  constexpr double kTolerance = 1e-4;
  constexpr double kMargin = 1e-3;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kGradient, t);
    const auto structures = enumerate_structures(uniform01(rng) < 0.25 ? PredicateFamily::AxisAligned
                                                                       : PredicateFamily::LinearHalfspace);
    const auto& structure = structures[t % structures.size()];
    const std::size_t dim = pick(rng, 1, 3);
    std::vector<std::size_t> lengths(pick(rng, 1, 3));
    for (auto& len : lengths)
      len = pick(rng, 2, 30);

    FormulaNode formula;
    std::vector<Signal> views;
    double margin = -1.0;
    for (int attempt = 0; attempt < 100 && margin < kMargin; ++attempt) {
      formula = instantiate(structure, lengths, dim, rng());
      randomize_parameters(formula, rng);
      views = random_views(rng, lengths, dim);
      center_biases(formula, {0}, views, rng);
      naive_eval_margin(formula, views, 0, margin);
    }
    if (margin < kMargin) {
      run.record(t, NAN, false, std::string(to_string(structure.id)) + ": no interior configuration found");
      continue;
    }

    Network net(formula);
    Tape tape;
    net.forward(views, 0, tape);
    std::vector<double> grad(net.parameter_count(), 0.0);
    net.backward(tape, 1.0, grad);

    double worst = 0.0;
    std::size_t worst_index = 0;
    double worst_a = 0.0, worst_f = 0.0;
    auto params = net.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + kStep;
      const double up = net.forward(views, 0, tape);
      params[i] = keep - kStep;
      const double down = net.forward(views, 0, tape);
      params[i] = keep;
      const double fd = (up - down) / (2.0 * kStep);
      const double rel = std::abs(grad[i] - fd) / std::max({std::abs(grad[i]), std::abs(fd), 1e-6});
      if (rel > worst) {
        worst = rel;
        worst_index = i;
        worst_a = grad[i];
        worst_f = fd;
      }
    }
    std::ostringstream os;
    os << to_string(structure.id) << " parameter " << worst_index << " analytic=" << format_real(worst_a)
       << " numeric=" << format_real(worst_f) << " formula=" << to_canonical(formula);
    run.record(t, worst, worst < kTolerance, os.str());
  }
  return run.finish();
}

SuiteResult forward_oracle(std::size_t trials, std::uint64_t seed) {
  Runner run("forward-oracle", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kForward, t);
    const std::size_t dim = pick(rng, 1, 3);
    std::vector<std::size_t> lengths(pick(rng, 1, 3));
    for (auto& len : lengths)
      len = pick(rng, 5, 30);
    const auto formula = random_formula(rng(), lengths, dim);
    const auto views = random_views(rng, lengths, dim);
    const double expected = naive_eval(formula, views, 0);
    const double actual = Network(formula).evaluate(views, 0);
    const double err = std::abs(expected - actual);
    run.record(t, err, err <= 1e-12,
               "oracle=" + format_real(expected) + " network=" + format_real(actual) + " formula=" + to_canonical(formula));
  }
  return run.finish();
}

SuiteResult dft_oracle(std::size_t trials, std::uint64_t seed) {
  Runner run("dft-oracle", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kDft, t);
    const std::size_t n = pick(rng, 1, 1024);
    std::vector<double> x(n);
    for (auto& v : x)
      v = uniform(rng, -1.0, 1.0);
    const auto expected = naive_dft_magnitude(x);
    const auto actual = to_spectral(Signal::univariate(x));
    double err = 0.0, asym = 0.0;
    for (std::size_t w = 0; w < n; ++w) {
      err = std::max(err, std::abs(actual.value(w, 0) - expected[w]));
      if (w > 0)
        asym = std::max(asym, std::abs(actual.value(w, 0) - actual.value(n - w, 0)));
    }
    run.record(t, std::max(err, asym), err <= 1e-9 && asym <= 1e-9,
               "K=" + std::to_string(n) + " error=" + format_real(err) + " asymmetry=" + format_real(asym));
  }
  return run.finish();
}

SuiteResult gini_oracle(std::size_t trials, std::uint64_t seed) {
  Runner run("gini-oracle", seed);
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng = run.rng(kGini, t);
    const std::size_t n = pick(rng, 1, 40);
    const int classes = static_cast<int>(pick(rng, 1, 5));
    std::vector<int> labels(n);
    std::unique_ptr<bool[]> sat(new bool[n]);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = 1 + static_cast<int>(pick(rng, 0, static_cast<std::size_t>(classes - 1)));
      sat[i] = uniform01(rng) < 0.5;
    }
    const std::span<const bool> side(sat.get(), n);
    const double expected = brute_gini(labels, side);
    const double actual = gini_criterion(labels, side);
    const double err = std::abs(expected - actual);
    run.record(t, err, err <= 1e-12, "n=" + std::to_string(n) + " brute=" + format_real(expected) +
                                         " criterion=" + format_real(actual));
  }
  return run.finish();
}

} // namespace wstl::verify

#include "doctest.h"

#include "wstl/error.hpp"
#include "wstl/logic.hpp"
#include "wstl/random.hpp"

#include <cmath>
#include <algorithm>
#include <limits>
#include <memory>
#include <vector>

using namespace wstl;

namespace {

Predicate scalar_predicate(double a, double u) {
  Predicate p;
  p.direction = {a};
  p.threshold = u;
  return p;
}

// std::vector<bool> has no contiguous storage, so masks go through a buffer.
struct Mask {
  Mask(std::initializer_list<bool> bits) : data(std::make_unique<bool[]>(bits.size())), size(bits.size()) {
    std::copy(bits.begin(), bits.end(), data.get());
  }
  std::unique_ptr<bool[]> data;
  std::size_t size;
  std::span<const bool> span() const { return {data.get(), size}; }
};

} // namespace

TEST_CASE("clamp_unit saturates and rejects non-finite input") {
  CHECK(clamp_unit(0.7) == 0.7);
  CHECK(clamp_unit(-3.0) == 0.0);
  CHECK(clamp_unit(1.2) == 1.0);
  CHECK_THROWS_AS(clamp_unit(std::numeric_limits<double>::quiet_NaN()), Error);
  CHECK_THROWS_AS(clamp_unit(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("eval_predicate is a sigmoid of the normalized margin") {
  const std::vector<double> zero{0.0}, fifty{50.0};
  CHECK(eval_predicate(zero, scalar_predicate(1.0, 0.0)) == doctest::Approx(0.5));
  CHECK(std::abs(eval_predicate(fifty, scalar_predicate(1.0, 0.0)) - 1.0) < 1e-9);

  Predicate p;
  p.direction = {0.6, 0.8};
  p.threshold = 1.0;
  const std::vector<double> ones{1.0, 1.0};
  CHECK(eval_predicate(ones, p) == doctest::Approx(1.0 / (1.0 + std::exp(-0.4))).epsilon(1e-14));
  CHECK(eval_predicate(ones, p) == doctest::Approx(0.598688).epsilon(1e-6));

  // Only the direction matters, not its length.
  p.direction = {6.0, 8.0};
  CHECK(eval_predicate(ones, p) == doctest::Approx(0.598688).epsilon(1e-6));

  CHECK_THROWS_AS(eval_predicate(std::vector<double>{1.0}, p), Error);
}

TEST_CASE("degenerate and axis-aligned directions") {
  Predicate p;
  p.direction = {0.0, 0.0};
  CHECK(p.unit_direction() == std::vector<double>{1.0, 0.0});
  p.family = PredicateFamily::AxisAligned;
  p.feature = 1;
  p.direction = {0.0, -0.3};
  CHECK(p.unit_direction() == std::vector<double>{0.0, -1.0});
}

TEST_CASE("and_af worked values") {
  const std::vector<double> w11{1, 1}, w10{1, 0}, w31{3, 1};
  CHECK(and_af(w11, 1.0, std::vector<double>{1, 1}) == 1.0);
  CHECK(and_af(w10, 1.0, std::vector<double>{0.3, 0.99}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(and_af(w31, 1.0, std::vector<double>{0.8, 0.4}) == doctest::Approx(1.0 - 0.75 * 0.2 - 0.25 * 0.6).epsilon(1e-15));
  CHECK(and_af(w31, 1.0, std::vector<double>{0.8, 0.4}) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("or_af worked values") {
  const std::vector<double> w11{1, 1};
  CHECK(or_af(w11, 1.0, std::vector<double>{0, 0}) == 0.0);
  CHECK(or_af(w11, 1.0, std::vector<double>{1, 0}) == doctest::Approx(0.5));
}

TEST_CASE("n-ary operators reject bad weights") {
  CHECK_THROWS_AS(and_af(std::vector<double>{0, 0}, 1.0, std::vector<double>{0.5, 0.5}), Error);
  CHECK_THROWS_AS(or_af(std::vector<double>{-1, 2}, 1.0, std::vector<double>{0.5, 0.5}), Error);
  CHECK_THROWS_AS(and_af(std::vector<double>{1, 1}, 1.0, std::vector<double>{0.5}), Error);
  try {
    and_af(std::vector<double>{0, 0}, 1.0, std::vector<double>{0.5, 0.5});
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateWeights);
  }
}

TEST_CASE("eventually_af masks out-of-range terms but keeps full normalization") {
  Mask all3{true, true, true};
  CHECK(eventually_af(std::vector<double>{1, 1, 1}, 1.0, std::vector<double>{0, 0, 0}, all3.span()) == 0.0);
  CHECK(eventually_af(std::vector<double>{0, 1, 0}, 1.0, std::vector<double>{0.1, 0.9, 0.1}, all3.span()) ==
        doctest::Approx(0.9));
  Mask half{true, false};
  CHECK(eventually_af(std::vector<double>{1, 1}, 1.0, std::vector<double>{1, 1}, half.span()) == doctest::Approx(0.5));
}

TEST_CASE("always_af worked values and masked expansion") {
  Mask all3{true, true, true}, all2{true, true};
  CHECK(always_af(std::vector<double>{1, 1, 1}, 1.0, std::vector<double>{1, 1, 1}, all3.span()) == 1.0);
  CHECK(always_af(std::vector<double>{1, 1}, 1.0, std::vector<double>{1, 0}, all2.span()) == doctest::Approx(0.5));

  // masked-out entries behave like truth 1 in the n-ary conjunction
  Rng rng = make_rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 10;
    std::vector<double> w(n), p(n), filled(n);
    std::vector<char> mask(n);
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = uniform01(rng) + 0.01;
      p[i] = uniform01(rng);
      mask[i] = uniform01(rng) < 0.7;
      filled[i] = mask[i] ? p[i] : 1.0;
    }
    const double beta = -1.0 + 3.0 * uniform01(rng);
    const std::span<const bool> m(reinterpret_cast<const bool*>(mask.data()), n);
    CHECK(always_af(w, beta, p, m) == doctest::Approx(and_af(w, beta, filled)).epsilon(1e-14));
  }
}

TEST_CASE("eval_formula basics") {
  const Signal x = Signal::univariate({0.0, 1.0, 2.0});
  Predicate p = scalar_predicate(1.0, 0.0);
  CHECK(eval_formula(x, make_not(make_atom(p)), 0) == doctest::Approx(0.5));
  for (std::size_t k = 0; k < 3; ++k)
    CHECK(eval_formula(x, make_true(), k) == 1.0);
  CHECK_THROWS_AS(eval_formula(x, make_atom(p), 3), Error);
}

TEST_CASE("always-eventually over a predicate that is 1 everywhere") {
  // a sigmoid saturates to exactly 1.0 in double precision for large margins
  const Signal x = Signal::univariate(std::vector<double>(6, 100.0));
  const auto inner = make_eventually(make_atom(scalar_predicate(1.0, 0.0)), 0, 2, {1, 1, 1}, 1.0);
  const auto phi = make_always(inner, 0, 2, {1, 1, 1}, 1.0);
  CHECK(eval_formula(x, phi, 0) == 1.0);
}

TEST_CASE("negation is an exact involution and complement") {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Signal x = Signal::univariate({2.0 * uniform01(rng) - 1.0});
    const auto atom = make_atom(scalar_predicate(uniform01(rng) - 0.5, uniform01(rng) - 0.5));
    const double p = eval_formula(x, atom, 0);
    CHECK(eval_formula(x, make_not(make_not(atom)), 0) == p);
    CHECK(eval_formula(x, make_not(atom), 0) + p == 1.0);
  }
}

TEST_CASE("impact ordering: larger weight, larger sensitivity") {
  Rng rng = make_rng(9);
  int checked = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> w{uniform01(rng) + 0.01, uniform01(rng) + 0.01, uniform01(rng) + 0.01};
    const double shared = uniform01(rng);
    std::vector<double> p{shared, shared, uniform01(rng)};
    const double beta = 0.5 + uniform01(rng);
    const double h = 1e-7;
    for (auto af : {&and_af, &or_af}) {
      const double base = af(w, beta, p);
      if (base <= 0.01 || base >= 0.99)
        continue;
      auto p0 = p, p1 = p;
      p0[0] += h;
      p1[1] += h;
      const double d0 = af(w, beta, p0) - base, d1 = af(w, beta, p1) - base;
      if (w[0] >= w[1])
        CHECK(d0 >= d1 - 1e-15);
      else
        CHECK(d1 >= d0 - 1e-15);
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("validate rejects malformed formulas") {
  Predicate p = scalar_predicate(1.0, 0.0);
  FormulaNode bad_arity;
  bad_arity.kind = NodeKind::And;
  bad_arity.children = {make_atom(p)};
  bad_arity.weights = {1.0};
  CHECK_THROWS_AS(validate(bad_arity), Error);

  auto window = make_eventually(make_atom(p), 0, 2, {1, 1, 1}, 1.0);
  window.weights.pop_back();
  CHECK_THROWS_AS(validate(window), Error);

  auto mixed = make_always(make_and({make_atom(p), make_atom([&] {
                                       Predicate q = p;
                                       q.view = 1;
                                       return q;
                                     }())},
                                    {1, 1}, 1.0),
                           0, 0, {1}, 1.0);
  CHECK_THROWS_AS(scope_view(mixed), Error);
}

TEST_CASE("parameter count by traversal") {
  Predicate p;
  p.direction = {1.0, 0.0};
  const auto phi = make_and({make_atom(p), make_eventually(make_atom(p), 0, 3, {1, 1, 1, 1}, 1.0)}, {1, 1}, 1.0);
  // and: 2 weights + beta; atom: 2 + 1; eventually: 4 + 1; atom: 3
  CHECK(parameter_count(phi) == 3 + 3 + 5 + 3);
}

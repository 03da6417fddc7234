#include "doctest.h"

#include "wstl/error.hpp"
#include "wstl/logic.hpp"
#include "wstl/verify.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace wstl;

TEST_CASE("each property suite passes on a small run") {
  for (const auto& r : {verify::de_morgan(300, 1), verify::zero_weight_nonimpact(300, 1),
                        verify::weight_scale_invariance(300, 1), verify::monotonicity(300, 1),
                        verify::temporal_expansion(300, 1), verify::gradient_check(20, 1),
                        verify::forward_oracle(100, 1), verify::dft_oracle(20, 1), verify::gini_oracle(300, 1)}) {
    INFO(r.name << ": " << r.counterexample);
    CHECK(r.passed());
    CHECK(r.trials > 0);
  }
}

TEST_CASE("an unclamped Or breaks De Morgan and the suite says so") {
  auto afs = verify::production_afs();
  afs.or_fn = [](std::span<const double> w, double beta, std::span<const double> p) {
    double total = 0.0, z = 1.0 - beta;
    for (double x : w)
      total += x;
    for (std::size_t j = 0; j < w.size(); ++j)
      z += w[j] / total * p[j];
    return z;
  };
  const auto r = verify::de_morgan(500, 2, afs);
  CHECK_FALSE(r.passed());
  CHECK(r.failures > 0);
  CHECK(r.counterexample.find("seed=2") != std::string::npos);
}

TEST_CASE("a wrong And weighting breaks the zero-weight property") {
  auto afs = verify::production_afs();
  afs.and_fn = [](std::span<const double> w, double beta, std::span<const double> p) {
    double z = beta;
    for (std::size_t j = 0; j < w.size(); ++j)
      z -= (1.0 - p[j]) / static_cast<double>(w.size());
    return clamp_unit(z);
  };
  CHECK_FALSE(verify::zero_weight_nonimpact(300, 3, afs).passed());
}

TEST_CASE("reference DFT magnitude") {
  const std::vector<double> x{1.0, 0.0, -1.0, 0.0};
  const auto m = verify::naive_dft_magnitude(x);
  REQUIRE(m.size() == 4);
  CHECK(m[0] == doctest::Approx(0.0));
  CHECK(m[1] == doctest::Approx(2.0));
  CHECK(m[2] == doctest::Approx(0.0));
  CHECK(m[3] == doctest::Approx(2.0));
}

TEST_CASE("random formulas are valid and replayable") {
  const std::size_t lengths[] = {6, 6, 5};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto f = verify::random_formula(seed, lengths, 2);
    CHECK_NOTHROW(validate(f));
    CHECK(verify::random_formula(seed, lengths, 2) == f);
  }
}

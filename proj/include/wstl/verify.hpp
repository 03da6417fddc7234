#pragma once

// Reference implementations written independently of the production code
// paths, and randomized property suites that compare the two. Each trial of
// a suite draws from its own stream keyed by (seed, suite, trial), so a
// reported failure can be replayed in isolation.

#include "wstl/logic.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace wstl::verify {

// --- oracles ---------------------------------------------------------------

/// Direct recursive evaluation of the quantitative semantics.
double naive_eval(const FormulaNode& node, std::span<const Signal> views, std::size_t k);

/// Same as naive_eval, also reporting the smallest distance of any clamp
/// argument to the boundary {0, 1} (negative when a clamp saturated).
double naive_eval_margin(const FormulaNode& node, std::span<const Signal> views, std::size_t k, double& margin);

/// |DFT| by the O(K^2) definition, in long double with exact angle reduction.
std::vector<double> naive_dft_magnitude(std::span<const double> x);

/// Split impurity by explicit per-class fraction counting.
double brute_gini(std::span<const int> labels, std::span<const bool> satisfied);

// --- suites ----------------------------------------------------------------

using AfFunction = std::function<double(std::span<const double>, double, std::span<const double>)>;

/// The n-ary operators under test; tests swap in faulty versions to check
/// that the suites notice.
struct AfSet {
  AfFunction and_fn;
  AfFunction or_fn;
};

AfSet production_afs();

struct SuiteResult {
  std::string name;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  std::string counterexample; // first failing case, replayable from seed and trial
  double seconds = 0.0;

  bool passed() const noexcept { return failures == 0 && trials > 0; }
};

SuiteResult de_morgan(std::size_t trials, std::uint64_t seed, const AfSet& afs = production_afs());
SuiteResult zero_weight_nonimpact(std::size_t trials, std::uint64_t seed, const AfSet& afs = production_afs());
/// Scales are powers of two, which keep the scaled weights exact.
SuiteResult weight_scale_invariance(std::size_t trials, std::uint64_t seed, const AfSet& afs = production_afs());
SuiteResult monotonicity(std::size_t trials, std::uint64_t seed, const AfSet& afs = production_afs());
SuiteResult temporal_expansion(std::size_t trials, std::uint64_t seed);
SuiteResult gradient_check(std::size_t trials, std::uint64_t seed);
SuiteResult forward_oracle(std::size_t trials, std::uint64_t seed);
SuiteResult dft_oracle(std::size_t trials, std::uint64_t seed);
SuiteResult gini_oracle(std::size_t trials, std::uint64_t seed);

/// Random formula over views of the given lengths, usable at time 0.
FormulaNode random_formula(std::uint64_t seed, std::span<const std::size_t> lengths, std::size_t dim);

} // namespace wstl::verify

#include "wstl/synthetic.hpp"

#include "wstl/error.hpp"
#include "wstl/random.hpp"

#include <algorithm>
#include <numeric>

namespace wstl {

LabeledDataset make_bump_dataset(std::size_t count, std::uint64_t seed, const BumpSpec& shape) {
  if (count < 2 || shape.bump_hi >= shape.length || shape.bump_lo > shape.bump_hi)
    fail(ErrorCode::Config, "bad bump dataset parameters");
  Rng rng = make_rng(seed, {0x62756d70u});
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = count; i > 1; --i)
    std::swap(order[i - 1], order[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);

  LabeledDataset data;
  data.label_names = {"0", "1"};
  data.source = "bump(seed=" + std::to_string(seed) + ")";
  for (std::size_t i : order) {
    const bool bump = i % 2 == 1;
    std::vector<double> x(shape.length);
    for (std::size_t k = 0; k < shape.length; ++k) {
      const double u = uniform01(rng);
      x[k] = bump && k >= shape.bump_lo && k <= shape.bump_hi ? shape.bump_min + (1.0 - shape.bump_min) * u
                                                          : shape.flat_max * u;
    }
    data.series.push_back(Signal::univariate(std::move(x)));
    data.labels.push_back(bump ? 2 : 1);
  }
  return data;
}

} // namespace wstl

#include "wstl/views.hpp"

#include "wstl/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

namespace wstl {

std::string_view to_string(ViewKind kind) {
  switch (kind) {
  case ViewKind::Raw: return "raw";
  case ViewKind::Spectral: return "spectral";
  case ViewKind::Derivative: return "derivative";
  }
  return "?";
}

ViewKind view_kind_from_string(std::string_view name) {
  for (ViewKind kind : kAllViews)
    if (to_string(kind) == name)
      return kind;
  fail(ErrorCode::Config, "unknown view '" + std::string(name) + "'");
}

std::string_view to_string(Aggregation agg) {
  switch (agg) {
  case Aggregation::Mean: return "mean";
  case Aggregation::Variance: return "variance";
  case Aggregation::Max: return "max";
  case Aggregation::Min: return "min";
  case Aggregation::InterquartileRange: return "iqr";
  case Aggregation::Slope: return "slope";
  }
  return "?";
}

Aggregation aggregation_from_string(std::string_view name) {
  for (Aggregation agg : kAllAggregations)
    if (to_string(agg) == name)
      return agg;
  fail(ErrorCode::Config, "unknown aggregation '" + std::string(name) + "'");
}

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<double> magnitude_spectrum(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  const int bins = n / 2 + 1;
  double* in = fftw_alloc_real(static_cast<std::size_t>(n));
  fftw_complex* out = fftw_alloc_complex(static_cast<std::size_t>(bins));
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE);
  }
  std::copy(x.begin(), x.end(), in);
  fftw_execute(plan);
  std::vector<double> power(x.size());
  for (int w = 0; w < bins; ++w)
    power[static_cast<std::size_t>(w)] = std::hypot(out[w][0], out[w][1]);
  for (int w = bins; w < n; ++w)
    power[static_cast<std::size_t>(w)] = power[static_cast<std::size_t>(n - w)];
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(out);
  fftw_free(in);
  return power;
}

std::vector<double> column(const Signal& x, std::size_t feature) {
  std::vector<double> out(x.length());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = x.value(k, feature);
  return out;
}

Signal from_columns(const std::vector<std::vector<double>>& columns) {
  const std::size_t dim = columns.size();
  const std::size_t len = columns.front().size();
  std::vector<double> samples(len * dim);
  for (std::size_t j = 0; j < dim; ++j)
    for (std::size_t k = 0; k < len; ++k)
      samples[k * dim + j] = columns[j][k];
  return Signal(dim, std::move(samples));
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double aggregate(Aggregation agg, std::span<const double> v) {
  const auto n = static_cast<double>(v.size());
  switch (agg) {
  case Aggregation::Mean:
    return std::accumulate(v.begin(), v.end(), 0.0) / n;
  case Aggregation::Variance: {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v)
      ss += (x - mean) * (x - mean);
    return ss / n;
  }
  case Aggregation::Max:
    return *std::max_element(v.begin(), v.end());
  case Aggregation::Min:
    return *std::min_element(v.begin(), v.end());
  case Aggregation::InterquartileRange: {
    if (v.size() < 2)
      return 0.0;
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  }
  case Aggregation::Slope: {
    if (v.size() < 2)
      return 0.0;
    const double t_mean = (n - 1.0) / 2.0;
    const double y_mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (std::size_t t = 0; t < v.size(); ++t) {
      const double dt = static_cast<double>(t) - t_mean;
      num += dt * (v[t] - y_mean);
      den += dt * dt;
    }
    return num / den;
  }
  }
  return 0.0;
}

Signal concat_time(const Signal& a, const Signal& b) {
  std::vector<double> samples = a.samples();
  samples.insert(samples.end(), b.samples().begin(), b.samples().end());
  return Signal(a.dim(), std::move(samples));
}

std::size_t feature_count(std::size_t base_length, std::size_t interval_len, std::size_t aggregations) {
  return (base_length + interval_len - 1) / interval_len * aggregations;
}

std::size_t base_length_of(ViewKind kind, std::size_t raw_length) {
  return kind == ViewKind::Derivative ? raw_length - 1 : raw_length;
}

} // namespace

Signal to_spectral(const Signal& x) {
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < x.dim(); ++j)
    columns.push_back(magnitude_spectrum(column(x, j)));
  return from_columns(columns);
}

Signal to_derivative(const Signal& x) {
  if (x.length() < 2)
    fail(ErrorCode::Shape, "derivative view needs at least two samples");
  std::vector<double> samples((x.length() - 1) * x.dim());
  for (std::size_t k = 0; k + 1 < x.length(); ++k)
    for (std::size_t j = 0; j < x.dim(); ++j)
      samples[k * x.dim() + j] = x.value(k + 1, j) - x.value(k, j);
  return Signal(x.dim(), std::move(samples));
}

Signal extract_interval_features(const Signal& x, std::size_t interval_len,
                                 std::span<const Aggregation> aggregations) {
  if (interval_len == 0)
    fail(ErrorCode::Config, "interval length must be at least 1");
  if (aggregations.empty())
    fail(ErrorCode::Config, "interval features need at least one aggregation");
  const std::size_t len = x.length();
  const std::size_t chunks = (len + interval_len - 1) / interval_len;
  std::vector<std::vector<double>> columns(x.dim());
  for (std::size_t j = 0; j < x.dim(); ++j) {
    const auto col = column(x, j);
    auto& out = columns[j];
    out.reserve(chunks * aggregations.size());
    for (Aggregation agg : aggregations) {
      for (std::size_t c = 0; c < chunks; ++c) {
        const std::size_t lo = c * interval_len;
        const std::size_t hi = std::min(lo + interval_len, len);
        out.push_back(aggregate(agg, std::span<const double>(col.data() + lo, hi - lo)));
      }
    }
  }
  return from_columns(columns);
}

Signal z_normalize(const Signal& x) {
  std::vector<std::vector<double>> columns;
  for (std::size_t j = 0; j < x.dim(); ++j) {
    auto col = column(x, j);
    const double n = static_cast<double>(col.size());
    const double mean = std::accumulate(col.begin(), col.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : col)
      ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    for (double& v : col)
      v = sd > 0.0 ? (v - mean) / sd : 0.0;
    columns.push_back(std::move(col));
  }
  return from_columns(columns);
}

std::size_t ViewConfig::resolved_interval_len(std::size_t raw_length) const {
  if (interval_len)
    return *interval_len;
  return std::max<std::size_t>(1, (raw_length + interval_count - 1) / interval_count);
}

void ViewConfig::check() const {
  if (views.empty())
    fail(ErrorCode::Config, "at least one view must be enabled");
  for (std::size_t i = 0; i < views.size(); ++i)
    for (std::size_t j = i + 1; j < views.size(); ++j)
      if (views[i] == views[j])
        fail(ErrorCode::Config, "view '" + std::string(to_string(views[i])) + "' listed twice");
  if (interval_features) {
    if (aggregations.empty())
      fail(ErrorCode::Config, "interval features need at least one aggregation");
    if (interval_len && *interval_len == 0)
      fail(ErrorCode::Config, "interval length must be at least 1");
    if (!interval_len && interval_count == 0)
      fail(ErrorCode::Config, "interval count must be at least 1");
  }
}

std::vector<std::size_t> MultiViewInstance::lengths() const {
  std::vector<std::size_t> out;
  for (const auto& v : views)
    out.push_back(v.length());
  return out;
}

std::vector<std::size_t> extended_lengths(const ViewConfig& config, std::size_t raw_length) {
  config.check();
  const std::size_t interval_len = config.resolved_interval_len(raw_length);
  std::vector<std::size_t> out;
  for (ViewKind kind : config.views) {
    const std::size_t base = base_length_of(kind, raw_length);
    out.push_back(base + (config.interval_features
                              ? feature_count(base, interval_len, config.aggregations.size())
                              : 0));
  }
  return out;
}

MultiViewInstance build_multiview(const Signal& x, const ViewConfig& config, int label) {
  config.check();
  const bool has_derivative =
      std::find(config.views.begin(), config.views.end(), ViewKind::Derivative) != config.views.end();
  if (has_derivative && x.length() < 2)
    fail(ErrorCode::Shape, "derivative view needs at least two samples");
  const Signal source = config.z_normalize ? z_normalize(x) : x;
  const std::size_t interval_len = config.resolved_interval_len(source.length());

  MultiViewInstance instance;
  instance.label = label;
  for (ViewKind kind : config.views) {
    Signal base;
    switch (kind) {
    case ViewKind::Raw: base = source; break;
    case ViewKind::Spectral: base = to_spectral(source); break;
    case ViewKind::Derivative: base = to_derivative(source); break;
    }
    instance.kinds.push_back(kind);
    instance.base_lengths.push_back(base.length());
    if (config.interval_features)
      instance.views.push_back(concat_time(base, extract_interval_features(base, interval_len, config.aggregations)));
    else
      instance.views.push_back(std::move(base));
  }
  return instance;
}

} // namespace wstl

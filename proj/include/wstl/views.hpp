#pragma once

// Multi-view representation of a series: the raw samples, their DFT
// magnitude spectrum and their first difference, each extended along the
// time axis with interval features (statistics over fixed-length chunks).

#include "wstl/logic.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wstl {

enum class ViewKind { Raw, Spectral, Derivative };

inline constexpr ViewKind kAllViews[] = {ViewKind::Raw, ViewKind::Spectral, ViewKind::Derivative};

std::string_view to_string(ViewKind kind);
ViewKind view_kind_from_string(std::string_view name);

enum class Aggregation { Mean, Variance, Max, Min, InterquartileRange, Slope };

inline constexpr Aggregation kAllAggregations[] = {Aggregation::Mean, Aggregation::Variance,
                                                   Aggregation::Max,  Aggregation::Min,
                                                   Aggregation::InterquartileRange, Aggregation::Slope};

std::string_view to_string(Aggregation agg);
Aggregation aggregation_from_string(std::string_view name);

/// DFT magnitude sqrt(re^2 + im^2) for every frequency 0..K-1, per dimension.
Signal to_spectral(const Signal& x);

/// First difference x(k+1) - x(k); needs K >= 2.
Signal to_derivative(const Signal& x);

/// Statistics over consecutive chunks of `interval_len` samples (the last
/// chunk may be shorter). Output length ceil(K / I) * |aggregations|, ordered
/// aggregation-major then chunk index; each entry is per dimension.
Signal extract_interval_features(const Signal& x, std::size_t interval_len,
                                 std::span<const Aggregation> aggregations);

/// Per-series z-normalization (population std, constant series -> zeros).
Signal z_normalize(const Signal& x);

struct ViewConfig {
  std::vector<ViewKind> views{ViewKind::Raw, ViewKind::Spectral, ViewKind::Derivative};
  bool interval_features = true;
  // Target number of chunks; the chunk length is ceil(K / interval_count).
  std::size_t interval_count = 20;
  // Explicit chunk length, overrides interval_count when set.
  std::optional<std::size_t> interval_len;
  std::vector<Aggregation> aggregations{std::begin(kAllAggregations), std::end(kAllAggregations)};
  bool z_normalize = false;

  std::size_t resolved_interval_len(std::size_t raw_length) const;
  void check() const;

  friend bool operator==(const ViewConfig&, const ViewConfig&) = default;
};

struct MultiViewInstance {
  std::vector<ViewKind> kinds;
  // per view: base data followed by its interval features
  std::vector<Signal> views;
  std::vector<std::size_t> base_lengths;
  int label = 0;

  std::vector<std::size_t> lengths() const;
};

/// Extended length of each enabled view for a raw series of length K.
std::vector<std::size_t> extended_lengths(const ViewConfig& config, std::size_t raw_length);

MultiViewInstance build_multiview(const Signal& x, const ViewConfig& config, int label = 0);

} // namespace wstl

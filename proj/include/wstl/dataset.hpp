#pragma once

// UCR-style delimited datasets: one series per line, the label first.

#include "wstl/logic.hpp"
#include "wstl/views.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wstl {

struct LabeledDataset {
  std::vector<Signal> series;
  std::vector<int> labels;             // remapped to 1..C
  std::vector<std::string> label_names; // label_names[c - 1] is the raw label of class c
  std::string source;
  std::uint32_t checksum = 0; // CRC-32 of the file bytes

  std::size_t size() const noexcept { return series.size(); }
  std::size_t length() const { return series.empty() ? 0 : series.front().length(); }
  std::size_t dim() const { return series.empty() ? 1 : series.front().dim(); }
  std::size_t class_count() const noexcept { return label_names.size(); }
  const std::string& label_name(int class_id) const;
};

enum class Delimiter { Auto, Tab, Comma };

/// Labels are ordered numerically when every raw label is a number,
/// lexicographically otherwise, and numbered from 1 in that order.
LabeledDataset parse_delimited(std::string_view text, Delimiter delimiter = Delimiter::Auto,
                               std::string source = {});
LabeledDataset load_delimited(const std::filesystem::path& path, Delimiter delimiter = Delimiter::Auto);

/// Relabel `data` with an existing label map (e.g. the one stored with a
/// model). Unknown raw labels are a schema error.
void apply_label_map(LabeledDataset& data, std::span<const std::string> label_names);

std::uint32_t crc32_of(std::string_view bytes);

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Shuffle each class with its own stream, then deal its members round-robin
/// over the folds, continuing where the previous class stopped.
std::vector<Fold> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed);

std::vector<MultiViewInstance> build_instances(const LabeledDataset& data, const ViewConfig& config);

} // namespace wstl

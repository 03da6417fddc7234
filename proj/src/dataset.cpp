#include "wstl/dataset.hpp"

#include "wstl/error.hpp"
#include "wstl/random.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace wstl {

const std::string& LabeledDataset::label_name(int class_id) const {
  if (class_id < 1 || static_cast<std::size_t>(class_id) > label_names.size())
    fail(ErrorCode::OutOfRange, "no class " + std::to_string(class_id));
  return label_names[static_cast<std::size_t>(class_id - 1)];
}

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths
  while (!bytes.empty()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(bytes.size(), 1u << 30));
    crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), chunk);
    bytes.remove_prefix(chunk);
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \r\t");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \r\t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    return std::nullopt;
  return v;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delim, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos)
      return out;
    start = pos + 1;
  }
}

// Raw label order: numeric when possible.
bool label_less(const std::string& a, const std::string& b) {
  const auto x = parse_number(a), y = parse_number(b);
  if (x && y && *x != *y)
    return *x < *y;
  return a < b;
}

} // namespace

LabeledDataset parse_delimited(std::string_view text, Delimiter delimiter, std::string source) {
  LabeledDataset data;
  data.source = std::move(source);
  data.checksum = crc32_of(text);

  std::vector<std::string_view> lines;
  for (std::size_t start = 0; start < text.size();) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos)
      pos = text.size();
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty())
    lines.pop_back();
  if (lines.empty())
    fail(ErrorCode::Empty, "dataset " + data.source + " is empty");

  char delim = delimiter == Delimiter::Tab ? '\t' : ',';
  if (delimiter == Delimiter::Auto)
    delim = lines.front().find('\t') != std::string_view::npos ? '\t' : ',';

  std::vector<std::string> raw;
  std::size_t width = 0;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const std::string where = data.source + " row " + std::to_string(r + 1);
    if (trim(lines[r]).empty())
      fail(ErrorCode::Format, where + ": blank line");
    auto fields = split(lines[r], delim);
    if (fields.size() < 2)
      fail(ErrorCode::Format, where + ": expected a label and at least one value");
    if (r == 0)
      width = fields.size();
    else if (fields.size() != width)
      fail(ErrorCode::Format, where + ": " + std::to_string(fields.size() - 1) + " values, expected " +
                                  std::to_string(width - 1));
    const auto label = trim(fields.front());
    if (label.empty())
      fail(ErrorCode::Parse, where + " column 1: empty label");
    raw.emplace_back(label);
    std::vector<double> values;
    values.reserve(fields.size() - 1);
    for (std::size_t c = 1; c < fields.size(); ++c) {
      const auto v = parse_number(fields[c]);
      if (!v || !std::isfinite(*v))
        fail(ErrorCode::Parse, where + " column " + std::to_string(c + 1) + ": not a finite number '" +
                                   std::string(trim(fields[c])) + "'");
      values.push_back(*v);
    }
    data.series.push_back(Signal::univariate(std::move(values)));
  }

  data.label_names = raw;
  std::sort(data.label_names.begin(), data.label_names.end(), label_less);
  data.label_names.erase(std::unique(data.label_names.begin(), data.label_names.end()), data.label_names.end());
  std::map<std::string, int> ids;
  for (std::size_t c = 0; c < data.label_names.size(); ++c)
    ids[data.label_names[c]] = static_cast<int>(c + 1);
  for (const auto& r : raw)
    data.labels.push_back(ids.at(r));
  return data;
}

LabeledDataset load_delimited(const std::filesystem::path& path, Delimiter delimiter) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad())
    fail(ErrorCode::Io, "cannot read " + path.string());
  return parse_delimited(buffer.str(), delimiter, path.string());
}

void apply_label_map(LabeledDataset& data, std::span<const std::string> label_names) {
  std::vector<int> relabeled;
  for (int y : data.labels) {
    const std::string& name = data.label_name(y);
    auto it = std::find(label_names.begin(), label_names.end(), name);
    if (it == label_names.end()) {
      // "1" and "1.0" name the same numeric label
      const auto v = parse_number(name);
      it = std::find_if(label_names.begin(), label_names.end(), [&](const std::string& other) {
        const auto w = parse_number(other);
        return v && w && *v == *w;
      });
    }
    if (it == label_names.end())
      fail(ErrorCode::Schema, "label '" + name + "' was not seen in training");
    relabeled.push_back(static_cast<int>(it - label_names.begin()) + 1);
  }
  data.labels = std::move(relabeled);
  data.label_names.assign(label_names.begin(), label_names.end());
}

std::vector<Fold> stratified_kfold(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2)
    fail(ErrorCode::Usage, "k-fold split needs k >= 2");
  std::map<int, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < labels.size(); ++i)
    members[labels[i]].push_back(i);
  for (const auto& [label, idx] : members)
    if (idx.size() < k)
      fail(ErrorCode::Stratification, "class " + std::to_string(label) + " has " + std::to_string(idx.size()) +
                                          " members, fewer than " + std::to_string(k) + " folds");

  std::vector<std::size_t> fold_of(labels.size());
  std::size_t next = 0;
  for (auto& [label, idx] : members) {
    Rng rng = make_rng(seed, {static_cast<std::uint64_t>(static_cast<std::int64_t>(label))});
    // Fisher-Yates with uniform01 so the order does not depend on the
    // standard library's distribution implementation.
    for (std::size_t i = idx.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i));
      std::swap(idx[i - 1], idx[std::min(j, i - 1)]);
    }
    for (std::size_t i : idx)
      fold_of[i] = next++ % k;
  }
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t f = 0; f < k; ++f)
      (fold_of[i] == f ? folds[f].validation : folds[f].train).push_back(i);
  return folds;
}

std::vector<MultiViewInstance> build_instances(const LabeledDataset& data, const ViewConfig& config) {
  std::vector<MultiViewInstance> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    out.push_back(build_multiview(data.series[i], config, data.labels[i]));
  return out;
}

} // namespace wstl

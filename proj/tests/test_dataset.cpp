#include "doctest.h"

#include "wstl/dataset.hpp"
#include "wstl/error.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

using namespace wstl;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Domain;
}

} // namespace

TEST_CASE("comma rows") {
  const auto d = parse_delimited("1,0.5,0.7\n2,0.1,0.2\n");
  CHECK(d.size() == 2);
  CHECK(d.length() == 2);
  CHECK(d.class_count() == 2);
  CHECK(d.labels == std::vector<int>{1, 2});
  CHECK(d.series[0].samples() == std::vector<double>{0.5, 0.7});
  CHECK(d.series[1].value(1, 0) == 0.2);
}

TEST_CASE("tab rows without a trailing newline, scientific notation") {
  const auto d = parse_delimited("3\t1e-3\t-2.5E2\n3\t0\t1");
  CHECK(d.size() == 2);
  CHECK(d.series[0].samples() == std::vector<double>{1e-3, -250.0});
  CHECK(d.class_count() == 1);
  CHECK(d.label_name(1) == "3");
}

TEST_CASE("raw labels are remapped in numeric order and recorded") {
  const auto d = parse_delimited("1,0\n-1,0\n1,0\n");
  CHECK(d.labels == std::vector<int>{2, 1, 2});
  CHECK(d.label_names == std::vector<std::string>{"-1", "1"});

  const auto n = parse_delimited("10,0\n9,0\n");
  CHECK(n.label_names == std::vector<std::string>{"9", "10"});
  const auto s = parse_delimited("b,0\na,0\n");
  CHECK(s.label_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("malformed input") {
  CHECK(code_of([] { parse_delimited("1,0.1,0.2,0.3\n2,0.1,0.2\n"); }) == ErrorCode::Format);
  CHECK(code_of([] { parse_delimited("1,0.1,abc\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_delimited("1,0.1,\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_delimited("1,0.1,nan\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_delimited(""); }) == ErrorCode::Empty);
  CHECK(code_of([] { parse_delimited("1,0.1\n\n2,0.2\n"); }) == ErrorCode::Format);
  CHECK(code_of([] { load_delimited("/nonexistent/file.tsv"); }) == ErrorCode::Io);

  try {
    parse_delimited("1,0.1,0.2\n2,0.1,x\n", Delimiter::Auto, "t.csv");
  } catch (const Error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 2") != std::string::npos);
    CHECK(msg.find("column 3") != std::string::npos);
  }
  try {
    parse_delimited("1,0.1,0.2\n2,0.1,0.2\n2,0.1\n");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("row 3") != std::string::npos);
  }
}

TEST_CASE("load from disk records the checksum") {
  const auto path = std::filesystem::temp_directory_path() / "wstl_test_dataset.tsv";
  const std::string text = "1\t0.5\t0.7\n2\t0.1\t0.2\n";
  std::ofstream(path) << text;
  const auto d = load_delimited(path);
  CHECK(d.size() == 2);
  CHECK(d.checksum == crc32_of(text));
  CHECK(d.source == path.string());
  std::filesystem::remove(path);
  CHECK(crc32_of("123456789") == 0xCBF43926u);
}

TEST_CASE("applying a stored label map") {
  auto d = parse_delimited("1.0,0\n-1,0\n");
  apply_label_map(d, std::vector<std::string>{"-1", "1"});
  CHECK(d.labels == std::vector<int>{2, 1});
  CHECK(d.label_names == std::vector<std::string>{"-1", "1"});

  auto e = parse_delimited("5,0\n");
  CHECK(code_of([&] { apply_label_map(e, std::vector<std::string>{"-1", "1"}); }) == ErrorCode::Schema);
}

TEST_CASE("stratified k-fold") {
  std::vector<int> balanced;
  for (int i = 0; i < 10; ++i)
    balanced.push_back(1 + i % 2);
  const auto folds = stratified_kfold(balanced, 5, 3);
  REQUIRE(folds.size() == 5);
  for (const auto& f : folds) {
    REQUIRE(f.validation.size() == 2);
    CHECK(balanced[f.validation[0]] != balanced[f.validation[1]]);
  }
  CHECK(stratified_kfold(balanced, 5, 3)[2].validation == folds[2].validation);

  CHECK(code_of([&] { stratified_kfold(balanced, 1, 3); }) == ErrorCode::Usage);
  CHECK(code_of([&] { stratified_kfold(std::vector<int>{1, 1, 1, 2}, 2, 3); }) == ErrorCode::Stratification);
}

TEST_CASE("k-fold properties on random label sets") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    std::vector<int> labels;
    std::map<int, std::size_t> counts;
    const std::size_t k = 2 + seed % 4;
    for (int c = 1; c <= 3; ++c) {
      const std::size_t n = k + (seed * 7 + c * 3) % 11;
      for (std::size_t i = 0; i < n; ++i)
        labels.push_back(c);
      counts[c] = n;
    }
    std::rotate(labels.begin(), labels.begin() + seed % labels.size(), labels.end());
    const auto folds = stratified_kfold(labels, k, seed);
    REQUIRE(folds.size() == k);
    std::multiset<std::size_t> seen;
    for (const auto& f : folds) {
      CHECK(f.train.size() + f.validation.size() == labels.size());
      std::set<std::size_t> train(f.train.begin(), f.train.end());
      for (auto v : f.validation) {
        CHECK(train.count(v) == 0);
        seen.insert(v);
      }
      std::map<int, double> per;
      for (auto v : f.validation)
        per[labels[v]] += 1.0;
      for (auto [c, n] : counts) {
        // within one instance of the class's share n_c / k
        CHECK(std::abs(per[c] - static_cast<double>(n) / k) < 1.0);
      }
    }
    CHECK(seen.size() == labels.size());
    CHECK(std::set<std::size_t>(seen.begin(), seen.end()).size() == labels.size());
  }
}

TEST_CASE("build_instances keeps labels and shapes") {
  const auto d = parse_delimited("1,0,1,2,3\n2,3,2,1,0\n");
  ViewConfig views;
  views.interval_features = false;
  const auto inst = build_instances(d, views);
  REQUIRE(inst.size() == 2);
  CHECK(inst[1].label == 2);
  CHECK(inst[0].lengths() == std::vector<std::size_t>{4, 4, 3});
}

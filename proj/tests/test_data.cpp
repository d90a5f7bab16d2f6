#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include "doctest.h"
#include "pforest/dataset.hpp"
#include "pforest/errors.hpp"

using namespace pforest;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& content) {
  const fs::path p = fs::temp_directory_path() / ("pforest_data_" + name);
  std::ofstream(p) << content;
  return p;
}

std::string load_error(const std::string& content) {
  const auto p = write_file("bad.txt", content);
  try {
    (void)load_ucr(p);
  } catch (const DataError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load a handcrafted file") {
  const auto p = write_file("two.csv", "1,0.0,1.0\n2,1.0,0.0\n");
  const Dataset d = load_ucr(p);
  CHECK(d.size() == 2);
  CHECK(d.length == 2);
  CHECK(d.num_classes() == 2);
  CHECK(d.label_names == std::vector<std::string>{"1", "2"});
  CHECK(d.series[0].values == std::vector<double>{0.0, 1.0});
  CHECK(d.series[1].label == 2);
}

TEST_CASE("delimiters and label forms") {
  const auto tab = load_ucr(write_file("tab.tsv", "-1\t0.5\t1\n1\t2\t3\n1.0\t4\t5\n"));
  CHECK(tab.label_names == std::vector<std::string>{"-1", "1"});
  CHECK(tab.class_counts() == std::vector<std::size_t>{0, 1, 2});
  const auto blank = load_ucr(write_file("blank.txt", "  2  1.5e0   2\n10 3 4\n"));
  CHECK(blank.label_names == std::vector<std::string>{"2", "10"});
  CHECK(blank.series[0].values == std::vector<double>{1.5, 2.0});
  const auto text = load_ucr(write_file("text.csv", "b,1,2\na,3,4\n"));
  CHECK(text.label_names == std::vector<std::string>{"a", "b"});
}

TEST_CASE("load errors name the row and column") {
  CHECK(load_error("").find("no series") != std::string::npos);
  CHECK(load_error("1,2,3\n2,4\n").find("row 2") != std::string::npos);
  const std::string bad = load_error("1,2,3\n2,4,x\n");
  CHECK(bad.find("row 2") != std::string::npos);
  CHECK(bad.find("column 3") != std::string::npos);
  CHECK(load_error("1,2,NaN\n").find("column 3") != std::string::npos);
  CHECK(load_error("1\n").find("row 1") != std::string::npos);
  CHECK_THROWS_AS(load_ucr(fs::temp_directory_path() / "pforest_missing_file"), DataError);
}

TEST_CASE("unknown labels against a table") {
  const auto p = write_file("test.csv", "1,1,2\n3,3,4\n");
  const std::vector<std::string> table{"1", "2"};
  CHECK_THROWS_AS(load_ucr(p, &table), DataError);
  const std::vector<std::string> wide{"1", "2", "3"};
  const Dataset d = load_ucr(p, &wide);
  CHECK(d.series[1].label == 3);
}

TEST_CASE("save then load keeps numeric content") {
  SynthConfig cfg;
  cfg.n = 30;
  cfg.length = 17;
  cfg.classes = 3;
  const Dataset d = synth_generate(cfg);
  const auto p = fs::temp_directory_path() / "pforest_data_roundtrip.tsv";
  save_ucr(d, p, '\t');
  const Dataset e = load_ucr(p);
  REQUIRE(e.size() == d.size());
  CHECK(e.label_names == d.label_names);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(e.series[i].values == d.series[i].values);
    CHECK(e.series[i].label == d.series[i].label);
  }
}

TEST_CASE("z-normalization") {
  const auto z = z_normalize(std::vector<double>{1, 2, 3});
  CHECK(z[0] == doctest::Approx(-1.2247).epsilon(1e-4));
  CHECK(z[1] == doctest::Approx(0.0));
  CHECK(z[2] == doctest::Approx(1.2247).epsilon(1e-4));
  CHECK(z_normalize(std::vector<double>(4, 3.5)) == std::vector<double>(4, 0.0));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-50, 50);
  std::vector<double> v(40);
  for (auto& x : v) x = u(rng);
  const auto n = z_normalize(v);
  const double mean = std::accumulate(n.begin(), n.end(), 0.0) / 40.0;
  double var = 0.0;
  for (double x : n) var += (x - mean) * (x - mean);
  CHECK(std::abs(mean) < 1e-10);
  CHECK(std::abs(std::sqrt(var / 40.0) - 1.0) < 1e-10);
}

TEST_CASE("synthetic generator") {
  SynthConfig cfg;
  cfg.seed = 3;
  const Dataset a = synth_generate(cfg);
  const Dataset b = synth_generate(cfg);
  CHECK(a.size() == 1000);
  CHECK(a.length == 46);
  CHECK(a.num_classes() == 24);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.series[i].values == b.series[i].values);
  const auto counts = a.class_counts();
  for (std::size_t c = 1; c <= 24; ++c) CHECK((counts[c] == 41 || counts[c] == 42));
  CHECK_NOTHROW(validate(a));

  // A smaller draw is a prefix of a larger one.
  cfg.n = 100;
  const Dataset small = synth_generate(cfg);
  for (std::size_t i = 0; i < small.size(); ++i) CHECK(small.series[i].values == a.series[i].values);

  cfg.split = 1;
  const Dataset other = synth_generate(cfg);
  CHECK(other.series[0].values != small.series[0].values);
}

TEST_CASE("stratified subsample") {
  Dataset d;
  d.length = 1;
  d.label_names = {"a", "b"};
  for (int i = 0; i < 100; ++i) d.series.push_back({{static_cast<double>(i)}, i < 50 ? 1 : 2});
  const Dataset s = stratified_subsample(d, 10, 4);
  CHECK(s.class_counts() == std::vector<std::size_t>{0, 5, 5});
  CHECK_THROWS_AS(stratified_subsample(d, 1, 4), UsageError);
  CHECK_THROWS_AS(stratified_subsample(d, 101, 4), UsageError);

  const Dataset all = stratified_subsample(d, 100, 9);
  std::vector<double> seen;
  for (const auto& t : all.series) seen.push_back(t.values[0]);
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < 100; ++i) CHECK(seen[static_cast<std::size_t>(i)] == i);

  const Dataset again = stratified_subsample(d, 10, 4);
  for (std::size_t i = 0; i < 10; ++i) CHECK(again.series[i].values == s.series[i].values);
}

TEST_CASE("stratified proportions on skewed data") {
  Dataset d;
  d.length = 1;
  d.label_names = {"1", "2", "3"};
  const std::size_t sizes[] = {70, 25, 5};
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < sizes[c]; ++i) d.series.push_back({{0.0}, static_cast<Label>(c + 1)});
  }
  bool within = true;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    // Very small targets are dominated by the one-per-class floor.
    const std::size_t target = 10 + seed % 91;
    const auto counts = stratified_subsample(d, target, seed).class_counts();
    for (std::size_t c = 0; c < 3; ++c) {
      const double expected = static_cast<double>(sizes[c] * target) / 100.0;
      if (std::abs(static_cast<double>(counts[c + 1]) - expected) > 1.0 || counts[c + 1] == 0) {
        within = false;
      }
    }
  }
  CHECK(within);
  CHECK(stratified_subsample(d, 3, 1).class_counts() == std::vector<std::size_t>{0, 1, 1, 1});
}

TEST_CASE("select classes renumbers densely") {
  SynthConfig cfg;
  cfg.n = 40;
  cfg.length = 10;
  cfg.classes = 4;
  const Dataset d = synth_generate(cfg);
  const std::vector<Label> keep{3, 1};
  const Dataset s = select_classes(d, keep);
  CHECK(s.size() == 20);
  CHECK(s.label_names == std::vector<std::string>{d.label_names[2], d.label_names[0]});
  for (const auto& t : s.series) CHECK((t.label == 1 || t.label == 2));
}

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pforest/errors.hpp"
#include "pforest/forest.hpp"
#include "pforest/model_io.hpp"

using namespace pforest;
namespace fs = std::filesystem;

namespace {

Dataset small_synth(std::size_t n, std::uint64_t split = 0) {
  SynthConfig cfg;
  cfg.n = n;
  cfg.length = 30;
  cfg.classes = 3;
  cfg.seed = 17;
  cfg.noise = 0.5;
  cfg.split = split;
  return synth_generate(cfg);
}

ForestConfig small_config(std::uint64_t seed = 5) {
  ForestConfig cfg;
  cfg.num_trees = 12;
  cfg.candidates = 3;
  cfg.seed = seed;
  return cfg;
}

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("pforest_test_" + name);
}

}  // namespace

TEST_CASE("training validates its input") {
  const Dataset d = small_synth(30);
  ForestConfig cfg = small_config();
  cfg.num_trees = 0;
  CHECK_THROWS_AS(train_forest(d, cfg), UsageError);
  cfg = small_config();
  cfg.candidates = 0;
  CHECK_THROWS_AS(train_forest(d, cfg), UsageError);
  cfg = small_config();
  cfg.measures.clear();
  CHECK_THROWS_AS(train_forest(d, cfg), UsageError);
  CHECK_THROWS_AS(train_forest(Dataset{}, small_config()), UsageError);
}

TEST_CASE("forest shape and exemplar store") {
  const Dataset d = small_synth(45);
  const ProximityForest f = train_forest(d, small_config());
  CHECK(f.trees.size() == 12);
  CHECK(f.num_classes() == 3);
  CHECK(f.length == 30);
  CHECK(f.exemplars.size() <= d.size());
  CHECK(f.train_seconds >= 0.0);
  for (const auto& t : f.trees) {
    for (const auto& n : t.nodes) {
      for (const auto& b : n.branches) CHECK(b.exemplar < f.exemplars.size());
    }
  }
}

TEST_CASE("worker count does not change the model or predictions") {
  const Dataset train = small_synth(60);
  const Dataset test = small_synth(30, 1);
  ForestConfig one = small_config();
  one.workers = 1;
  ForestConfig four = small_config();
  four.workers = 4;
  const ProximityForest a = train_forest(train, one);
  const ProximityForest b = train_forest(train, four);
  CHECK(a.trees == b.trees);
  CHECK(serialize_model(a) == serialize_model(b));
  CHECK(predict_all(test.series, a, 1) == predict_all(test.series, b, 4));
}

TEST_CASE("different seeds give different forests") {
  const Dataset train = small_synth(60);
  CHECK(serialize_model(train_forest(train, small_config(1))) !=
        serialize_model(train_forest(train, small_config(2))));
}

TEST_CASE("predictions follow the vote") {
  const Dataset train = small_synth(60);
  const Dataset test = small_synth(20, 1);
  const ProximityForest f = train_forest(train, small_config());
  for (std::size_t i = 0; i < test.size(); ++i) {
    const auto counts = votes(Query(test.series[i].values), f);
    std::size_t total = 0;
    std::size_t best = 0;
    for (auto c : counts) {
      total += c;
      best = std::max(best, c);
    }
    CHECK(total == f.trees.size());
    const Label p = predict(test.series[i].values, f, i);
    CHECK(counts[static_cast<std::size_t>(p)] == best);

    const auto proba = predict_proba(test.series[i].values, f);
    double sum = 0.0;
    for (const auto& [label, share] : proba) {
      CHECK(share > 0.0);
      sum += share;
    }
    CHECK(sum == doctest::Approx(1.0));
    CHECK(mean_nodes_visited(test.series[i].values, f) >= 1.0);
  }
}

TEST_CASE("vote ties are broken by the query stream") {
  // Two trees that disagree on every query produce a tie.
  const Dataset train = small_synth(30);
  ProximityForest f = train_forest(train, small_config());
  f.trees.resize(2);
  f.config.num_trees = 2;
  f.trees[0].nodes = {TreeNode{}};
  f.trees[0].nodes[0].label = 1;
  f.trees[1].nodes = {TreeNode{}};
  f.trees[1].nodes[0].label = 2;
  const std::vector<double> q(30, 0.0);
  int ones = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) {
    const Label p = predict(q, f, static_cast<std::uint64_t>(i));
    CHECK((p == 1 || p == 2));
    ones += p == 1 ? 1 : 0;
    CHECK(predict(q, f, static_cast<std::uint64_t>(i)) == p);
  }
  CHECK(std::abs(ones / double(n) - 0.5) < 0.05);
}

TEST_CASE("per-tree scope forest") {
  const Dataset train = small_synth(45);
  ForestConfig cfg = small_config();
  cfg.scope = MeasureScope::PerTree;
  const ProximityForest f = train_forest(train, cfg);
  for (const auto& t : f.trees) {
    std::optional<MeasureKind> kind;
    for (const auto& n : t.nodes) {
      if (n.is_leaf()) continue;
      if (!kind) kind = n.measure.kind;
      CHECK(n.measure.kind == *kind);
    }
  }
}

TEST_CASE("model round trip") {
  const Dataset train = small_synth(45);
  const Dataset test = small_synth(30, 1);
  const ProximityForest f = train_forest(train, small_config());
  const std::string bytes = serialize_model(f);
  const ProximityForest g = deserialize_model(bytes);
  CHECK(g.trees == f.trees);
  CHECK(g.label_names == f.label_names);
  CHECK(g.config.seed == f.config.seed);
  CHECK(g.config.measures == f.config.measures);
  CHECK(serialize_model(g) == bytes);
  CHECK(predict_all(test.series, g, 1) == predict_all(test.series, f, 1));

  const fs::path path = temp_path("roundtrip.pf");
  save_model(f, path);
  CHECK_FALSE(fs::exists(fs::path(path.string() + ".tmp")));
  CHECK(serialize_model(load_model(path)) == bytes);
  fs::remove(path);
}

TEST_CASE("damaged models are rejected") {
  const ProximityForest f = train_forest(small_synth(30), small_config());
  const std::string bytes = serialize_model(f);

  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{19}, bytes.size() / 2,
                          bytes.size() - 1}) {
    CHECK_THROWS_AS(deserialize_model(bytes.substr(0, cut)), ModelCorruptError);
  }
  std::string flipped = bytes;
  flipped[bytes.size() / 2] = static_cast<char>(flipped[bytes.size() / 2] ^ 0x5A);
  CHECK_THROWS_AS(deserialize_model(flipped), ModelCorruptError);

  std::string version = bytes;
  version[8] = 9;
  CHECK_THROWS_AS(deserialize_model(version), ModelVersionError);

  std::string magic = bytes;
  magic[0] = 'X';
  CHECK_THROWS_AS(deserialize_model(magic), ModelCorruptError);

  CHECK_THROWS_AS(load_model(temp_path("does_not_exist.pf")), ModelIoError);
}

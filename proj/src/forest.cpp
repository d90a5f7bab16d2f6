#include "pforest/forest.hpp"

#include <chrono>
#include <string>

#include "pforest/errors.hpp"
#include "pforest/parallel.hpp"

namespace pforest {

std::size_t default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

RandomStream tree_stream(std::uint64_t seed, std::size_t index) {
  return RandomStream(seed).derive(0).derive(index);
}

RandomStream query_stream(std::uint64_t seed, std::uint64_t query_index) {
  return RandomStream(seed).derive(1).derive(query_index);
}

ProximityForest train_forest(const Dataset& data, const ForestConfig& config) {
  if (config.num_trees == 0) throw UsageError("train_forest: number of trees must be >= 1");
  if (config.candidates == 0) throw UsageError("train_forest: candidates must be >= 1");
  if (config.measures.empty()) throw UsageError("train_forest: empty measure pool");
  if (data.series.empty()) throw UsageError("train_forest: empty dataset");
  if (data.num_classes() < 2) throw UsageError("train_forest: dataset has a single class");
  for (const auto& s : data.series) {
    if (s.values.size() != data.length) {
      throw UsageError("train_forest: series lengths are inconsistent");
    }
  }

  const auto start = std::chrono::steady_clock::now();

  SeriesStore store(data.length);
  std::vector<Label> labels;
  labels.reserve(data.size());
  for (const auto& s : data.series) {
    store.add(s.values);
    labels.push_back(s.label);
  }
  std::vector<std::uint32_t> members(data.size());
  for (std::size_t i = 0; i < members.size(); ++i) members[i] = static_cast<std::uint32_t>(i);

  const TrainingSet training{store, labels, data.num_classes()};
  TreeOptions options;
  options.candidates = config.candidates;
  options.scope = config.scope;
  options.measures = config.measures;

  std::vector<ProximityTree> trees(config.num_trees);
  parallel_for(config.num_trees, config.workers, [&](std::size_t i) {
    trees[i] = build_tree(training, members, tree_stream(config.seed, i), options);
  });

  // Move referenced exemplars into the model's own store, numbered by first
  // use in (tree, node, branch) order.
  ProximityForest forest;
  forest.config = config;
  forest.length = data.length;
  forest.label_names = data.label_names;
  forest.exemplars = SeriesStore(data.length);
  std::vector<std::int64_t> remap(data.size(), -1);
  for (auto& tree : trees) {
    for (auto& node : tree.nodes) {
      for (auto& branch : node.branches) {
        auto& slot = remap[branch.exemplar];
        if (slot < 0) slot = forest.exemplars.add(store.values(branch.exemplar));
        branch.exemplar = static_cast<std::uint32_t>(slot);
      }
    }
  }
  forest.trees = std::move(trees);
  forest.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return forest;
}

std::vector<std::size_t> votes(const Query& query, const ProximityForest& forest) {
  std::vector<std::size_t> counts(forest.num_classes() + 1, 0);
  for (const auto& tree : forest.trees) {
    ++counts[static_cast<std::size_t>(classify_tree(query.ref(), tree, forest.exemplars))];
  }
  return counts;
}

Label predict(std::span<const double> query, const ProximityForest& forest,
              std::uint64_t query_index) {
  const auto counts = votes(Query(query), forest);
  std::size_t best = 0;
  std::vector<Label> tied;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > best) {
      best = counts[c];
      tied.assign(1, static_cast<Label>(c));
    } else if (counts[c] == best && best > 0) {
      tied.push_back(static_cast<Label>(c));
    }
  }
  if (tied.size() == 1) return tied.front();
  RandomStream stream = query_stream(forest.config.seed, query_index);
  return tied[stream.uniform_index(tied.size())];
}

std::map<Label, double> predict_proba(std::span<const double> query,
                                      const ProximityForest& forest) {
  const auto counts = votes(Query(query), forest);
  std::map<Label, double> proba;
  const auto k = static_cast<double>(forest.trees.size());
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > 0) proba[static_cast<Label>(c)] = static_cast<double>(counts[c]) / k;
  }
  return proba;
}

std::vector<Label> predict_all(std::span<const TimeSeries> queries, const ProximityForest& forest,
                               std::size_t workers) {
  std::vector<Label> out(queries.size());
  parallel_for(queries.size(), workers,
               [&](std::size_t i) { out[i] = predict(queries[i].values, forest, i); });
  return out;
}

double mean_nodes_visited(std::span<const double> query, const ProximityForest& forest) {
  const Query q(query);
  std::size_t visited = 0;
  for (const auto& tree : forest.trees) visited += route(q.ref(), tree, forest.exemplars).nodes_visited;
  return forest.trees.empty() ? 0.0
                              : static_cast<double>(visited) / static_cast<double>(forest.trees.size());
}

}  // namespace pforest

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "pforest/dataset.hpp"
#include "pforest/distances.hpp"
#include "pforest/store.hpp"
#include "pforest/tree.hpp"

namespace pforest {

struct ForestConfig {
  std::size_t num_trees = 100;
  std::size_t candidates = 5;
  MeasureScope scope = MeasureScope::PerNode;
  std::uint64_t seed = 0;
  std::size_t workers = 1;  // does not influence the trained model
  std::vector<MeasureKind> measures{kAllMeasures.begin(), kAllMeasures.end()};
};

struct ProximityForest {
  ForestConfig config;
  std::size_t length = 0;
  std::vector<std::string> label_names;  // label i is label_names[i - 1]
  std::vector<ProximityTree> trees;      // branch exemplars index `exemplars`
  SeriesStore exemplars;
  double train_seconds = 0.0;            // wall clock, not persisted

  [[nodiscard]] std::size_t num_classes() const { return label_names.size(); }
};

// Stream of tree `index` under `seed`.
RandomStream tree_stream(std::uint64_t seed, std::size_t index);

// Stream used to break vote ties for query number `query_index`.
RandomStream query_stream(std::uint64_t seed, std::uint64_t query_index);

ProximityForest train_forest(const Dataset& data, const ForestConfig& config);

// Per-class vote counts (index = label, index 0 unused).
std::vector<std::size_t> votes(const Query& query, const ProximityForest& forest);

// Plurality vote; ties broken uniformly with query_stream(seed, query_index).
Label predict(std::span<const double> query, const ProximityForest& forest,
              std::uint64_t query_index = 0);

// Vote fraction for every label that received at least one vote.
std::map<Label, double> predict_proba(std::span<const double> query, const ProximityForest& forest);

// Predicts every series of `queries`; query i uses query_index i.
std::vector<Label> predict_all(std::span<const TimeSeries> queries, const ProximityForest& forest,
                               std::size_t workers);

// Mean number of internal nodes evaluated per tree for one query.
double mean_nodes_visited(std::span<const double> query, const ProximityForest& forest);

}  // namespace pforest

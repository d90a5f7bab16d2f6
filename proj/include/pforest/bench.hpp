#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pforest/dataset.hpp"
#include "pforest/forest.hpp"

namespace pforest {

std::string_view to_string(MeasureScope scope);
std::optional<MeasureScope> parse_scope(std::string_view text);

// Outcome of evaluating one configuration, possibly over several seeds.
struct RunReport {
  std::string dataset;
  std::string evaluated_on = "test";
  std::size_t num_trees = 0;
  std::size_t candidates = 0;
  MeasureScope scope = MeasureScope::PerNode;
  std::uint64_t seed = 0;
  std::size_t repeats = 0;
  std::vector<double> accuracies;  // one per repeat, correct / total
  double accuracy = 0.0;           // mean over repeats
  double error_std = 0.0;          // population std of the error rate
  double train_seconds = 0.0;      // mean wall time per repeat
  double test_ms_per_query = 0.0;  // mean wall time per query
  std::size_t test_size = 0;
  std::vector<std::string> label_names;
  // confusion[true][predicted], labels 1..c, summed over repeats.
  std::vector<std::vector<std::size_t>> confusion;
};

// Scores an already trained forest on `test` (one repeat).
RunReport evaluate_model(const ProximityForest& forest, const Dataset& test, std::size_t workers);

// Trains `repeats` forests with seeds config.seed + i and scores each.
RunReport evaluate(const Dataset& train, const Dataset& test, const ForestConfig& config,
                   std::size_t repeats);

nlohmann::json to_json(const RunReport& report);
std::string format_reports(std::span<const RunReport> reports);

struct SweepGrid {
  std::vector<std::size_t> trees{5, 10, 50, 100};
  std::vector<std::size_t> candidates{1, 2, 5};
  std::vector<MeasureScope> scopes{MeasureScope::PerNode};
};

struct SweepRow {
  RunReport report;
  // error(this row) / error(largest k) at the same candidates and scope,
  // and likewise against the largest R. 0/0 is reported as 1.
  double trees_error_ratio = 1.0;
  double candidates_error_ratio = 1.0;
};

std::vector<SweepRow> sweep(const Dataset& train, const Dataset& test, const SweepGrid& grid,
                            const ForestConfig& base, std::size_t repeats);

nlohmann::json to_json(std::span<const SweepRow> rows);
std::string format_sweep(std::span<const SweepRow> rows);

struct ScalingOptions {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  SynthConfig synth;  // n is taken from `sizes`
  std::size_t test_size = 1000;
  ForestConfig forest;
  std::size_t repeats = 1;
};

struct ScalingRow {
  std::size_t n = 0;
  double train_seconds = 0.0;      // mean over repeats
  double test_ms_per_query = 0.0;  // mean over repeats
  double accuracy = 0.0;           // mean over repeats
  double accuracy_std = 0.0;
  double nodes_visited = 0.0;      // mean internal nodes per tree per query
  double mean_depth = 0.0;
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  double train_slope = 0.0;        // least squares slope of log(time) on log(n)
  double test_time_ratio = 0.0;    // per-query time at largest n / smallest n
};

ScalingResult scaling(const ScalingOptions& options);

double loglog_slope(std::span<const double> x, std::span<const double> y);

nlohmann::json to_json(const ScalingResult& result);
std::string format_scaling(const ScalingResult& result);

// Root split of one seeded tree on a two-class dataset: for every series the
// distances to both exemplars and the branch it was routed to.
struct ScatterRow {
  double distance_first = 0.0;
  double distance_second = 0.0;
  Label true_class = 0;
  std::size_t branch = 0;  // 0 or 1
};

struct SplitScatter {
  MeasureParams measure;
  std::size_t exemplar_first = 0;  // dataset indices
  std::size_t exemplar_second = 0;
  std::vector<ScatterRow> rows;
};

SplitScatter split_scatter(const Dataset& two_class, std::uint64_t seed, std::size_t candidates,
                           MeasureScope scope = MeasureScope::PerNode);

std::string scatter_csv(const SplitScatter& scatter);

// Fraction of rows whose branch agrees with the class (branch b <-> label b+1).
double scatter_agreement(const SplitScatter& scatter);

}  // namespace pforest

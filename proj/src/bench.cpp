#include "pforest/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <tuple>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

// Population standard deviation (a single repeat has std 0).
double population_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

double error_ratio(double error, double reference) {
  if (reference == 0.0) {
    return error == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  }
  return error / reference;
}

void check_compatible(const Dataset& train, const Dataset& test) {
  if (test.series.empty()) throw DataError("test set " + test.name + " is empty");
  if (test.length != train.length) {
    throw DataError("test series length " + std::to_string(test.length) +
                    " differs from training length " + std::to_string(train.length));
  }
  if (test.label_names != train.label_names) {
    throw DataError("label sets of " + train.name + " and " + test.name + " differ");
  }
}

nlohmann::json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

}  // namespace

std::string_view to_string(MeasureScope scope) {
  return scope == MeasureScope::PerTree ? "tree" : "node";
}

std::optional<MeasureScope> parse_scope(std::string_view text) {
  if (text == "node") return MeasureScope::PerNode;
  if (text == "tree") return MeasureScope::PerTree;
  return std::nullopt;
}

RunReport evaluate_model(const ProximityForest& forest, const Dataset& test, std::size_t workers) {
  if (test.series.empty()) throw DataError("test set " + test.name + " is empty");
  if (test.length != forest.length) {
    throw DataError("test series length " + std::to_string(test.length) +
                    " differs from model length " + std::to_string(forest.length));
  }
  if (test.label_names != forest.label_names) {
    throw DataError("label set of " + test.name + " differs from the model's");
  }
  RunReport report;
  report.dataset = test.name;
  report.num_trees = forest.config.num_trees;
  report.candidates = forest.config.candidates;
  report.scope = forest.config.scope;
  report.seed = forest.config.seed;
  report.repeats = 1;
  report.test_size = test.size();
  report.label_names = forest.label_names;
  const std::size_t c = forest.num_classes();
  report.confusion.assign(c, std::vector<std::size_t>(c, 0));

  const auto start = Clock::now();
  const auto predicted = predict_all(test.series, forest, workers);
  const double elapsed = seconds_since(start);

  std::size_t correct = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const auto truth = static_cast<std::size_t>(test.series[i].label);
    const auto guess = static_cast<std::size_t>(predicted[i]);
    ++report.confusion[truth - 1][guess - 1];
    if (truth == guess) ++correct;
  }
  const double acc = static_cast<double>(correct) / static_cast<double>(predicted.size());
  report.accuracies = {acc};
  report.accuracy = acc;
  report.error_std = 0.0;
  report.train_seconds = forest.train_seconds;
  report.test_ms_per_query = 1000.0 * elapsed / static_cast<double>(predicted.size());
  return report;
}

RunReport evaluate(const Dataset& train, const Dataset& test, const ForestConfig& config,
                   std::size_t repeats) {
  if (repeats == 0) throw UsageError("evaluate: repeats must be >= 1");
  check_compatible(train, test);

  RunReport total;
  total.dataset = train.name;
  total.num_trees = config.num_trees;
  total.candidates = config.candidates;
  total.scope = config.scope;
  total.seed = config.seed;
  total.repeats = repeats;
  total.test_size = test.size();
  total.label_names = train.label_names;
  const std::size_t c = train.num_classes();
  total.confusion.assign(c, std::vector<std::size_t>(c, 0));

  std::vector<double> errors;
  std::vector<double> train_times;
  std::vector<double> test_times;
  for (std::size_t r = 0; r < repeats; ++r) {
    ForestConfig cfg = config;
    cfg.seed = config.seed + r;
    const ProximityForest forest = train_forest(train, cfg);
    const RunReport one = evaluate_model(forest, test, config.workers);
    total.accuracies.push_back(one.accuracy);
    errors.push_back(1.0 - one.accuracy);
    train_times.push_back(one.train_seconds);
    test_times.push_back(one.test_ms_per_query);
    for (std::size_t i = 0; i < c; ++i) {
      for (std::size_t j = 0; j < c; ++j) total.confusion[i][j] += one.confusion[i][j];
    }
  }
  total.accuracy = mean(total.accuracies);
  total.error_std = population_std(errors);
  total.train_seconds = mean(train_times);
  total.test_ms_per_query = mean(test_times);
  return total;
}

nlohmann::json to_json(const RunReport& report) {
  nlohmann::json j;
  j["dataset"] = report.dataset;
  j["evaluated_on"] = report.evaluated_on;
  j["config"] = {{"trees", report.num_trees},
                 {"candidates", report.candidates},
                 {"scope", std::string(to_string(report.scope))},
                 {"seed", report.seed}};
  j["repeats"] = report.repeats;
  j["test_size"] = report.test_size;
  j["accuracy"] = report.accuracy;
  j["accuracies"] = report.accuracies;
  j["error_rate"] = 1.0 - report.accuracy;
  j["error_std"] = report.error_std;
  j["train_seconds"] = report.train_seconds;
  j["test_ms_per_query"] = report.test_ms_per_query;
  j["labels"] = report.label_names;
  j["confusion"] = report.confusion;
  return j;
}

std::string format_reports(std::span<const RunReport> reports) {
  std::ostringstream out;
  out << std::left << std::setw(20) << "dataset" << std::right << std::setw(7) << "trees"
      << std::setw(6) << "R" << std::setw(7) << "scope" << std::setw(8) << "seed"
      << std::setw(5) << "reps" << std::setw(10) << "accuracy" << std::setw(10) << "err_std"
      << std::setw(11) << "train_s" << std::setw(12) << "ms/query" << '\n';
  out << std::fixed;
  for (const auto& r : reports) {
    out << std::left << std::setw(20) << r.dataset << std::right << std::setw(7) << r.num_trees
        << std::setw(6) << r.candidates << std::setw(7) << to_string(r.scope) << std::setw(8)
        << r.seed << std::setw(5) << r.repeats << std::setprecision(4) << std::setw(10)
        << r.accuracy << std::setw(10) << r.error_std << std::setprecision(3) << std::setw(11)
        << r.train_seconds << std::setw(12) << r.test_ms_per_query << '\n';
  }
  return out.str();
}

std::vector<SweepRow> sweep(const Dataset& train, const Dataset& test, const SweepGrid& grid,
                            const ForestConfig& base, std::size_t repeats) {
  if (grid.trees.empty() || grid.candidates.empty() || grid.scopes.empty()) {
    throw UsageError("sweep: every grid axis needs at least one value");
  }
  std::vector<SweepRow> rows;
  for (auto scope : grid.scopes) {
    for (auto k : grid.trees) {
      for (auto r : grid.candidates) {
        ForestConfig cfg = base;
        cfg.num_trees = k;
        cfg.candidates = r;
        cfg.scope = scope;
        rows.push_back({evaluate(train, test, cfg, repeats), 1.0, 1.0});
      }
    }
  }
  const std::size_t max_k = *std::max_element(grid.trees.begin(), grid.trees.end());
  const std::size_t max_r = *std::max_element(grid.candidates.begin(), grid.candidates.end());
  std::map<std::tuple<MeasureScope, std::size_t, std::size_t>, double> error;
  for (const auto& row : rows) {
    const auto& rep = row.report;
    error[{rep.scope, rep.num_trees, rep.candidates}] = 1.0 - rep.accuracy;
  }
  for (auto& row : rows) {
    const auto& rep = row.report;
    const double e = 1.0 - rep.accuracy;
    row.trees_error_ratio = error_ratio(e, error.at({rep.scope, max_k, rep.candidates}));
    row.candidates_error_ratio = error_ratio(e, error.at({rep.scope, rep.num_trees, max_r}));
  }
  return rows;
}

nlohmann::json to_json(std::span<const SweepRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    auto j = to_json(row.report);
    j["trees_error_ratio"] = finite_or_null(row.trees_error_ratio);
    j["candidates_error_ratio"] = finite_or_null(row.candidates_error_ratio);
    out.push_back(std::move(j));
  }
  return out;
}

std::string format_sweep(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << std::right << std::setw(7) << "trees" << std::setw(6) << "R" << std::setw(7) << "scope"
      << std::setw(10) << "error" << std::setw(10) << "err_std" << std::setw(12) << "err/err_k"
      << std::setw(12) << "err/err_R" << std::setw(11) << "train_s" << std::setw(12)
      << "ms/query" << '\n';
  out << std::fixed;
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << std::setw(7) << r.num_trees << std::setw(6) << r.candidates << std::setw(7)
        << to_string(r.scope) << std::setprecision(4) << std::setw(10) << 1.0 - r.accuracy
        << std::setw(10) << r.error_std << std::setw(12) << row.trees_error_ratio
        << std::setw(12) << row.candidates_error_ratio << std::setprecision(3) << std::setw(11)
        << r.train_seconds << std::setw(12) << r.test_ms_per_query << '\n';
  }
  return out.str();
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw UsageError("loglog_slope: need at least two paired points");
  }
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw UsageError("loglog_slope: values must be positive");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const double mx = mean(lx);
  const double my = mean(ly);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw UsageError("loglog_slope: sizes must differ");
  return sxy / sxx;
}

ScalingResult scaling(const ScalingOptions& options) {
  if (options.sizes.size() < 2) throw UsageError("scaling: need at least two sizes");
  if (!std::is_sorted(options.sizes.begin(), options.sizes.end()) ||
      std::adjacent_find(options.sizes.begin(), options.sizes.end()) != options.sizes.end()) {
    throw UsageError("scaling: sizes must be strictly increasing");
  }
  if (options.repeats == 0) throw UsageError("scaling: repeats must be >= 1");
  if (options.test_size == 0) throw UsageError("scaling: test size must be >= 1");

  SynthConfig test_cfg = options.synth;
  test_cfg.n = options.test_size;
  test_cfg.split = options.synth.split + 1;
  const Dataset test = synth_generate(test_cfg);
  // Routing statistics come from a fixed slice so they stay cheap at large n.
  const std::size_t probe = std::min<std::size_t>(test.size(), 200);

  ScalingResult result;
  for (std::size_t n : options.sizes) {
    SynthConfig train_cfg = options.synth;
    train_cfg.n = n;
    const Dataset train = synth_generate(train_cfg);

    std::vector<double> train_s;
    std::vector<double> test_ms;
    std::vector<double> acc;
    double visited = 0.0;
    double depth = 0.0;
    for (std::size_t r = 0; r < options.repeats; ++r) {
      ForestConfig cfg = options.forest;
      cfg.seed = options.forest.seed + r;
      const ProximityForest forest = train_forest(train, cfg);
      const RunReport rep = evaluate_model(forest, test, cfg.workers);
      train_s.push_back(rep.train_seconds);
      test_ms.push_back(rep.test_ms_per_query);
      acc.push_back(rep.accuracy);
      for (std::size_t q = 0; q < probe; ++q) {
        visited += mean_nodes_visited(test.series[q].values, forest);
      }
      for (const auto& tree : forest.trees) depth += static_cast<double>(tree.depth());
    }
    ScalingRow row;
    row.n = n;
    row.train_seconds = mean(train_s);
    row.test_ms_per_query = mean(test_ms);
    row.accuracy = mean(acc);
    row.accuracy_std = population_std(acc);
    const auto reps = static_cast<double>(options.repeats);
    row.nodes_visited = visited / (reps * static_cast<double>(probe));
    row.mean_depth = depth / (reps * static_cast<double>(options.forest.num_trees));
    result.rows.push_back(row);
  }

  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : result.rows) {
    xs.push_back(static_cast<double>(row.n));
    ys.push_back(row.train_seconds);
  }
  result.train_slope = loglog_slope(xs, ys);
  result.test_time_ratio =
      result.rows.back().test_ms_per_query / result.rows.front().test_ms_per_query;
  return result;
}

nlohmann::json to_json(const ScalingResult& result) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"n", r.n},
                    {"train_seconds", r.train_seconds},
                    {"test_ms_per_query", r.test_ms_per_query},
                    {"accuracy", r.accuracy},
                    {"accuracy_std", r.accuracy_std},
                    {"nodes_visited", r.nodes_visited},
                    {"mean_depth", r.mean_depth}});
  }
  return {{"rows", rows},
          {"train_slope", finite_or_null(result.train_slope)},
          {"test_time_ratio", finite_or_null(result.test_time_ratio)}};
}

std::string format_scaling(const ScalingResult& result) {
  std::ostringstream out;
  out << std::right << std::setw(8) << "n" << std::setw(11) << "train_s" << std::setw(12)
      << "ms/query" << std::setw(10) << "accuracy" << std::setw(9) << "acc_std" << std::setw(9)
      << "visited" << std::setw(8) << "depth" << '\n';
  out << std::fixed;
  for (const auto& r : result.rows) {
    out << std::setw(8) << r.n << std::setprecision(3) << std::setw(11) << r.train_seconds
        << std::setw(12) << r.test_ms_per_query << std::setprecision(4) << std::setw(10)
        << r.accuracy << std::setw(9) << r.accuracy_std << std::setprecision(2) << std::setw(9)
        << r.nodes_visited << std::setw(8) << r.mean_depth << '\n';
  }
  out << std::setprecision(3) << "log-log train slope: " << result.train_slope
      << "\ntest time ratio (largest/smallest n): " << result.test_time_ratio << '\n';
  return out.str();
}

SplitScatter split_scatter(const Dataset& two_class, std::uint64_t seed, std::size_t candidates,
                           MeasureScope scope) {
  if (two_class.num_classes() != 2) {
    throw UsageError("split scatter needs exactly 2 classes, got " +
                     std::to_string(two_class.num_classes()));
  }
  SeriesStore store(two_class.length);
  std::vector<Label> labels;
  for (const auto& s : two_class.series) {
    store.add(s.values);
    labels.push_back(s.label);
  }
  std::vector<std::uint32_t> members(two_class.size());
  std::iota(members.begin(), members.end(), 0U);
  const TrainingSet data{store, labels, 2};
  const NodeData node = make_node_data(data, members);
  if (node.classes.size() != 2) throw UsageError("split scatter: a class has no series");

  TreeOptions options;
  options.candidates = candidates;
  options.scope = scope;
  const RandomStream tree = tree_stream(seed, 0);
  std::optional<MeasureKind> tree_kind;
  if (scope == MeasureScope::PerTree) {
    tree_kind = draw_tree_measure(tree, options.measures, two_class.length);
  }
  const SplitEvaluation split = select_split(data, node, node_stream(tree, 0), options, tree_kind);

  SplitScatter out;
  out.measure = split.splitter.measure;
  out.exemplar_first = split.splitter.exemplars[0];
  out.exemplar_second = split.splitter.exemplars[1];
  std::vector<std::size_t> branch_of(two_class.size(), 0);
  for (std::size_t b = 0; b < split.branches.size(); ++b) {
    for (auto m : split.branches[b]) branch_of[m] = b;
  }
  for (std::size_t i = 0; i < two_class.size(); ++i) {
    ScatterRow row;
    row.distance_first = i == out.exemplar_first
                             ? 0.0
                             : distance(out.measure, store.ref(i), store.ref(out.exemplar_first));
    row.distance_second = i == out.exemplar_second
                              ? 0.0
                              : distance(out.measure, store.ref(i), store.ref(out.exemplar_second));
    row.true_class = labels[i];
    row.branch = branch_of[i];
    out.rows.push_back(row);
  }
  return out;
}

std::string scatter_csv(const SplitScatter& scatter) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "distance_exemplar_1,distance_exemplar_2,true_class,branch\n";
  for (const auto& r : scatter.rows) {
    out << r.distance_first << ',' << r.distance_second << ',' << r.true_class << ','
        << r.branch + 1 << '\n';
  }
  return out.str();
}

double scatter_agreement(const SplitScatter& scatter) {
  if (scatter.rows.empty()) return 0.0;
  std::size_t agree = 0;
  for (const auto& r : scatter.rows) {
    if (static_cast<Label>(r.branch) + 1 == r.true_class) ++agree;
  }
  return static_cast<double>(agree) / static_cast<double>(scatter.rows.size());
}

}  // namespace pforest

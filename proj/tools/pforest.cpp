// pforest: train, evaluate and benchmark proximity forests from the shell.
//
// Exit codes: 0 success, 2 usage error, 3 data or model error, 4 internal error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pforest/bench.hpp"
#include "pforest/dataset.hpp"
#include "pforest/errors.hpp"
#include "pforest/forest.hpp"
#include "pforest/model_io.hpp"
#include "pforest/parallel.hpp"

namespace fs = std::filesystem;
using namespace pforest;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitInternal = 4;

struct CommonOptions {
  std::string data_dir;
  std::size_t workers = 1;
  bool znorm = false;
  bool json = false;
  std::string out;
};

struct ForestOptions {
  std::size_t trees = 100;
  std::size_t candidates = 5;
  std::string scope = "node";
  std::uint64_t seed = 0;
};

ForestConfig make_config(const ForestOptions& f, const CommonOptions& c) {
  ForestConfig cfg;
  cfg.num_trees = f.trees;
  cfg.candidates = f.candidates;
  cfg.seed = f.seed;
  cfg.workers = c.workers;
  auto scope = parse_scope(f.scope);
  if (!scope) throw UsageError("--scope must be 'node' or 'tree', got '" + f.scope + "'");
  cfg.scope = *scope;
  return cfg;
}

// Writes through a sibling temporary so readers never see a partial file.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw UsageError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw UsageError("failed writing " + path.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw UsageError("cannot move output into " + path.string());
  }
}

std::optional<fs::path> find_split(const fs::path& dir, const std::string& name,
                                   const std::string& split) {
  for (const char* ext : {".tsv", ".txt", ".csv", ""}) {
    fs::path p = dir / name / (name + "_" + split + ext);
    if (fs::is_regular_file(p)) return p;
  }
  return std::nullopt;
}

struct DataFiles {
  std::string name;
  fs::path train;
  std::optional<fs::path> test;
};

// `spec` is either a file (its _TEST sibling is picked up when present) or an
// archive name looked up as <data-dir>/<Name>/<Name>_TRAIN.tsv.
DataFiles resolve(const std::string& spec, const std::string& data_dir,
                  const std::string& explicit_test) {
  DataFiles files;
  if (fs::is_regular_file(spec)) {
    files.train = spec;
    std::string stem = files.train.stem().string();
    const auto pos = stem.rfind("_TRAIN");
    if (pos != std::string::npos) {
      files.name = stem.substr(0, pos);
      fs::path sibling = files.train;
      sibling.replace_filename(files.name + "_TEST" + files.train.extension().string());
      if (fs::is_regular_file(sibling)) files.test = sibling;
    } else {
      files.name = stem;
    }
  } else {
    auto train = find_split(data_dir, spec, "TRAIN");
    if (!train) {
      throw UsageError("dataset '" + spec + "' not found (no such file, and no " +
                       (fs::path(data_dir) / spec / (spec + "_TRAIN.tsv")).string() + ")");
    }
    files.name = spec;
    files.train = *train;
    files.test = find_split(data_dir, spec, "TEST");
  }
  if (!explicit_test.empty()) {
    if (!fs::is_regular_file(explicit_test)) {
      throw UsageError("test file '" + explicit_test + "' not found");
    }
    files.test = explicit_test;
  }
  return files;
}

struct LoadedData {
  Dataset train;
  std::optional<Dataset> test;
};

LoadedData load(const DataFiles& files, bool znorm) {
  LoadedData d;
  d.train = load_ucr(files.train);
  d.train.name = files.name;
  if (files.test) {
    d.test = load_ucr(*files.test, &d.train.label_names);
    d.test->name = files.name;
  }
  if (znorm) {
    z_normalize(d.train);
    if (d.test) z_normalize(*d.test);
  }
  return d;
}

// JSON goes to --out when given; stdout gets the table, or the JSON with --json.
void emit(const CommonOptions& c, const nlohmann::json& json, const std::string& table) {
  const std::string text = json.dump(2) + "\n";
  if (!c.out.empty()) write_atomic(c.out, text);
  std::cout << (c.json ? text : table);
}

void add_common(CLI::App* cmd, CommonOptions& c, bool with_data = true) {
  if (with_data) {
    const char* env = std::getenv("PF_DATA_DIR");
    c.data_dir = env != nullptr ? env : "data/UCR";
    cmd->add_option("--data-dir", c.data_dir, "Root of the UCR archive")->capture_default_str();
    cmd->add_flag("--znorm", c.znorm, "z-normalize every series after loading");
  }
  c.workers = default_workers();
  cmd->add_option("--workers", c.workers, "Worker threads")
      ->envname("PF_WORKERS")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--json", c.json, "Print the JSON report instead of a table");
  cmd->add_option("--out", c.out, "Also write the JSON report to this path");
}

void add_forest(CLI::App* cmd, ForestOptions& f) {
  cmd->add_option("--trees,-k", f.trees, "Number of trees")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--candidates,-r", f.candidates, "Candidate splits per node")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--scope", f.scope, "Measure scope")
      ->check(CLI::IsMember({"node", "tree"}))
      ->capture_default_str();
  cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
}

// ---- commands --------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string test;
  std::string model = "model.pf";
  ForestOptions forest;
  CommonOptions common;
};

int run_train(const TrainArgs& a) {
  const auto data = load(resolve(a.dataset, a.common.data_dir, a.test), a.common.znorm);
  const ForestConfig cfg = make_config(a.forest, a.common);
  const ProximityForest forest = train_forest(data.train, cfg);
  RunReport report = evaluate_model(forest, data.test ? *data.test : data.train, cfg.workers);
  report.dataset = data.train.name;
  report.evaluated_on = data.test ? "test" : "train";
  save_model(forest, a.model);
  auto json = to_json(report);
  json["model"] = a.model;
  const std::vector<RunReport> rows{report};
  emit(a.common, json, format_reports(rows) + "model written to " + a.model + "\n");
  return 0;
}

struct PredictArgs {
  std::string model;
  std::string dataset;
  bool proba = false;
  CommonOptions common;
};

int run_predict(const PredictArgs& a) {
  const ProximityForest forest = load_model(a.model);
  fs::path path = a.dataset;
  if (!fs::is_regular_file(path)) {
    auto test = find_split(a.common.data_dir, a.dataset, "TEST");
    if (!test) throw UsageError("dataset '" + a.dataset + "' not found");
    path = *test;
  }
  Dataset data = load_ucr(path, &forest.label_names);
  if (a.common.znorm) z_normalize(data);
  if (data.length != forest.length) {
    throw DataError("series length " + std::to_string(data.length) + " does not match model length " +
                    std::to_string(forest.length));
  }
  const auto labels = predict_all(data.series, forest, a.common.workers);

  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv;
  csv << "index,predicted,true" << (a.proba ? ",proba" : "") << '\n';
  std::size_t correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& pred = forest.label_names[static_cast<std::size_t>(labels[i]) - 1];
    const auto& truth = forest.label_names[static_cast<std::size_t>(data.series[i].label) - 1];
    correct += labels[i] == data.series[i].label ? 1 : 0;
    nlohmann::json row{{"index", i}, {"predicted", pred}, {"true", truth}};
    csv << i << ',' << pred << ',' << truth;
    if (a.proba) {
      nlohmann::json p = nlohmann::json::object();
      std::string cell;
      for (const auto& [label, share] : predict_proba(data.series[i].values, forest)) {
        const auto& name = forest.label_names[static_cast<std::size_t>(label) - 1];
        p[name] = share;
        cell += (cell.empty() ? "" : ";") + name + ":" + std::to_string(share);
      }
      row["proba"] = p;
      csv << ',' << cell;
    }
    csv << '\n';
    rows.push_back(std::move(row));
  }
  const double accuracy = static_cast<double>(correct) / static_cast<double>(labels.size());
  emit(a.common, {{"model", a.model}, {"accuracy", accuracy}, {"predictions", rows}}, csv.str());
  return 0;
}

struct EvaluateArgs {
  std::string dataset;
  std::string test;
  std::string model;
  std::size_t repeats = 10;
  ForestOptions forest;
  CommonOptions common;
};

int run_evaluate(const EvaluateArgs& a) {
  if (!a.model.empty()) {
    const ProximityForest forest = load_model(a.model);
    const auto files = resolve(a.dataset, a.common.data_dir, a.test);
    if (!files.test) throw UsageError("no test split found for '" + a.dataset + "'");
    Dataset test = load_ucr(*files.test, &forest.label_names);
    test.name = files.name;
    if (a.common.znorm) z_normalize(test);
    const RunReport report = evaluate_model(forest, test, a.common.workers);
    const std::vector<RunReport> rows{report};
    emit(a.common, to_json(report), format_reports(rows));
    return 0;
  }
  const auto files = resolve(a.dataset, a.common.data_dir, a.test);
  if (!files.test) throw UsageError("no test split found for '" + a.dataset + "'");
  const auto data = load(files, a.common.znorm);
  const RunReport report =
      evaluate(data.train, *data.test, make_config(a.forest, a.common), a.repeats);
  const std::vector<RunReport> rows{report};
  emit(a.common, to_json(report), format_reports(rows));
  return 0;
}

struct SweepArgs {
  std::string dataset;
  std::string test;
  std::vector<std::size_t> trees{5, 10, 50, 100};
  std::vector<std::size_t> candidates{1, 2, 5};
  std::vector<std::string> scopes{"node"};
  std::size_t repeats = 10;
  std::uint64_t seed = 0;
  CommonOptions common;
};

int run_sweep(const SweepArgs& a) {
  const auto files = resolve(a.dataset, a.common.data_dir, a.test);
  if (!files.test) throw UsageError("no test split found for '" + a.dataset + "'");
  const auto data = load(files, a.common.znorm);
  SweepGrid grid;
  grid.trees = a.trees;
  grid.candidates = a.candidates;
  grid.scopes.clear();
  for (const auto& s : a.scopes) {
    auto scope = parse_scope(s);
    if (!scope) throw UsageError("unknown scope '" + s + "'");
    grid.scopes.push_back(*scope);
  }
  ForestConfig base;
  base.seed = a.seed;
  base.workers = a.common.workers;
  const auto rows = sweep(data.train, *data.test, grid, base, a.repeats);
  emit(a.common, {{"dataset", data.train.name}, {"rows", to_json(rows)}}, format_sweep(rows));
  return 0;
}

struct ScalingArgs {
  std::vector<std::size_t> sizes{1000, 2000, 4000, 8000};
  std::size_t length = 46;
  std::size_t classes = 24;
  double noise = 0.3;
  std::size_t test_size = 1000;
  std::size_t repeats = 1;
  ForestOptions forest{20, 1, "node", 0};
  CommonOptions common;
};

int run_scaling(const ScalingArgs& a) {
  ScalingOptions opt;
  opt.sizes = a.sizes;
  opt.synth.length = a.length;
  opt.synth.classes = a.classes;
  opt.synth.noise = a.noise;
  opt.synth.seed = a.forest.seed;
  opt.test_size = a.test_size;
  opt.repeats = a.repeats;
  opt.forest = make_config(a.forest, a.common);
  for (auto n : a.sizes) {
    if (n < a.classes) throw UsageError("every size must be at least the class count");
  }
  const auto result = scaling(opt);
  auto json = to_json(result);
  json["config"] = {{"trees", opt.forest.num_trees},
                    {"candidates", opt.forest.candidates},
                    {"scope", std::string(to_string(opt.forest.scope))},
                    {"seed", opt.forest.seed},
                    {"length", a.length},
                    {"classes", a.classes},
                    {"noise", a.noise},
                    {"test_size", a.test_size},
                    {"repeats", a.repeats}};
  emit(a.common, json, format_scaling(result));
  return 0;
}

struct SplitVizArgs {
  std::string dataset;
  std::vector<std::string> classes;
  std::size_t candidates = 5;
  std::string scope = "node";
  std::uint64_t seed = 0;
  std::string csv;
  CommonOptions common;
};

int run_split_viz(const SplitVizArgs& a) {
  const auto files = resolve(a.dataset, a.common.data_dir, "");
  Dataset data = load_ucr(files.train);
  data.name = files.name;
  if (a.common.znorm) z_normalize(data);
  if (!a.classes.empty()) {
    if (a.classes.size() != 2) {
      throw UsageError("--classes takes exactly 2 labels, got " + std::to_string(a.classes.size()));
    }
    std::vector<Label> keep;
    for (const auto& name : a.classes) {
      const auto it = std::find(data.label_names.begin(), data.label_names.end(), name);
      if (it == data.label_names.end()) throw UsageError("unknown class '" + name + "'");
      keep.push_back(static_cast<Label>(it - data.label_names.begin()) + 1);
    }
    data = select_classes(data, keep);
  } else if (data.num_classes() != 2) {
    throw UsageError(data.name + " has " + std::to_string(data.num_classes()) +
                     " classes; pick two with --classes");
  }
  const auto scope = parse_scope(a.scope);
  if (!scope) throw UsageError("unknown scope '" + a.scope + "'");
  const SplitScatter scatter = split_scatter(data, a.seed, a.candidates, *scope);
  const std::string csv = scatter_csv(scatter);
  if (!a.csv.empty()) write_atomic(a.csv, csv);

  nlohmann::json json{{"dataset", data.name},
                      {"seed", a.seed},
                      {"measure", std::string(to_string(scatter.measure.kind))},
                      {"classes", data.label_names},
                      {"exemplars", {scatter.exemplar_first, scatter.exemplar_second}},
                      {"agreement", scatter_agreement(scatter)}};
  if (!a.common.out.empty()) write_atomic(a.common.out, json.dump(2) + "\n");
  if (a.common.json) {
    std::cout << json.dump(2) << '\n';
  } else if (a.csv.empty()) {
    std::cout << csv;
  } else {
    std::cout << "measure " << to_string(scatter.measure.kind) << ", branch/class agreement "
              << scatter_agreement(scatter) << ", scatter written to " << a.csv << '\n';
  }
  return 0;
}

struct SynthArgs {
  SynthConfig config;
  std::string out;
  std::string delimiter = "tab";
};

int run_synth(const SynthArgs& a) {
  if (a.config.classes < 2 || a.config.n < a.config.classes) {
    throw UsageError("synth needs n >= classes >= 2");
  }
  const Dataset data = synth_generate(a.config);
  const char delim = a.delimiter == "comma" ? ',' : '\t';
  fs::path tmp = a.out;
  tmp += ".tmp";
  save_ucr(data, tmp, delim);
  std::error_code ec;
  fs::rename(tmp, a.out, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw UsageError("cannot write " + a.out);
  }
  std::cout << "wrote " << data.size() << " series of length " << data.length << " ("
            << data.num_classes() << " classes) to " << a.out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proximity forest time series classifier"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a forest and write the model");
  train_cmd->add_option("dataset", train.dataset, "Archive name or path to a _TRAIN file")
      ->required();
  train_cmd->add_option("--test", train.test, "Explicit test file");
  train_cmd->add_option("--model,-m", train.model, "Model output path")->capture_default_str();
  add_forest(train_cmd, train.forest);
  add_common(train_cmd, train.common);

  PredictArgs predict;
  auto* predict_cmd = app.add_subcommand("predict", "Label every series of a file");
  predict_cmd->add_option("--model,-m", predict.model, "Trained model")->required();
  predict_cmd->add_option("dataset", predict.dataset, "Archive name (uses _TEST) or file")
      ->required();
  predict_cmd->add_flag("--proba", predict.proba, "Include per-class vote shares");
  add_common(predict_cmd, predict.common);

  EvaluateArgs evaluate;
  auto* evaluate_cmd =
      app.add_subcommand("evaluate", "Accuracy on the test split, mean and std over seeds");
  evaluate_cmd->add_option("dataset", evaluate.dataset, "Archive name or path to a _TRAIN file")
      ->required();
  evaluate_cmd->add_option("--test", evaluate.test, "Explicit test file");
  evaluate_cmd->add_option("--model,-m", evaluate.model, "Score this model instead of training");
  evaluate_cmd->add_option("--repeats", evaluate.repeats, "Seeds seed..seed+repeats-1")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_forest(evaluate_cmd, evaluate.forest);
  add_common(evaluate_cmd, evaluate.common);

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Grid over trees, candidates and scope");
  sweep_cmd->add_option("dataset", sw.dataset, "Archive name or path to a _TRAIN file")
      ->required();
  sweep_cmd->add_option("--test", sw.test, "Explicit test file");
  sweep_cmd->add_option("--trees,-k", sw.trees, "Tree counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--candidates,-r", sw.candidates, "Candidate counts")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--scope", sw.scopes, "Scopes")
      ->delimiter(',')
      ->check(CLI::IsMember({"node", "tree"}))
      ->capture_default_str();
  sweep_cmd->add_option("--repeats", sw.repeats, "Seeds per grid point")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--seed", sw.seed, "Master seed")->capture_default_str();
  add_common(sweep_cmd, sw.common);

  ScalingArgs sc;
  auto* scaling_cmd = app.add_subcommand("scaling", "Train/test time against training size");
  scaling_cmd->add_option("--sizes", sc.sizes, "Training sizes, increasing")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scaling_cmd->add_option("--length", sc.length, "Series length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scaling_cmd->add_option("--classes", sc.classes, "Number of classes")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  scaling_cmd->add_option("--noise", sc.noise, "Noise std")->capture_default_str();
  scaling_cmd->add_option("--test-size", sc.test_size, "Test queries")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scaling_cmd->add_option("--repeats", sc.repeats, "Seeds per size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_forest(scaling_cmd, sc.forest);
  add_common(scaling_cmd, sc.common, false);

  SplitVizArgs viz;
  auto* viz_cmd = app.add_subcommand("split-viz", "Export the root split of one tree as CSV");
  viz_cmd->add_option("dataset", viz.dataset, "Archive name or path to a _TRAIN file")
      ->required();
  viz_cmd->add_option("--classes", viz.classes, "Two class labels to keep")->delimiter(',');
  viz_cmd->add_option("--candidates,-r", viz.candidates, "Candidate splits")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  viz_cmd->add_option("--scope", viz.scope, "Measure scope")
      ->check(CLI::IsMember({"node", "tree"}))
      ->capture_default_str();
  viz_cmd->add_option("--seed", viz.seed, "Tree seed")->capture_default_str();
  viz_cmd->add_option("--csv", viz.csv, "Write the scatter CSV here instead of stdout");
  add_common(viz_cmd, viz.common);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic dataset in UCR format");
  synth_cmd->add_option("--n", synth.config.n, "Series")->capture_default_str();
  synth_cmd->add_option("--length", synth.config.length, "Series length")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--classes", synth.config.classes, "Classes")->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--noise", synth.config.noise, "Noise std")->capture_default_str();
  synth_cmd->add_option("--split", synth.config.split, "Split index (0 train, 1 test, ...)")
      ->capture_default_str();
  synth_cmd->add_option("--delimiter", synth.delimiter, "tab or comma")
      ->check(CLI::IsMember({"tab", "comma"}))
      ->capture_default_str();
  synth_cmd->add_option("--out,-o", synth.out, "Output file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*predict_cmd) return run_predict(predict);
    if (*evaluate_cmd) return run_evaluate(evaluate);
    if (*sweep_cmd) return run_sweep(sw);
    if (*scaling_cmd) return run_scaling(sc);
    if (*viz_cmd) return run_split_viz(viz);
    if (*synth_cmd) return run_synth(synth);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

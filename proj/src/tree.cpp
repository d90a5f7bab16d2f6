#include "pforest/tree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

Label majority_label(std::span<const std::size_t> counts) {
  Label best = 0;
  std::size_t best_count = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) {
    if (counts[c] > best_count) {
      best_count = counts[c];
      best = static_cast<Label>(c);
    }
  }
  return best;
}

std::size_t total(std::span<const std::size_t> counts) {
  std::size_t n = 0;
  for (auto c : counts) n += c;
  return n;
}

ClassCounts count_classes(const TrainingSet& data, std::span<const std::uint32_t> members) {
  ClassCounts counts(data.num_classes + 1, 0);
  for (auto m : members) ++counts[static_cast<std::size_t>(data.labels[m])];
  return counts;
}

}  // namespace

double gini_impurity(std::span<const std::size_t> counts) {
  const std::size_t n = total(counts);
  if (n == 0) throw UsageError("gini_impurity: empty class counts");
  const auto dn = static_cast<double>(n);
  double sum_sq = 0.0;
  for (auto c : counts) {
    const double p = static_cast<double>(c) / dn;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double gini_gain(std::span<const std::size_t> parent, std::span<const ClassCounts> branches) {
  std::vector<std::size_t> summed(parent.size(), 0);
  for (const auto& b : branches) {
    if (b.size() > parent.size()) throw std::logic_error("gini_gain: branch has unknown classes");
    for (std::size_t c = 0; c < b.size(); ++c) summed[c] += b[c];
  }
  if (!std::equal(summed.begin(), summed.end(), parent.begin())) {
    throw std::logic_error("gini_gain: branch counts do not sum to parent counts");
  }
  const auto n = static_cast<double>(total(parent));
  double weighted = 0.0;
  for (const auto& b : branches) {
    const std::size_t nb = total(b);
    if (nb == 0) continue;
    weighted += static_cast<double>(nb) / n * gini_impurity(b);
  }
  return gini_impurity(parent) - weighted;
}

NodeData make_node_data(const TrainingSet& data, std::span<const std::uint32_t> members) {
  NodeData node;
  node.members = members;
  node.counts = count_classes(data, members);
  std::vector<std::size_t> slot(data.num_classes + 1, 0);
  for (std::size_t c = 1; c < node.counts.size(); ++c) {
    if (node.counts[c] == 0) continue;
    slot[c] = node.classes.size();
    node.classes.push_back(static_cast<Label>(c));
    node.by_class.emplace_back().reserve(node.counts[c]);
  }
  for (auto m : members) node.by_class[slot[static_cast<std::size_t>(data.labels[m])]].push_back(m);

  std::vector<std::span<const double>> values;
  values.reserve(members.size());
  for (auto m : members) values.push_back(data.series.values(m));
  node.stats.sigma = pooled_stddev(values);
  node.stats.length = data.series.length();
  node.stats.classes = node.classes;
  return node;
}

Splitter gen_candidate_splitter(const NodeData& node, RandomStream& stream,
                                std::span<const MeasureKind> measures,
                                std::optional<MeasureKind> tree_kind) {
  if (node.classes.size() < 2) {
    throw UsageError("gen_candidate_splitter: node holds a single class; it must be a leaf");
  }
  Splitter s;
  s.measure = tree_kind ? sample_parameters(*tree_kind, stream, node.stats)
                        : sample_measure(stream, node.stats, std::nullopt, measures);
  s.exemplars.reserve(node.classes.size());
  s.labels = node.classes;
  for (const auto& members : node.by_class) {
    s.exemplars.push_back(members[stream.uniform_index(members.size())]);
  }
  return s;
}

std::vector<std::vector<std::uint32_t>> partition(const TrainingSet& data,
                                                  std::span<const std::uint32_t> members,
                                                  const Splitter& splitter, RandomStream& stream) {
  const std::size_t k = splitter.exemplars.size();
  std::vector<std::vector<std::uint32_t>> branches(k);
  std::vector<SeriesRef> exemplars;
  exemplars.reserve(k);
  for (auto e : splitter.exemplars) exemplars.push_back(data.series.ref(e));

  for (auto m : members) {
    const SeriesRef series = data.series.ref(m);
    double best = std::numeric_limits<double>::infinity();
    std::size_t choice = 0;
    std::uint64_t ties = 0;
    for (std::size_t b = 0; b < k; ++b) {
      // Every measure is zero on identical inputs.
      const double d = m == splitter.exemplars[b] ? 0.0 : distance(splitter.measure, series, exemplars[b]);
      if (d < best) {
        best = d;
        choice = b;
        ties = 1;
      } else if (d == best) {
        // Reservoir choice keeps each tied branch with probability 1/ties.
        ++ties;
        if (stream.uniform_index(ties) == 0) choice = b;
      }
    }
    branches[choice].push_back(m);
  }
  return branches;
}

SplitEvaluation select_split(const TrainingSet& data, const NodeData& node,
                             const RandomStream& node_stream, const TreeOptions& options,
                             std::optional<MeasureKind> tree_kind) {
  if (options.candidates == 0) throw UsageError("select_split: candidates must be >= 1");
  SplitEvaluation best;
  bool have_best = false;
  for (std::size_t r = 0; r < options.candidates; ++r) {
    RandomStream stream = node_stream.derive(r);
    SplitEvaluation cand;
    cand.candidate_index = r;
    cand.splitter = gen_candidate_splitter(node, stream, options.measures, tree_kind);
    cand.branches = partition(data, node.members, cand.splitter, stream);
    std::vector<ClassCounts> counts;
    counts.reserve(cand.branches.size());
    for (const auto& b : cand.branches) counts.push_back(count_classes(data, b));
    cand.gini_gain = gini_gain(node.counts, counts);
    if (!have_best || cand.gini_gain > best.gini_gain) {
      best = std::move(cand);
      have_best = true;
    }
  }
  return best;
}

std::size_t ProximityTree::depth() const {
  if (nodes.empty()) return 0;
  std::size_t deepest = 0;
  std::vector<std::pair<std::uint32_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [id, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    for (const auto& b : nodes[id].branches) stack.emplace_back(b.child, d + 1);
  }
  return deepest;
}

std::size_t ProximityTree::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.is_leaf(); }));
}

RandomStream node_stream(const RandomStream& tree_stream, std::size_t node_index) {
  return tree_stream.derive(0).derive(node_index);
}

MeasureKind draw_tree_measure(const RandomStream& tree_stream, std::span<const MeasureKind> measures,
                              std::size_t length) {
  RandomStream stream = tree_stream.derive(1);
  return sample_measure_kind(stream, length, measures);
}

ProximityTree build_tree(const TrainingSet& data, std::span<const std::uint32_t> members,
                         const RandomStream& tree_stream, const TreeOptions& options) {
  if (members.empty()) throw UsageError("build_tree: no training data");
  if (options.candidates == 0) throw UsageError("build_tree: candidates must be >= 1");

  std::optional<MeasureKind> tree_kind;
  if (options.scope == MeasureScope::PerTree) {
    tree_kind = draw_tree_measure(tree_stream, options.measures, data.series.length());
  }

  struct Pending {
    std::uint32_t node;
    std::vector<std::uint32_t> members;
  };

  ProximityTree tree;
  tree.nodes.emplace_back();
  std::vector<Pending> stack;
  stack.push_back({0, std::vector<std::uint32_t>(members.begin(), members.end())});

  while (!stack.empty()) {
    Pending work = std::move(stack.back());
    stack.pop_back();

    const NodeData node = make_node_data(data, work.members);
    if (node.classes.size() == 1) {
      tree.nodes[work.node].label = node.classes.front();
      continue;
    }

    SplitEvaluation split =
        select_split(data, node, node_stream(tree_stream, work.node), options, tree_kind);

    const auto non_empty = static_cast<std::size_t>(std::count_if(
        split.branches.begin(), split.branches.end(), [](const auto& b) { return !b.empty(); }));
    if (non_empty < 2) {
      // Only reachable through exact distance ties (duplicated series).
      tree.nodes[work.node].label = majority_label(node.counts);
      continue;
    }

    std::vector<Pending> children;
    std::vector<Branch> branches;
    for (std::size_t b = 0; b < split.branches.size(); ++b) {
      if (split.branches[b].empty()) continue;
      const auto child = static_cast<std::uint32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      branches.push_back({split.splitter.exemplars[b], split.splitter.labels[b], child});
      children.push_back({child, std::move(split.branches[b])});
    }
    TreeNode& parent = tree.nodes[work.node];
    parent.measure = split.splitter.measure;
    parent.branches = std::move(branches);
    parent.label = majority_label(node.counts);
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
  }
  return tree;
}

Routing route(SeriesRef query, const ProximityTree& tree, const SeriesStore& exemplars) {
  if (query.values.size() != exemplars.length()) {
    throw UsageError("classify: query length " + std::to_string(query.values.size()) +
                     " differs from training length " + std::to_string(exemplars.length()));
  }
  Routing r;
  const TreeNode* node = &tree.root();
  while (!node->is_leaf()) {
    ++r.nodes_visited;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t next = node->branches.front().child;
    for (const auto& b : node->branches) {
      const double d = distance(node->measure, query, exemplars.ref(b.exemplar));
      if (d < best) {
        best = d;
        next = b.child;
      }
    }
    node = &tree.nodes[next];
  }
  r.label = node->label;
  return r;
}

Label classify_tree(SeriesRef query, const ProximityTree& tree, const SeriesStore& exemplars) {
  return route(query, tree, exemplars).label;
}

}  // namespace pforest

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pforest/distances.hpp"
#include "pforest/params.hpp"
#include "pforest/random.hpp"
#include "pforest/store.hpp"

namespace pforest {

enum class MeasureScope : std::uint8_t {
  PerNode,  // measure kind redrawn for every candidate split
  PerTree,  // one measure kind per tree; only parameters vary per node
};

// Read-only view of the data a tree is trained on. Labels are dense in
// [1, num_classes].
struct TrainingSet {
  const SeriesStore& series;
  std::span<const Label> labels;
  std::size_t num_classes = 0;
};

// Per-class counts indexed by label; index 0 is unused.
using ClassCounts = std::vector<std::size_t>;

double gini_impurity(std::span<const std::size_t> counts);

double gini_gain(std::span<const std::size_t> parent, std::span<const ClassCounts> branches);

// Data reaching one node, grouped by class.
struct NodeData {
  std::span<const std::uint32_t> members;
  std::vector<Label> classes;                       // classes present, ascending
  std::vector<std::vector<std::uint32_t>> by_class;  // parallel to `classes`
  ClassCounts counts;
  DatasetStats stats;
};

NodeData make_node_data(const TrainingSet& data, std::span<const std::uint32_t> members);

// Internal-node test: one measure and one exemplar per class present.
struct Splitter {
  MeasureParams measure;
  std::vector<std::uint32_t> exemplars;  // indices into the series store
  std::vector<Label> labels;             // class of each exemplar
};

// Draws a measure (kind fixed to `tree_kind` when given) and one exemplar per
// class. Throws UsageError when fewer than two classes are present.
Splitter gen_candidate_splitter(const NodeData& node, RandomStream& stream,
                                std::span<const MeasureKind> measures,
                                std::optional<MeasureKind> tree_kind = std::nullopt);

// Routes every member to the branch of its nearest exemplar; ties are broken
// uniformly at random from `stream`. Result is parallel to splitter.exemplars.
std::vector<std::vector<std::uint32_t>> partition(const TrainingSet& data,
                                                  std::span<const std::uint32_t> members,
                                                  const Splitter& splitter, RandomStream& stream);

struct SplitEvaluation {
  Splitter splitter;
  std::vector<std::vector<std::uint32_t>> branches;
  double gini_gain = 0.0;
  std::size_t candidate_index = 0;
};

struct TreeOptions {
  std::size_t candidates = 5;
  MeasureScope scope = MeasureScope::PerNode;
  std::span<const MeasureKind> measures = kAllMeasures;
};

// Generates `options.candidates` splitters from per-candidate children of
// `node_stream` and keeps the highest Gini gain (ties: lowest index).
SplitEvaluation select_split(const TrainingSet& data, const NodeData& node,
                             const RandomStream& node_stream, const TreeOptions& options,
                             std::optional<MeasureKind> tree_kind = std::nullopt);

struct Branch {
  std::uint32_t exemplar = 0;  // index into the owning exemplar store
  Label label = 0;             // class of the exemplar
  std::uint32_t child = 0;     // node index of the subtree

  bool operator==(const Branch&) const = default;
};

struct TreeNode {
  MeasureParams measure;
  std::vector<Branch> branches;  // empty for leaves
  Label label = 0;               // leaf class

  [[nodiscard]] bool is_leaf() const { return branches.empty(); }
  bool operator==(const TreeNode&) const = default;
};

// Nodes in creation order; node 0 is the root.
struct ProximityTree {
  std::vector<TreeNode> nodes;

  [[nodiscard]] const TreeNode& root() const { return nodes.front(); }
  [[nodiscard]] std::size_t depth() const;
  [[nodiscard]] std::size_t leaf_count() const;
  bool operator==(const ProximityTree&) const = default;
};

// Streams used by build_tree: node i draws from derive(0).derive(i); the
// per-tree measure kind is drawn from derive(1).
RandomStream node_stream(const RandomStream& tree_stream, std::size_t node_index);
MeasureKind draw_tree_measure(const RandomStream& tree_stream, std::span<const MeasureKind> measures,
                              std::size_t length);

// Exemplar indices in the result refer to `data.series`.
ProximityTree build_tree(const TrainingSet& data, std::span<const std::uint32_t> members,
                         const RandomStream& tree_stream, const TreeOptions& options);

struct Routing {
  Label label = 0;
  std::size_t nodes_visited = 0;  // internal nodes evaluated
};

// Follows the nearest exemplar at each internal node; exact ties go to the
// first branch in stored order.
Routing route(SeriesRef query, const ProximityTree& tree, const SeriesStore& exemplars);

Label classify_tree(SeriesRef query, const ProximityTree& tree, const SeriesStore& exemplars);

}  // namespace pforest

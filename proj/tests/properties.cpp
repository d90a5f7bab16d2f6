#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "pforest/dataset.hpp"
#include "pforest/distances.hpp"
#include "pforest/params.hpp"
#include "pforest/store.hpp"
#include "pforest/tree.hpp"

namespace props {

namespace {

using pforest::ClassCounts;
using pforest::Label;
using pforest::MeasureKind;

std::vector<double> random_series(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> s(n);
  for (auto& v : s) v = dist(rng);
  return s;
}

void fail(Outcome& o, const std::string& what) {
  if (o.failures++ == 0) o.first_failure = what;
}

}  // namespace

Outcome gini_invariants(std::size_t cases, std::uint64_t seed) {
  Outcome o{"gini invariants (pure node 0, perfect split gain = parent impurity)", cases};
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < cases; ++t) {
    const std::size_t c = 2 + rng() % 8;
    ClassCounts parent(c + 1, 0);
    std::size_t present = 0;
    for (std::size_t k = 1; k <= c; ++k) {
      parent[k] = rng() % 3 == 0 ? 0 : 1 + rng() % 50;
      present += parent[k] > 0 ? 1 : 0;
    }
    if (present == 0) parent[1] = 1;

    // One branch per class present: a perfect split.
    std::vector<ClassCounts> perfect;
    for (std::size_t k = 1; k <= c; ++k) {
      if (parent[k] == 0) continue;
      ClassCounts b(c + 1, 0);
      b[k] = parent[k];
      if (pforest::gini_impurity(b) != 0.0) fail(o, "pure counts have non-zero impurity");
      perfect.push_back(b);
    }
    const double impurity = pforest::gini_impurity(parent);
    const double gain = pforest::gini_gain(parent, perfect);
    if (std::abs(gain - impurity) > 1e-12) {
      std::ostringstream os;
      os << "perfect split gain " << gain << " != parent impurity " << impurity;
      fail(o, os.str());
    }
    // Any split has gain in [0, impurity].
    std::vector<ClassCounts> random_split(2, ClassCounts(c + 1, 0));
    for (std::size_t k = 1; k <= c; ++k) {
      const std::size_t left = parent[k] == 0 ? 0 : rng() % (parent[k] + 1);
      random_split[0][k] = left;
      random_split[1][k] = parent[k] - left;
    }
    const double g = pforest::gini_gain(parent, random_split);
    if (g < -1e-12 || g > impurity + 1e-12) fail(o, "split gain outside [0, impurity]");
    if (impurity < 0.0 || impurity >= 1.0) fail(o, "impurity outside [0, 1)");
  }
  return o;
}

Outcome window_monotonicity(std::size_t cases, std::uint64_t seed) {
  Outcome o{"DTW window monotonicity (w1 <= w2 => cost(w1) >= cost(w2); w = l equals full)",
            cases};
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < cases; ++t) {
    const std::size_t n = 1 + rng() % 40;
    const auto a = random_series(rng, n);
    const auto b = random_series(rng, n);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w <= n; ++w) {
      const double d = pforest::dtw(a, b, w);
      if (d > previous) {
        fail(o, "cost increased from window " + std::to_string(w - 1) + " to " + std::to_string(w));
        break;
      }
      previous = d;
    }
    if (pforest::dtw(a, b, n) != pforest::dtw(a, b, pforest::kFullWindow)) {
      fail(o, "window = length differs from unbounded");
    }
    const std::size_t w = rng() % (n + 1);
    if (pforest::lcss(a, b, 0.5, w) < pforest::lcss(a, b, 0.5, n)) {
      fail(o, "LCSS distance decreased when narrowing the window");
    }
  }
  return o;
}

Outcome measure_axioms(std::size_t cases, std::uint64_t seed) {
  Outcome o{"measure identity, symmetry and non-negativity (all 11 kinds)", cases};
  std::mt19937_64 rng(seed);
  pforest::RandomStream stream(seed);
  for (std::size_t t = 0; t < cases; ++t) {
    const std::size_t n = 3 + rng() % 30;
    const auto a = random_series(rng, n);
    const auto b = random_series(rng, n);
    const pforest::Query qa(a);
    const pforest::Query qb(b);
    pforest::DatasetStats stats;
    stats.length = n;
    stats.sigma = 0.2 + std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    for (MeasureKind kind : pforest::kAllMeasures) {
      const pforest::MeasureParams p = pforest::sample_parameters(kind, stream, stats);
      const std::string name(pforest::to_string(kind));
      const double ab = pforest::distance(p, qa.ref(), qb.ref());
      const double ba = pforest::distance(p, qb.ref(), qa.ref());
      const double aa = pforest::distance(p, qa.ref(), qa.ref());
      if (!(ab >= 0.0)) fail(o, name + " returned a negative or NaN distance");
      if (std::abs(ab - ba) > 1e-12 * std::max(1.0, std::abs(ab))) fail(o, name + " is not symmetric");
      if (aa != 0.0) fail(o, name + " is not zero on identical series");
    }
  }
  return o;
}

Outcome partition_cover(std::size_t cases, std::uint64_t seed) {
  Outcome o{"partition cover, disjointness and nearest-exemplar assignment", cases};
  std::mt19937_64 rng(seed);
  pforest::RandomStream stream(seed);
  for (std::size_t t = 0; t < cases; ++t) {
    const std::size_t length = 3 + rng() % 20;
    const std::size_t classes = 2 + rng() % 5;
    const std::size_t n = classes + rng() % 30;
    pforest::SeriesStore store(length);
    std::vector<Label> labels;
    std::vector<std::uint32_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse values make exact distance ties common.
      std::vector<double> v(length);
      for (auto& x : v) x = static_cast<double>(rng() % 3);
      members.push_back(store.add(v));
      labels.push_back(static_cast<Label>(i < classes ? i + 1 : 1 + rng() % classes));
    }
    const pforest::TrainingSet data{store, labels, classes};
    const pforest::NodeData node = pforest::make_node_data(data, members);
    const pforest::Splitter sp = pforest::gen_candidate_splitter(node, stream, pforest::kAllMeasures);
    const auto branches = pforest::partition(data, members, sp, stream);

    std::vector<int> hits(n, 0);
    for (const auto& b : branches) {
      for (auto m : b) ++hits[m];
    }
    if (std::any_of(hits.begin(), hits.end(), [](int h) { return h != 1; })) {
      fail(o, "a member is missing or assigned twice");
    }
    // Every member sits in a branch whose exemplar is nearest to it.
    for (std::size_t b = 0; b < branches.size(); ++b) {
      for (auto m : branches[b]) {
        auto dist = [&](std::size_t k) {
          return m == sp.exemplars[k]
                     ? 0.0
                     : pforest::distance(sp.measure, store.ref(m), store.ref(sp.exemplars[k]));
        };
        const double own = dist(b);
        for (std::size_t k = 0; k < branches.size(); ++k) {
          if (dist(k) < own) fail(o, "a member is not assigned to a nearest exemplar");
        }
      }
    }
  }
  return o;
}

Outcome znorm_idempotence(std::size_t cases, std::uint64_t seed) {
  Outcome o{"z-normalization idempotence (1e-12)", cases};
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < cases; ++t) {
    const std::size_t n = 2 + rng() % 100;
    const double scale = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(rng));
    const double shift = std::uniform_real_distribution<double>(-100.0, 100.0)(rng);
    auto s = random_series(rng, n);
    for (auto& v : s) v = v * scale + shift;
    if (rng() % 20 == 0) std::fill(s.begin(), s.end(), shift);
    const auto once = pforest::z_normalize(s);
    const auto twice = pforest::z_normalize(once);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(once[i] - twice[i]) > 1e-12) {
        fail(o, "second normalization moved a value");
        break;
      }
    }
  }
  return o;
}

std::vector<Outcome> run_all(std::size_t cases, std::uint64_t seed) {
  return {gini_invariants(cases, seed), window_monotonicity(cases, seed + 1),
          measure_axioms(cases, seed + 2), partition_cover(cases, seed + 3),
          znorm_idempotence(cases, seed + 4)};
}

}  // namespace props

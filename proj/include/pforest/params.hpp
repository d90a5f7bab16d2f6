#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pforest/distances.hpp"
#include "pforest/random.hpp"
#include "pforest/series.hpp"

namespace pforest {

// Summary of the data reaching a tree node, used to parameterize measures.
struct DatasetStats {
  double sigma = 0.0;  // population std of all pooled values at the node
  std::size_t length = 0;
  std::vector<Label> classes;
};

// Population standard deviation of the pooled values of several series.
double pooled_stddev(std::span<const std::span<const double>> series);

// Largest warping window that may be drawn for series of `length`.
constexpr std::size_t max_window(std::size_t length) { return (length + 1) / 4; }

// Replacement for the LCSS/ERP threshold when the node has zero spread.
inline constexpr double kDegenerateEpsilon = 1e-8;

const std::array<double, 10>& twe_nu_grid();
const std::array<double, 10>& twe_lambda_grid();
const std::array<double, 100>& msm_cost_grid();

// Members of `pool` that can be drawn for series of `length`. Derivative
// measures need at least 3 points.
std::vector<MeasureKind> eligible_measures(std::span<const MeasureKind> pool, std::size_t length);

// Uniform over the eligible members of `pool`.
MeasureKind sample_measure_kind(RandomStream& stream, std::size_t length,
                                std::span<const MeasureKind> pool = kAllMeasures);

// Draws parameters for an already chosen measure kind.
MeasureParams sample_parameters(MeasureKind kind, RandomStream& stream, const DatasetStats& stats);

// Draws a measure kind uniformly from `pool` (or uses `fixed_kind`) and then
// its parameters.
MeasureParams sample_measure(RandomStream& stream, const DatasetStats& stats,
                             std::optional<MeasureKind> fixed_kind = std::nullopt,
                             std::span<const MeasureKind> pool = kAllMeasures);

}  // namespace pforest

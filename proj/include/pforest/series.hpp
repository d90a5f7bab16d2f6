#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace pforest {

// Dense class label in [1, c]. Original file labels live in a LabelTable.
using Label = std::int32_t;

struct TimeSeries {
  std::vector<double> values;
  Label label = 0;
};

// Non-owning view of a series together with its derivative (empty when the
// derivative was not computed, e.g. for series shorter than 3).
struct SeriesRef {
  std::span<const double> values;
  std::span<const double> derivative;
};

}  // namespace pforest

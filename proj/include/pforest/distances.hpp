#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pforest/series.hpp"

namespace pforest {

enum class MeasureKind : std::uint8_t {
  ED,
  DTW,
  DTW_R,
  DDTW,
  DDTW_R,
  WDTW,
  WDDTW,
  LCSS,
  ERP,
  TWE,
  MSM,
};

inline constexpr std::size_t kMeasureCount = 11;

inline constexpr std::array<MeasureKind, kMeasureCount> kAllMeasures = {
    MeasureKind::ED,    MeasureKind::DTW,   MeasureKind::DTW_R, MeasureKind::DDTW,
    MeasureKind::DDTW_R, MeasureKind::WDTW, MeasureKind::WDDTW, MeasureKind::LCSS,
    MeasureKind::ERP,   MeasureKind::TWE,   MeasureKind::MSM,
};

std::string_view to_string(MeasureKind kind);
std::optional<MeasureKind> parse_measure_kind(std::string_view name);

// True for the measures that compare derivative series (DDTW family).
bool uses_derivative(MeasureKind kind);

// Window value meaning "no Sakoe-Chiba band".
inline constexpr std::size_t kFullWindow = std::numeric_limits<std::size_t>::max();

// A measure together with its concrete parameters. Only the fields relevant to
// `kind` are meaningful; the others stay zero.
struct MeasureParams {
  MeasureKind kind = MeasureKind::ED;
  std::size_t window = 0;  // DTW_R, DDTW_R, LCSS
  double g = 0.0;          // WDTW, WDDTW
  double epsilon = 0.0;    // LCSS threshold, ERP gap value
  double nu = 0.0;         // TWE stiffness
  double lambda = 0.0;     // TWE penalty
  double c_cost = 0.0;     // MSM split/merge cost

  bool operator==(const MeasureParams&) const = default;
};

// All kernels return squared point costs where a point cost is squared
// (ED, DTW family, ERP). They throw UsageError on length mismatch.

double euclidean(std::span<const double> a, std::span<const double> b);

double dtw(std::span<const double> a, std::span<const double> b,
           std::size_t window = kFullWindow);

// Keogh-Pazzani derivative estimate; endpoints copy their neighbour.
// Throws UsageError for series shorter than 3.
std::vector<double> derivative_transform(std::span<const double> a);

// Logistic weight used by WDTW for an index offset `offset` in series of
// length `length`.
double wdtw_weight(std::size_t offset, std::size_t length, double g);

double wdtw(std::span<const double> a, std::span<const double> b, double g);

// 1 - L/l where L is the banded longest common subsequence. In [0, 1].
double lcss(std::span<const double> a, std::span<const double> b, double epsilon,
            std::size_t window);

double erp(std::span<const double> a, std::span<const double> b, double gap_value);

double twe(std::span<const double> a, std::span<const double> b, double nu,
           double lambda);

double msm(std::span<const double> a, std::span<const double> b, double c_cost);

// Dispatch on `params.kind`. Derivative measures read `derivative` from both
// refs, everything else reads `values`.
double distance(const MeasureParams& params, SeriesRef a, SeriesRef b);

}  // namespace pforest

#include "pforest/distances.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr std::array<std::string_view, kMeasureCount> kNames = {
    "ED", "DTW", "DTW-R", "DDTW", "DDTW-R", "WDTW", "WDDTW", "LCSS", "ERP", "TWE", "MSM",
};

void require_same_length(std::span<const double> a, std::span<const double> b,
                         const char* what) {
  if (a.size() != b.size()) {
    throw UsageError(std::string(what) + ": series lengths differ (" +
                     std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
}

// Per-thread DP rows, reused across calls.
struct Rows {
  std::vector<double> prev;
  std::vector<double> curr;

  void reset(std::size_t n, double fill) {
    prev.assign(n, fill);
    curr.assign(n, fill);
  }
};

Rows& scratch_rows() {
  thread_local Rows rows;
  return rows;
}

inline double sq(double x) { return x * x; }

inline double min3(double x, double y, double z) { return std::min(x, std::min(y, z)); }

// MSM split/merge cost for value x relative to neighbours y and z.
inline double msm_cost(double x, double y, double z, double c) {
  if ((y <= x && x <= z) || (z <= x && x <= y)) return c;
  return c + std::min(std::abs(x - y), std::abs(x - z));
}

}  // namespace

std::string_view to_string(MeasureKind kind) { return kNames[static_cast<std::size_t>(kind)]; }

std::optional<MeasureKind> parse_measure_kind(std::string_view name) {
  for (std::size_t i = 0; i < kMeasureCount; ++i) {
    if (kNames[i] == name) return kAllMeasures[i];
  }
  return std::nullopt;
}

bool uses_derivative(MeasureKind kind) {
  return kind == MeasureKind::DDTW || kind == MeasureKind::DDTW_R || kind == MeasureKind::WDDTW;
}

double euclidean(std::span<const double> a, std::span<const double> b) {
  require_same_length(a, b, "euclidean");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += sq(a[i] - b[i]);
  return sum;
}

double dtw(std::span<const double> a, std::span<const double> b, std::size_t window) {
  require_same_length(a, b, "dtw");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  const std::size_t w = std::min(window, n);

  // Rows are indexed 0..n; index 0 is the virtual border column.
  Rows& rows = scratch_rows();
  rows.reset(n + 1, kInf);
  auto* prev = rows.prev.data();
  auto* curr = rows.curr.data();
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t jlo = i > w ? i - w : 1;
    const std::size_t jhi = std::min(n, i + w);
    curr[jlo - 1] = kInf;
    const double ai = a[i - 1];
    for (std::size_t j = jlo; j <= jhi; ++j) {
      curr[j] = sq(ai - b[j - 1]) + min3(prev[j - 1], prev[j], curr[j - 1]);
    }
    if (jhi < n) curr[jhi + 1] = kInf;
    std::swap(prev, curr);
  }
  return prev[n];
}

std::vector<double> derivative_transform(std::span<const double> a) {
  const std::size_t n = a.size();
  if (n < 3) {
    throw UsageError("derivative_transform: series must have at least 3 points, got " +
                     std::to_string(n));
  }
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = ((a[i] - a[i - 1]) + (a[i + 1] - a[i - 1]) / 2.0) / 2.0;
  }
  d[0] = d[1];
  d[n - 1] = d[n - 2];
  return d;
}

double wdtw_weight(std::size_t offset, std::size_t length, double g) {
  const double mid = static_cast<double>(length) / 2.0;
  return 1.0 / (1.0 + std::exp(-g * (static_cast<double>(offset) - mid)));
}

double wdtw(std::span<const double> a, std::span<const double> b, double g) {
  require_same_length(a, b, "wdtw");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;

  thread_local std::vector<double> weights;
  weights.resize(n);
  for (std::size_t d = 0; d < n; ++d) weights[d] = wdtw_weight(d, n, g);

  Rows& rows = scratch_rows();
  rows.reset(n + 1, kInf);
  auto* prev = rows.prev.data();
  auto* curr = rows.curr.data();
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= n; ++i) {
    curr[0] = kInf;
    const double ai = a[i - 1];
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t offset = i > j ? i - j : j - i;
      curr[j] = weights[offset] * sq(ai - b[j - 1]) + min3(prev[j - 1], prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[n];
}

double lcss(std::span<const double> a, std::span<const double> b, double epsilon,
            std::size_t window) {
  require_same_length(a, b, "lcss");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  const std::size_t w = std::min(window, n);

  // The band restricts matched pairs, not prefixes: an out-of-band cell holds
  // the value of the nearest in-band cell on its row (right of the band) or
  // column (left of the band), so only the two cells bordering the band are
  // ever read.
  Rows& rows = scratch_rows();
  rows.reset(n + 1, 0.0);
  auto* prev = rows.prev.data();
  auto* curr = rows.curr.data();

  for (std::size_t i = 1; i <= n; ++i) {
    const std::size_t jlo = i > w ? i - w : 1;
    const std::size_t jhi = std::min(n, i + w);
    curr[jlo - 1] = jlo == 1 ? 0.0 : prev[jlo - 1];
    const double ai = a[i - 1];
    for (std::size_t j = jlo; j <= jhi; ++j) {
      if (std::abs(ai - b[j - 1]) <= epsilon) {
        curr[j] = prev[j - 1] + 1.0;
      } else {
        curr[j] = std::max(prev[j], curr[j - 1]);
      }
    }
    if (jhi < n) curr[jhi + 1] = curr[jhi];
    std::swap(prev, curr);
  }
  return 1.0 - prev[n] / static_cast<double>(n);
}

double erp(std::span<const double> a, std::span<const double> b, double gap_value) {
  require_same_length(a, b, "erp");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;

  thread_local std::vector<double> gap_b;
  gap_b.resize(n + 1);
  gap_b[0] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) gap_b[j] = sq(b[j - 1] - gap_value);

  Rows& rows = scratch_rows();
  rows.reset(n + 1, 0.0);
  auto* prev = rows.prev.data();
  auto* curr = rows.curr.data();
  for (std::size_t j = 1; j <= n; ++j) prev[j] = prev[j - 1] + gap_b[j];

  for (std::size_t i = 1; i <= n; ++i) {
    const double ai = a[i - 1];
    const double gap_a = sq(ai - gap_value);
    curr[0] = prev[0] + gap_a;
    for (std::size_t j = 1; j <= n; ++j) {
      curr[j] = min3(prev[j - 1] + sq(ai - b[j - 1]), prev[j] + gap_a, curr[j - 1] + gap_b[j]);
    }
    std::swap(prev, curr);
  }
  return prev[n];
}

double twe(std::span<const double> a, std::span<const double> b, double nu, double lambda) {
  require_same_length(a, b, "twe");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;

  // Series are padded with a leading 0 at timestamp 0; timestamps are 1..n.
  auto at = [](std::span<const double> s, std::size_t i) { return i == 0 ? 0.0 : s[i - 1]; };
  const double step = nu + lambda;

  thread_local std::vector<double> del_b;
  del_b.resize(n + 1);
  del_b[0] = 0.0;
  for (std::size_t j = 1; j <= n; ++j) del_b[j] = std::abs(at(b, j) - at(b, j - 1)) + step;

  Rows& rows = scratch_rows();
  rows.reset(n + 1, 0.0);
  auto* prev = rows.prev.data();
  auto* curr = rows.curr.data();
  for (std::size_t j = 1; j <= n; ++j) prev[j] = prev[j - 1] + del_b[j];

  for (std::size_t i = 1; i <= n; ++i) {
    const double ai = at(a, i);
    const double ai1 = at(a, i - 1);
    const double del_a = std::abs(ai - ai1) + step;
    curr[0] = prev[0] + del_a;
    for (std::size_t j = 1; j <= n; ++j) {
      const double offset = static_cast<double>(i > j ? i - j : j - i);
      const double match = prev[j - 1] + std::abs(ai - at(b, j)) + std::abs(ai1 - at(b, j - 1)) +
                           2.0 * nu * offset;
      curr[j] = min3(match, prev[j] + del_a, curr[j - 1] + del_b[j]);
    }
    std::swap(prev, curr);
  }
  return prev[n];
}

double msm(std::span<const double> a, std::span<const double> b, double c_cost) {
  require_same_length(a, b, "msm");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;

  Rows& rows = scratch_rows();
  rows.reset(n + 1, kInf);
  auto* prev = rows.prev.data();
  auto* curr = rows.curr.data();
  prev[0] = 0.0;

  for (std::size_t i = 1; i <= n; ++i) {
    const double ai = a[i - 1];
    curr[0] = kInf;
    for (std::size_t j = 1; j <= n; ++j) {
      const double bj = b[j - 1];
      const double move = prev[j - 1] + std::abs(ai - bj);
      // Vertical and horizontal moves need a predecessor on their own axis;
      // on the first row/column the corresponding cell is infinite anyway.
      const double split_a = i > 1 ? prev[j] + msm_cost(ai, a[i - 2], bj, c_cost) : kInf;
      const double split_b = j > 1 ? curr[j - 1] + msm_cost(bj, ai, b[j - 2], c_cost) : kInf;
      curr[j] = min3(move, split_a, split_b);
    }
    std::swap(prev, curr);
  }
  return prev[n];
}

double distance(const MeasureParams& p, SeriesRef a, SeriesRef b) {
  switch (p.kind) {
    case MeasureKind::ED:
      return euclidean(a.values, b.values);
    case MeasureKind::DTW:
      return dtw(a.values, b.values, kFullWindow);
    case MeasureKind::DTW_R:
      return dtw(a.values, b.values, p.window);
    case MeasureKind::DDTW:
      return dtw(a.derivative, b.derivative, kFullWindow);
    case MeasureKind::DDTW_R:
      return dtw(a.derivative, b.derivative, p.window);
    case MeasureKind::WDTW:
      return wdtw(a.values, b.values, p.g);
    case MeasureKind::WDDTW:
      return wdtw(a.derivative, b.derivative, p.g);
    case MeasureKind::LCSS:
      return lcss(a.values, b.values, p.epsilon, p.window);
    case MeasureKind::ERP:
      return erp(a.values, b.values, p.epsilon);
    case MeasureKind::TWE:
      return twe(a.values, b.values, p.nu, p.lambda);
    case MeasureKind::MSM:
      return msm(a.values, b.values, p.c_cost);
  }
  throw UsageError("distance: unknown measure kind");
}

}  // namespace pforest

#include "pforest/params.hpp"

#include <cmath>
#include <string>

#include "pforest/errors.hpp"

namespace pforest {

namespace {

std::array<double, 100> make_msm_grid() {
  // Four decades between 1e-2 and 1e2 with 25 evenly spaced values each:
  // 0.01..0.1 (both ends), then (0.1, 1], (1, 10], (10, 100].
  std::array<double, 100> grid{};
  std::size_t k = 0;
  for (std::size_t i = 0; i < 25; ++i) grid[k++] = 0.01 + static_cast<double>(i) * 0.09 / 24.0;
  for (double decade : {0.1, 1.0, 10.0}) {
    for (std::size_t i = 1; i <= 25; ++i) {
      grid[k++] = decade + static_cast<double>(i) * 9.0 * decade / 25.0;
    }
  }
  return grid;
}

}  // namespace

double pooled_stddev(std::span<const std::span<const double>> series) {
  double sum = 0.0;
  double count = 0.0;
  for (auto s : series) {
    for (double v : s) sum += v;
    count += static_cast<double>(s.size());
  }
  if (count == 0.0) return 0.0;
  const double mean = sum / count;
  double ss = 0.0;
  for (auto s : series) {
    for (double v : s) ss += (v - mean) * (v - mean);
  }
  return std::sqrt(ss / count);
}

const std::array<double, 10>& twe_nu_grid() {
  static const std::array<double, 10> grid = {1e-5, 1e-4, 5e-4, 1e-3, 5e-3,
                                              1e-2, 5e-2, 1e-1, 5e-1, 1.0};
  return grid;
}

const std::array<double, 10>& twe_lambda_grid() {
  static const std::array<double, 10> grid = [] {
    std::array<double, 10> g{};
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<double>(i) / 9.0;
    return g;
  }();
  return grid;
}

const std::array<double, 100>& msm_cost_grid() {
  static const std::array<double, 100> grid = make_msm_grid();
  return grid;
}

std::vector<MeasureKind> eligible_measures(std::span<const MeasureKind> pool, std::size_t length) {
  std::vector<MeasureKind> kinds;
  kinds.reserve(pool.size());
  for (MeasureKind k : pool) {
    if (length >= 3 || !uses_derivative(k)) kinds.push_back(k);
  }
  return kinds;
}

MeasureKind sample_measure_kind(RandomStream& stream, std::size_t length,
                                std::span<const MeasureKind> pool) {
  const auto kinds = eligible_measures(pool, length);
  if (kinds.empty()) throw UsageError("no measure in the pool is usable for this series length");
  return kinds[stream.uniform_index(kinds.size())];
}

MeasureParams sample_parameters(MeasureKind kind, RandomStream& stream,
                                const DatasetStats& stats) {
  if (uses_derivative(kind) && stats.length < 3) {
    throw UsageError(std::string(to_string(kind)) + " needs series of length >= 3");
  }
  MeasureParams p;
  p.kind = kind;

  auto draw_window = [&] { return stream.uniform_index(max_window(stats.length) + 1); };
  auto draw_epsilon = [&] {
    if (!(stats.sigma > 0.0)) return kDegenerateEpsilon;
    return stream.uniform_real(stats.sigma / 5.0, stats.sigma);
  };

  switch (kind) {
    case MeasureKind::ED:
    case MeasureKind::DTW:
    case MeasureKind::DDTW:
      break;
    case MeasureKind::DTW_R:
    case MeasureKind::DDTW_R:
      p.window = draw_window();
      break;
    case MeasureKind::WDTW:
    case MeasureKind::WDDTW:
      p.g = stream.uniform01();
      break;
    case MeasureKind::LCSS:
      p.epsilon = draw_epsilon();
      p.window = draw_window();
      break;
    case MeasureKind::ERP:
      p.epsilon = draw_epsilon();
      break;
    case MeasureKind::TWE: {
      const auto& nus = twe_nu_grid();
      const auto& lambdas = twe_lambda_grid();
      p.nu = nus[stream.uniform_index(nus.size())];
      p.lambda = lambdas[stream.uniform_index(lambdas.size())];
      break;
    }
    case MeasureKind::MSM: {
      const auto& costs = msm_cost_grid();
      p.c_cost = costs[stream.uniform_index(costs.size())];
      break;
    }
  }
  return p;
}

MeasureParams sample_measure(RandomStream& stream, const DatasetStats& stats,
                             std::optional<MeasureKind> fixed_kind,
                             std::span<const MeasureKind> pool) {
  const MeasureKind kind =
      fixed_kind ? *fixed_kind : sample_measure_kind(stream, stats.length, pool);
  return sample_parameters(kind, stream, stats);
}

}  // namespace pforest

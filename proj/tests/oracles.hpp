#pragma once

// Slow reference implementations used only by tests. They follow the textbook
// definitions directly (path enumeration, subsequence enumeration, memoized
// recursion) and share no code with the library kernels.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <vector>

namespace oracle {

using Series = std::vector<double>;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double squared_euclidean(const Series& a, const Series& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Minimum over every monotone, boundary-anchored warping path whose cells all
// satisfy |i - j| <= window of sum(cost(i, j)). Paths are enumerated one by
// one; no dynamic programming.
inline double min_over_paths(std::size_t n, std::size_t window,
                             const std::function<double(std::size_t, std::size_t)>& cost) {
  double best = kInf;
  std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j,
                                                                   double acc) {
    const std::size_t off = i > j ? i - j : j - i;
    if (off > window) return;
    acc += cost(i, j);
    if (i + 1 == n && j + 1 == n) {
      best = std::min(best, acc);
      return;
    }
    if (i + 1 < n && j + 1 < n) walk(i + 1, j + 1, acc);
    if (i + 1 < n) walk(i + 1, j, acc);
    if (j + 1 < n) walk(i, j + 1, acc);
  };
  if (n > 0) walk(0, 0, 0.0);
  return n == 0 ? 0.0 : best;
}

inline double dtw(const Series& a, const Series& b, std::size_t window) {
  return min_over_paths(a.size(), window, [&](std::size_t i, std::size_t j) {
    return (a[i] - b[j]) * (a[i] - b[j]);
  });
}

inline double wdtw(const Series& a, const Series& b, double g) {
  const double n = static_cast<double>(a.size());
  return min_over_paths(a.size(), a.size(), [&](std::size_t i, std::size_t j) {
    const double d = std::abs(static_cast<double>(i) - static_cast<double>(j));
    const double w = 1.0 / (1.0 + std::exp(-g * (d - n / 2.0)));
    return w * (a[i] - b[j]) * (a[i] - b[j]);
  });
}

inline Series derivative(const Series& a) {
  const std::size_t n = a.size();
  Series d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    d[i] = ((a[i] - a[i - 1]) + ((a[i + 1] - a[i - 1]) / 2.0)) / 2.0;
  }
  d.front() = d[1];
  d.back() = d[n - 2];
  return d;
}

// Longest common subsequence by enumerating every pair of equally sized index
// subsets and checking the matched pairs in order.
inline double lcss(const Series& a, const Series& b, double epsilon, std::size_t window) {
  const std::size_t n = a.size();
  std::size_t best = 0;
  for (unsigned ma = 0; ma < (1U << n); ++ma) {
    std::vector<std::size_t> ia;
    for (std::size_t i = 0; i < n; ++i) {
      if (ma & (1U << i)) ia.push_back(i);
    }
    if (ia.size() <= best) continue;
    for (unsigned mb = 0; mb < (1U << n); ++mb) {
      std::vector<std::size_t> ib;
      for (std::size_t j = 0; j < n; ++j) {
        if (mb & (1U << j)) ib.push_back(j);
      }
      if (ib.size() != ia.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < ia.size() && ok; ++k) {
        const std::size_t off = ia[k] > ib[k] ? ia[k] - ib[k] : ib[k] - ia[k];
        ok = off <= window && std::abs(a[ia[k]] - b[ib[k]]) <= epsilon;
      }
      if (ok) {
        best = ia.size();
        break;
      }
    }
  }
  return 1.0 - static_cast<double>(best) / static_cast<double>(n);
}

// Top-down memoized recursion over prefix lengths (i, j).
class Memo {
 public:
  explicit Memo(std::function<double(Memo&, std::size_t, std::size_t)> f) : f_(std::move(f)) {}
  double operator()(std::size_t i, std::size_t j) {
    const auto key = std::make_pair(i, j);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const double v = f_(*this, i, j);
    cache_[key] = v;
    return v;
  }

 private:
  std::function<double(Memo&, std::size_t, std::size_t)> f_;
  std::map<std::pair<std::size_t, std::size_t>, double> cache_;
};

inline double erp(const Series& a, const Series& b, double g) {
  Memo d([&](Memo& self, std::size_t i, std::size_t j) -> double {
    if (i == 0 && j == 0) return 0.0;
    double best = kInf;
    if (i > 0 && j > 0) best = std::min(best, self(i - 1, j - 1) + std::pow(a[i - 1] - b[j - 1], 2));
    if (i > 0) best = std::min(best, self(i - 1, j) + std::pow(a[i - 1] - g, 2));
    if (j > 0) best = std::min(best, self(i, j - 1) + std::pow(b[j - 1] - g, 2));
    return best;
  });
  return d(a.size(), b.size());
}

// Time warp edit distance over series padded with a leading zero at time 0,
// element k at time k.
inline double twe(const Series& a, const Series& b, double nu, double lambda) {
  Series pa{0.0};
  Series pb{0.0};
  pa.insert(pa.end(), a.begin(), a.end());
  pb.insert(pb.end(), b.begin(), b.end());
  Memo d([&](Memo& self, std::size_t i, std::size_t j) -> double {
    if (i == 0 && j == 0) return 0.0;
    double best = kInf;
    if (i > 0 && j > 0) {
      const double stiff = nu * (std::abs(double(i) - double(j)) + std::abs(double(i - 1) - double(j - 1)));
      best = std::min(best, self(i - 1, j - 1) + std::abs(pa[i] - pb[j]) +
                                std::abs(pa[i - 1] - pb[j - 1]) + stiff);
    }
    if (i > 0) best = std::min(best, self(i - 1, j) + std::abs(pa[i] - pa[i - 1]) + nu + lambda);
    if (j > 0) best = std::min(best, self(i, j - 1) + std::abs(pb[j] - pb[j - 1]) + nu + lambda);
    return best;
  });
  return d(a.size(), b.size());
}

inline double msm_split_cost(double x, double y, double z, double c) {
  if ((y <= x && x <= z) || (z <= x && x <= y)) return c;
  return c + std::min(std::abs(x - y), std::abs(x - z));
}

inline double msm(const Series& a, const Series& b, double c) {
  Memo d([&](Memo& self, std::size_t i, std::size_t j) -> double {
    if (i == 0 && j == 0) return 0.0;
    if (i == 0 || j == 0) return kInf;
    double best = self(i - 1, j - 1) + std::abs(a[i - 1] - b[j - 1]);
    if (i > 1) best = std::min(best, self(i - 1, j) + msm_split_cost(a[i - 1], a[i - 2], b[j - 1], c));
    if (j > 1) best = std::min(best, self(i, j - 1) + msm_split_cost(b[j - 1], a[i - 1], b[j - 2], c));
    return best;
  });
  return d(a.size(), b.size());
}

inline bool close(double x, double y, double rel = 1e-9) {
  if (x == y) return true;
  return std::abs(x - y) <= rel * std::max({std::abs(x), std::abs(y), 1e-300});
}

}  // namespace oracle

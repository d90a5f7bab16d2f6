#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pforest/series.hpp"

namespace pforest {

// Equal-length series stored contiguously, each with its derivative computed
// once on insertion (series shorter than 3 get no derivative).
class SeriesStore {
 public:
  SeriesStore() = default;
  explicit SeriesStore(std::size_t length) : length_(length) {}

  std::uint32_t add(std::span<const double> values);

  [[nodiscard]] SeriesRef ref(std::size_t i) const;
  [[nodiscard]] std::span<const double> values(std::size_t i) const;
  [[nodiscard]] std::size_t size() const { return length_ == 0 ? 0 : values_.size() / length_; }
  [[nodiscard]] std::size_t length() const { return length_; }
  [[nodiscard]] bool has_derivatives() const { return length_ >= 3; }

 private:
  std::size_t length_ = 0;
  std::vector<double> values_;
  std::vector<double> derivatives_;
};

// A query series with its derivative, owned.
class Query {
 public:
  explicit Query(std::span<const double> values);

  [[nodiscard]] SeriesRef ref() const { return {values_, derivative_}; }
  [[nodiscard]] std::size_t length() const { return values_.size(); }

 private:
  std::vector<double> values_;
  std::vector<double> derivative_;
};

}  // namespace pforest

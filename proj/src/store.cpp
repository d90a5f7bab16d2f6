#include "pforest/store.hpp"

#include <string>

#include "pforest/distances.hpp"
#include "pforest/errors.hpp"

namespace pforest {

std::uint32_t SeriesStore::add(std::span<const double> values) {
  if (values.size() != length_) {
    throw UsageError("SeriesStore: expected length " + std::to_string(length_) + ", got " +
                     std::to_string(values.size()));
  }
  const auto index = static_cast<std::uint32_t>(size());
  values_.insert(values_.end(), values.begin(), values.end());
  if (has_derivatives()) {
    const auto d = derivative_transform(values);
    derivatives_.insert(derivatives_.end(), d.begin(), d.end());
  }
  return index;
}

std::span<const double> SeriesStore::values(std::size_t i) const {
  return std::span<const double>(values_).subspan(i * length_, length_);
}

SeriesRef SeriesStore::ref(std::size_t i) const {
  SeriesRef r;
  r.values = values(i);
  if (has_derivatives()) r.derivative = std::span<const double>(derivatives_).subspan(i * length_, length_);
  return r;
}

Query::Query(std::span<const double> values) : values_(values.begin(), values.end()) {
  if (values_.size() >= 3) derivative_ = derivative_transform(values_);
}

}  // namespace pforest

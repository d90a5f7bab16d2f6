#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pforest/series.hpp"

namespace pforest {

// Equal-length labelled series. Labels are dense in [1, num_classes()];
// label_names maps them back to the labels found in the source file.
struct Dataset {
  std::string name;
  std::size_t length = 0;
  std::vector<TimeSeries> series;
  std::vector<std::string> label_names;

  [[nodiscard]] std::size_t size() const { return series.size(); }
  [[nodiscard]] std::size_t num_classes() const { return label_names.size(); }
  [[nodiscard]] std::vector<std::size_t> class_counts() const;  // index = label
};

// Checks uniform length, label range and finiteness. Throws DataError.
void validate(const Dataset& data);

// Reads a UCR-style file: one series per row, label in the first column,
// cells separated by commas, tabs or blanks (detected from the first row).
// When `label_names` is given (e.g. the training set's table) labels are
// mapped through it and unknown labels are a DataError; otherwise labels are
// ordered numerically when all are numbers, lexically otherwise.
Dataset load_ucr(const std::filesystem::path& path,
                 const std::vector<std::string>* label_names = nullptr);

// Writes `data` in the same format with original label names.
void save_ucr(const Dataset& data, const std::filesystem::path& path, char delimiter = ',');

// Zero mean, unit population std; constant series map to zeros.
std::vector<double> z_normalize(std::span<const double> values);
void z_normalize(Dataset& data);

struct SynthConfig {
  std::size_t n = 1000;
  std::size_t length = 46;
  std::size_t classes = 24;
  std::uint64_t seed = 0;
  double noise = 0.3;               // std of additive Gaussian noise
  double max_shift = 0.1;           // max random time shift, fraction of length
  std::uint64_t split = 0;          // 0 = train, 1 = test, ...; prototypes are shared
};

// Class prototypes are smooth random waveforms fixed by (seed, length,
// classes); each series is a shifted, rescaled, noisy copy of its class
// prototype. Series i has label (i mod classes) + 1, so classes are balanced
// within one and a prefix of a larger draw equals a smaller draw.
Dataset synth_generate(const SynthConfig& config);

// Random subset of `target_n` series with class proportions kept within one
// instance and every class present. Throws UsageError if target_n is smaller
// than the class count or larger than the dataset.
Dataset stratified_subsample(const Dataset& data, std::size_t target_n, std::uint64_t seed);

// Keeps only the given labels and renumbers them densely in the given order.
Dataset select_classes(const Dataset& data, std::span<const Label> keep);

}  // namespace pforest

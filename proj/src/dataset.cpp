#include "pforest/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string_view>

#include "pforest/errors.hpp"
#include "pforest/random.hpp"

namespace pforest {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_row(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  if (delimiter == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\r')) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\r') ++i;
      cells.push_back(line.substr(start, i - start));
    }
    return cells;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

bool parse_double(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end && !cell.empty();
}

// Numeric labels are normalised so "1", "1.0" and "+1" name the same class.
std::string canonical_label(std::string_view cell) {
  double v = 0.0;
  if (parse_double(cell, v) && std::isfinite(v)) {
    if (v == std::floor(v) && std::abs(v) < 1e15) {
      return std::to_string(static_cast<long long>(v));
    }
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
  }
  return std::string(cell);
}

std::string where(const std::filesystem::path& path, std::size_t row) {
  return path.string() + ": row " + std::to_string(row);
}

double normal(RandomStream& stream) {
  // Box-Muller; u1 is kept away from zero.
  const double u1 = 1.0 - stream.uniform01();
  const double u2 = stream.uniform01();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

void shuffle(std::vector<std::size_t>& v, RandomStream& stream) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(stream.uniform_index(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(num_classes() + 1, 0);
  for (const auto& s : series) {
    if (s.label >= 1 && static_cast<std::size_t>(s.label) <= num_classes()) {
      ++counts[static_cast<std::size_t>(s.label)];
    }
  }
  return counts;
}

void validate(const Dataset& data) {
  for (std::size_t i = 0; i < data.series.size(); ++i) {
    const auto& s = data.series[i];
    if (s.values.size() != data.length) {
      throw DataError(data.name + ": series " + std::to_string(i) + " has length " +
                      std::to_string(s.values.size()) + ", expected " +
                      std::to_string(data.length));
    }
    if (s.label < 1 || static_cast<std::size_t>(s.label) > data.num_classes()) {
      throw DataError(data.name + ": series " + std::to_string(i) + " has label out of range");
    }
    for (double v : s.values) {
      if (!std::isfinite(v)) {
        throw DataError(data.name + ": series " + std::to_string(i) + " has a non-finite value");
      }
    }
  }
}

Dataset load_ucr(const std::filesystem::path& path, const std::vector<std::string>* label_names) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open file");

  struct Row {
    std::string label;
    std::vector<double> values;
  };
  std::vector<Row> rows;
  char delimiter = 0;
  std::string line;
  std::size_t row_number = 0;
  while (std::getline(in, line)) {
    ++row_number;
    const std::string_view text = trim(line);
    if (text.empty()) continue;
    if (delimiter == 0) {
      delimiter = text.find('\t') != std::string_view::npos  ? '\t'
                  : text.find(',') != std::string_view::npos ? ','
                                                             : ' ';
    }
    const auto cells = split_row(text, delimiter);
    if (cells.size() < 2) {
      throw DataError(where(path, row_number) + ": expected a label and at least one value");
    }
    Row row;
    row.label = canonical_label(cells[0]);
    if (row.label.empty()) throw DataError(where(path, row_number) + ", column 1: empty label");
    row.values.reserve(cells.size() - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v)) {
        throw DataError(where(path, row_number) + ", column " + std::to_string(c + 1) +
                        ": not a number: '" + std::string(cells[c]) + "'");
      }
      if (!std::isfinite(v)) {
        throw DataError(where(path, row_number) + ", column " + std::to_string(c + 1) +
                        ": missing or non-finite value");
      }
      row.values.push_back(v);
    }
    if (!rows.empty() && row.values.size() != rows.front().values.size()) {
      throw DataError(where(path, row_number) + ": has " + std::to_string(row.values.size()) +
                      " values, expected " + std::to_string(rows.front().values.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(path.string() + ": file contains no series");

  Dataset data;
  data.name = path.stem().string();
  data.length = rows.front().values.size();

  if (label_names != nullptr) {
    data.label_names = *label_names;
  } else {
    std::vector<std::string> names;
    for (const auto& r : rows) names.push_back(r.label);
    std::sort(names.begin(), names.end());
    names.erase(std::unique(names.begin(), names.end()), names.end());
    const bool numeric = std::all_of(names.begin(), names.end(), [](const std::string& n) {
      double v = 0.0;
      return parse_double(n, v);
    });
    if (numeric) {
      std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
        double x = 0.0, y = 0.0;
        parse_double(a, x);
        parse_double(b, y);
        return x < y;
      });
    }
    data.label_names = std::move(names);
  }

  std::map<std::string, Label> index;
  for (std::size_t i = 0; i < data.label_names.size(); ++i) {
    index.emplace(data.label_names[i], static_cast<Label>(i + 1));
  }
  data.series.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto it = index.find(rows[i].label);
    if (it == index.end()) {
      throw DataError(path.string() + ": label '" + rows[i].label +
                      "' does not occur in the training label set");
    }
    data.series.push_back({std::move(rows[i].values), it->second});
  }
  return data;
}

void save_ucr(const Dataset& data, const std::filesystem::path& path, char delimiter) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string() + ": cannot open for writing");
  char buf[64];
  for (const auto& s : data.series) {
    out << data.label_names.at(static_cast<std::size_t>(s.label - 1));
    for (double v : s.values) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << delimiter << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
  if (!out) throw DataError(path.string() + ": write failed");
}

std::vector<double> z_normalize(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  if (out.empty()) return out;
  const auto n = static_cast<double>(out.size());
  double mean = 0.0;
  for (double v : out) mean += v;
  mean /= n;
  // Second pass removes the rounding error of the first when the offset is
  // large relative to the spread.
  double residual = 0.0;
  for (double v : out) residual += v - mean;
  mean += residual / n;
  double ss = 0.0;
  for (double v : out) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / n);
  if (!(sd > 1e-12)) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }
  for (double& v : out) v = (v - mean) / sd;
  return out;
}

void z_normalize(Dataset& data) {
  for (auto& s : data.series) s.values = z_normalize(s.values);
}

Dataset synth_generate(const SynthConfig& config) {
  if (config.classes < 2 || config.n < config.classes) {
    throw UsageError("synth_generate: need n >= classes >= 2");
  }
  if (config.length < 2) throw UsageError("synth_generate: length must be >= 2");

  const std::size_t l = config.length;
  const auto dl = static_cast<double>(l);
  const RandomStream root(config.seed);

  // Prototypes: a few low-frequency sinusoids plus one Gaussian bump.
  std::vector<std::vector<double>> prototypes(config.classes, std::vector<double>(l, 0.0));
  for (std::size_t c = 0; c < config.classes; ++c) {
    RandomStream s = root.derive(0).derive(c);
    auto& p = prototypes[c];
    for (int k = 0; k < 3; ++k) {
      const double cycles = s.uniform_real(0.5, 3.0);
      const double phase = s.uniform_real(0.0, 2.0 * std::numbers::pi);
      const double amp = s.uniform_real(0.3, 1.0);
      for (std::size_t t = 0; t < l; ++t) {
        p[t] += amp * std::sin(2.0 * std::numbers::pi * cycles * static_cast<double>(t) / dl + phase);
      }
    }
    const double centre = s.uniform_real(0.1, 0.9) * dl;
    const double width = s.uniform_real(0.03, 0.15) * dl;
    const double height = s.uniform_real(-2.0, 2.0);
    for (std::size_t t = 0; t < l; ++t) {
      const double z = (static_cast<double>(t) - centre) / width;
      p[t] += height * std::exp(-0.5 * z * z);
    }
  }

  Dataset data;
  data.name = "synthetic";
  data.length = l;
  for (std::size_t c = 1; c <= config.classes; ++c) data.label_names.push_back(std::to_string(c));
  data.series.reserve(config.n);

  const double max_shift = config.max_shift * dl;
  for (std::size_t i = 0; i < config.n; ++i) {
    RandomStream s = root.derive(10 + config.split).derive(i);
    const std::size_t c = i % config.classes;
    const auto& p = prototypes[c];
    const double shift = s.uniform_real(-max_shift, max_shift);
    const double scale = 1.0 + 0.1 * normal(s);
    TimeSeries ts;
    ts.label = static_cast<Label>(c + 1);
    ts.values.resize(l);
    for (std::size_t t = 0; t < l; ++t) {
      // Linear interpolation at the shifted position, clamped to the ends.
      const double x = std::clamp(static_cast<double>(t) - shift, 0.0, dl - 1.0);
      const auto lo = static_cast<std::size_t>(std::floor(x));
      const std::size_t hi = std::min(lo + 1, l - 1);
      const double frac = x - static_cast<double>(lo);
      const double v = p[lo] * (1.0 - frac) + p[hi] * frac;
      ts.values[t] = scale * v + config.noise * normal(s);
    }
    data.series.push_back(std::move(ts));
  }
  return data;
}

Dataset stratified_subsample(const Dataset& data, std::size_t target_n, std::uint64_t seed) {
  const std::size_t n = data.size();
  const auto counts = data.class_counts();
  std::size_t present = 0;
  for (std::size_t c = 1; c < counts.size(); ++c) present += counts[c] > 0 ? 1 : 0;
  if (target_n < present) {
    throw UsageError("stratified_subsample: target size " + std::to_string(target_n) +
                     " is smaller than the number of classes " + std::to_string(present));
  }
  if (target_n > n) {
    throw UsageError("stratified_subsample: target size " + std::to_string(target_n) +
                     " exceeds dataset size " + std::to_string(n));
  }

  // Largest-remainder quotas, then make sure every class keeps one series.
  const std::size_t k = counts.size();
  std::vector<double> exact(k, 0.0);
  std::vector<std::size_t> quota(k, 0);
  std::size_t assigned = 0;
  for (std::size_t c = 1; c < k; ++c) {
    exact[c] = static_cast<double>(target_n) * static_cast<double>(counts[c]) / static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(std::floor(exact[c]));
    assigned += quota[c];
  }
  std::vector<std::size_t> order;
  for (std::size_t c = 1; c < k; ++c) order.push_back(c);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return exact[a] - std::floor(exact[a]) > exact[b] - std::floor(exact[b]);
  });
  for (std::size_t i = 0; assigned < target_n; ++i) {
    ++quota[order[i % order.size()]];
    ++assigned;
  }
  for (std::size_t c = 1; c < k; ++c) {
    if (counts[c] == 0 || quota[c] > 0) continue;
    std::size_t donor = 0;
    double surplus = -1e300;
    for (std::size_t d = 1; d < k; ++d) {
      if (quota[d] < 2) continue;
      const double s = static_cast<double>(quota[d]) - exact[d];
      if (s > surplus) {
        surplus = s;
        donor = d;
      }
    }
    --quota[donor];
    quota[c] = 1;
  }

  RandomStream stream(seed);
  std::vector<std::vector<std::size_t>> by_class(k);
  for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(data.series[i].label)].push_back(i);
  std::vector<std::size_t> chosen;
  chosen.reserve(target_n);
  for (std::size_t c = 1; c < k; ++c) {
    shuffle(by_class[c], stream);
    chosen.insert(chosen.end(), by_class[c].begin(),
                  by_class[c].begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  shuffle(chosen, stream);

  Dataset out;
  out.name = data.name;
  out.length = data.length;
  out.label_names = data.label_names;
  out.series.reserve(chosen.size());
  for (auto i : chosen) out.series.push_back(data.series[i]);
  return out;
}

Dataset select_classes(const Dataset& data, std::span<const Label> keep) {
  std::vector<Label> remap(data.num_classes() + 1, 0);
  Dataset out;
  out.name = data.name;
  out.length = data.length;
  for (Label l : keep) {
    if (l < 1 || static_cast<std::size_t>(l) > data.num_classes()) {
      throw UsageError("select_classes: unknown label " + std::to_string(l));
    }
    if (remap[static_cast<std::size_t>(l)] != 0) {
      throw UsageError("select_classes: label " + std::to_string(l) + " listed twice");
    }
    out.label_names.push_back(data.label_names[static_cast<std::size_t>(l - 1)]);
    remap[static_cast<std::size_t>(l)] = static_cast<Label>(out.label_names.size());
  }
  for (const auto& s : data.series) {
    const Label mapped = remap[static_cast<std::size_t>(s.label)];
    if (mapped != 0) out.series.push_back({s.values, mapped});
  }
  return out;
}

}  // namespace pforest

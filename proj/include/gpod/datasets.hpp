#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gpod/errors.hpp"
#include "gpod/random.hpp"
#include "gpod/types.hpp"

namespace gpod {

struct Dataset {
  Matrix points;
  std::optional<std::vector<int>> labels;
  std::string name;

  Index n() const { return points.rows(); }
  Index dimension() const { return points.cols(); }

  int num_classes() const {
    if (!labels || labels->empty()) return 0;
    return *std::max_element(labels->begin(), labels->end()) + 1;
  }

  // Rows selected by `indices`, labels carried along.
  Dataset subset(const std::vector<std::size_t>& indices, std::string subset_name) const {
    Dataset out;
    out.name = std::move(subset_name);
    out.points.resize(static_cast<Index>(indices.size()), points.cols());
    if (labels) out.labels.emplace();
    for (std::size_t r = 0; r < indices.size(); ++r) {
      out.points.row(static_cast<Index>(r)) = points.row(static_cast<Index>(indices[r]));
      if (labels) out.labels->push_back((*labels)[indices[r]]);
    }
    return out;
  }
};

// Outer circle of radius 1 (label 0, ceil(n/2) points) and inner circle of
// radius `radius_ratio` (label 1, floor(n/2) points), evenly spaced in angle,
// plus isotropic Gaussian noise.
inline Dataset make_circles(Index n, double noise, double radius_ratio, std::uint64_t seed) {
  if (n < 2) fail(ErrorKind::size, "make_circles needs n >= 2");
  if (!(radius_ratio > 0.0 && radius_ratio < 1.0))
    fail(ErrorKind::parameter, "radius ratio must lie in (0, 1), got " + std::to_string(radius_ratio));
  if (!(noise >= 0.0)) fail(ErrorKind::parameter, "noise must be nonnegative");

  const Index outer = (n + 1) / 2;
  const Index inner = n / 2;
  Dataset d;
  d.name = "circles";
  d.points.resize(n, 2);
  d.labels.emplace(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < outer; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(outer);
    d.points(i, 0) = std::cos(t);
    d.points(i, 1) = std::sin(t);
  }
  for (Index i = 0; i < inner; ++i) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(inner);
    d.points(outer + i, 0) = radius_ratio * std::cos(t);
    d.points(outer + i, 1) = radius_ratio * std::sin(t);
    (*d.labels)[static_cast<std::size_t>(outer + i)] = 1;
  }
  if (noise > 0.0) {
    Rng rng(seed);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < 2; ++c) d.points(i, c) += noise * rng.normal();
  }
  return d;
}

// Upper arc (cos t, sin t) and lower arc (1 - cos t, 0.5 - sin t) for t in
// [0, pi], labels by arc, plus isotropic Gaussian noise.
inline Dataset make_moons(Index n, double noise, std::uint64_t seed) {
  if (n < 2) fail(ErrorKind::size, "make_moons needs n >= 2");
  if (!(noise >= 0.0)) fail(ErrorKind::parameter, "noise must be nonnegative");

  const Index upper = (n + 1) / 2;
  const Index lower = n / 2;
  auto angle = [](Index i, Index count) {
    return count > 1 ? std::numbers::pi * static_cast<double>(i) / static_cast<double>(count - 1) : 0.0;
  };
  Dataset d;
  d.name = "moons";
  d.points.resize(n, 2);
  d.labels.emplace(static_cast<std::size_t>(n), 0);
  for (Index i = 0; i < upper; ++i) {
    const double t = angle(i, upper);
    d.points(i, 0) = std::cos(t);
    d.points(i, 1) = std::sin(t);
  }
  for (Index i = 0; i < lower; ++i) {
    const double t = angle(i, lower);
    d.points(upper + i, 0) = 1.0 - std::cos(t);
    d.points(upper + i, 1) = 0.5 - std::sin(t);
    (*d.labels)[static_cast<std::size_t>(upper + i)] = 1;
  }
  if (noise > 0.0) {
    Rng rng(seed);
    for (Index i = 0; i < n; ++i)
      for (Index c = 0; c < 2; ++c) d.points(i, c) += noise * rng.normal();
  }
  return d;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(delimiter, start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

inline std::optional<double> parse_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

inline std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace detail

struct LoadOptions {
  std::optional<int> label_column;  // negative counts from the end
  char delimiter = ',';
  bool standardize = true;
};

// Delimited numeric table. A first row with any non-numeric feature field is
// treated as a header. Labels (any text) are mapped to 0..K-1 by first
// appearance; standardization z-scores each feature with a 1e-12 std floor.
inline Dataset load_delimited(const std::string& path, const LoadOptions& options = {}) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::input, "cannot open " + path);

  Dataset d;
  d.name = path.substr(path.find_last_of('/') == std::string::npos ? 0 : path.find_last_of('/') + 1);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::map<std::string, int> label_ids;
  std::size_t width = 0;
  std::optional<std::size_t> label_index;
  std::string line;
  long line_no = 0;
  bool first_data_line = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_fields(line, options.delimiter);
    if (first_data_line) {
      width = fields.size();
      if (options.label_column) {
        const int col = *options.label_column < 0 ? static_cast<int>(width) + *options.label_column : *options.label_column;
        if (col < 0 || col >= static_cast<int>(width))
          fail(ErrorKind::input, path + ": label column " + std::to_string(*options.label_column) +
                                     " out of range for " + std::to_string(width) + " columns");
        label_index = static_cast<std::size_t>(col);
      }
      bool header = false;
      for (std::size_t c = 0; c < fields.size(); ++c)
        if (c != label_index && !detail::parse_double(fields[c])) header = true;
      first_data_line = false;
      if (header) continue;
    }
    if (fields.size() != width)
      fail(ErrorKind::input, path + ":" + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                 " fields, found " + std::to_string(fields.size()));
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (label_index && c == *label_index) {
        labels.push_back(label_ids.try_emplace(std::string(fields[c]), static_cast<int>(label_ids.size())).first->second);
        continue;
      }
      const auto value = detail::parse_double(fields[c]);
      if (!value || !std::isfinite(*value))
        fail(ErrorKind::input, path + ":" + std::to_string(line_no) + ": column " + std::to_string(c + 1) +
                                   " is not a finite number: '" + std::string(fields[c]) + "'");
      row.push_back(*value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::input, path + ": no data rows");

  const Index cols = static_cast<Index>(rows.front().size());
  if (cols == 0) fail(ErrorKind::input, path + ": no feature columns");
  d.points.resize(static_cast<Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (Index c = 0; c < cols; ++c) d.points(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  if (label_index) d.labels = std::move(labels);

  if (options.standardize) {
    for (Index c = 0; c < cols; ++c) {
      if (d.points.col(c).maxCoeff() == d.points.col(c).minCoeff()) {
        d.points.col(c).setZero();
        continue;
      }
      const double mean = d.points.col(c).mean();
      const double var = (d.points.col(c).array() - mean).square().mean();
      const double sd = std::max(std::sqrt(var), 1e-12);
      d.points.col(c) = ((d.points.col(c).array() - mean) / sd).matrix();
    }
  }
  return d;
}

// Writes features (shortest round-trip decimal form) followed by the label
// column when labels exist; no header.
inline void write_delimited(const Dataset& d, const std::string& path, char delimiter = ',') {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::input, "cannot write " + path);
  for (Index i = 0; i < d.n(); ++i) {
    for (Index c = 0; c < d.dimension(); ++c) {
      if (c > 0) out << delimiter;
      out << detail::format_double(d.points(i, c));
    }
    if (d.labels) out << delimiter << (*d.labels)[static_cast<std::size_t>(i)];
    out << '\n';
  }
}

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
};

// Seeded uniform permutation; the training side receives ceil((1-f) n)
// points, clamped so both sides are nonempty.
inline Split train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    fail(ErrorKind::parameter, "test fraction must lie in (0, 1), got " + std::to_string(test_fraction));
  const std::size_t n = static_cast<std::size_t>(data.n());
  if (n < 2) fail(ErrorKind::size, "cannot split fewer than 2 points");

  Rng rng(seed);
  const std::vector<std::size_t> perm = rng.permutation(n);
  auto train_count =
      static_cast<std::size_t>(std::ceil((1.0 - test_fraction) * static_cast<double>(n) - 1e-9));
  train_count = std::clamp<std::size_t>(train_count, 1, n - 1);

  Split s;
  s.train_indices.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(train_count));
  s.test_indices.assign(perm.begin() + static_cast<std::ptrdiff_t>(train_count), perm.end());
  s.train = data.subset(s.train_indices, data.name + "/train");
  s.test = data.subset(s.test_indices, data.name + "/test");
  return s;
}

}  // namespace gpod

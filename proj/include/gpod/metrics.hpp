#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "gpod/errors.hpp"
#include "gpod/types.hpp"

namespace gpod {

// counts[p][t]: points with predicted cluster p and true class t. Labels are
// compacted to 0..K-1 by first appearance.
struct ContingencyTable {
  std::vector<std::vector<long>> counts;
  long n = 0;

  std::size_t rows() const { return counts.size(); }
  std::size_t cols() const { return counts.empty() ? 0 : counts.front().size(); }

  static ContingencyTable build(const std::vector<int>& pred, const std::vector<int>& truth) {
    if (pred.size() != truth.size())
      fail(ErrorKind::size, "label vectors differ in length: " + std::to_string(pred.size()) + " vs " +
                                std::to_string(truth.size()));
    if (pred.empty()) fail(ErrorKind::size, "label vectors are empty");
    const std::vector<int> p = compact(pred);
    const std::vector<int> t = compact(truth);
    const int kp = *std::max_element(p.begin(), p.end()) + 1;
    const int kt = *std::max_element(t.begin(), t.end()) + 1;
    ContingencyTable table;
    table.counts.assign(static_cast<std::size_t>(kp), std::vector<long>(static_cast<std::size_t>(kt), 0));
    for (std::size_t i = 0; i < p.size(); ++i) ++table.counts[static_cast<std::size_t>(p[i])][static_cast<std::size_t>(t[i])];
    table.n = static_cast<long>(p.size());
    return table;
  }

  static std::vector<int> compact(const std::vector<int>& labels) {
    std::map<int, int> ids;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(ids.try_emplace(l, static_cast<int>(ids.size())).first->second);
    return out;
  }
};

// Optimal assignment for a square cost matrix via shortest augmenting paths
// with potentials, O(K^3). Returns row -> column.
inline std::vector<int> hungarian(const Matrix& costs, bool maximize) {
  if (costs.rows() != costs.cols())
    fail(ErrorKind::size, "assignment matrix must be square, got " + std::to_string(costs.rows()) + "x" +
                              std::to_string(costs.cols()));
  if (!costs.allFinite()) fail(ErrorKind::input, "assignment matrix has a non-finite entry");
  const int k = static_cast<int>(costs.rows());
  if (k == 0) return {};
  const double sign = maximize ? -1.0 : 1.0;
  const double inf = std::numeric_limits<double>::infinity();

  // 1-based arrays; column 0 is the virtual source.
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0);
  std::vector<int> match(k + 1, 0), way(k + 1, 0);
  for (int row = 1; row <= k; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> minv(k + 1, inf);
    std::vector<bool> used(k + 1, false);
    do {
      used[col0] = true;
      const int r = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int c = 1; c <= k; ++c) {
        if (used[c]) continue;
        const double cur = sign * costs(r - 1, c - 1) - u[r] - v[c];
        if (cur < minv[c]) {
          minv[c] = cur;
          way[c] = col0;
        }
        if (minv[c] < delta) {
          delta = minv[c];
          col1 = c;
        }
      }
      for (int c = 0; c <= k; ++c) {
        if (used[c]) {
          u[match[c]] += delta;
          v[c] -= delta;
        } else {
          minv[c] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(static_cast<std::size_t>(k));
  for (int c = 1; c <= k; ++c) assignment[static_cast<std::size_t>(match[c] - 1)] = c - 1;
  return assignment;
}

// Fraction of points whose cluster maps to their class under the best
// one-to-one matching; the table is zero-padded to square.
inline double accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
  const ContingencyTable table = ContingencyTable::build(pred, truth);
  const std::size_t k = std::max(table.rows(), table.cols());
  Matrix weights = Matrix::Zero(static_cast<Index>(k), static_cast<Index>(k));
  for (std::size_t p = 0; p < table.rows(); ++p)
    for (std::size_t t = 0; t < table.cols(); ++t)
      weights(static_cast<Index>(p), static_cast<Index>(t)) = static_cast<double>(table.counts[p][t]);
  const std::vector<int> match = hungarian(weights, true);
  long agree = 0;
  for (std::size_t p = 0; p < k; ++p) agree += static_cast<long>(weights(static_cast<Index>(p), match[p]));
  return static_cast<double>(agree) / static_cast<double>(table.n);
}

// Mutual information over the arithmetic mean of the two entropies (natural
// log). Both partitions trivial -> 1; exactly one trivial -> 0.
inline double nmi(const std::vector<int>& pred, const std::vector<int>& truth) {
  const ContingencyTable table = ContingencyTable::build(pred, truth);
  const double n = static_cast<double>(table.n);
  std::vector<double> row_sum(table.rows(), 0.0), col_sum(table.cols(), 0.0);
  for (std::size_t p = 0; p < table.rows(); ++p)
    for (std::size_t t = 0; t < table.cols(); ++t) {
      row_sum[p] += static_cast<double>(table.counts[p][t]);
      col_sum[t] += static_cast<double>(table.counts[p][t]);
    }
  auto entropy = [n](const std::vector<double>& sums) {
    double h = 0.0;
    for (double s : sums)
      if (s > 0.0) h -= (s / n) * std::log(s / n);
    return h;
  };
  const double hp = entropy(row_sum);
  const double ht = entropy(col_sum);
  const bool trivial_p = table.rows() == 1;
  const bool trivial_t = table.cols() == 1;
  if (trivial_p && trivial_t) return 1.0;
  if (trivial_p || trivial_t) return 0.0;

  double mi = 0.0;
  for (std::size_t p = 0; p < table.rows(); ++p)
    for (std::size_t t = 0; t < table.cols(); ++t) {
      const double c = static_cast<double>(table.counts[p][t]);
      if (c > 0.0) mi += (c / n) * std::log(c * n / (row_sum[p] * col_sum[t]));
    }
  const double value = mi / (0.5 * (hp + ht));
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace gpod

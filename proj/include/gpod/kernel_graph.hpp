#pragma once

#include <cmath>
#include <string>

#include "gpod/errors.hpp"
#include "gpod/types.hpp"

namespace gpod {

enum class KernelKind { gaussian };

// Gaussian affinity exp(-|x - y|^2 / (2 sigma^2)); sigma is in the units of
// the point coordinates.
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  double sigma = 1.0;

  static KernelSpec gaussian(double sigma) {
    KernelSpec spec{KernelKind::gaussian, sigma};
    spec.validate();
    return spec;
  }

  void validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      fail(ErrorKind::parameter, "kernel sigma must be positive and finite, got " + std::to_string(sigma));
  }

  // log W for a squared distance; used where W itself may underflow.
  double log_weight(double squared_distance) const { return -squared_distance / (2.0 * sigma * sigma); }

  double weight(double squared_distance) const { return std::exp(log_weight(squared_distance)); }
};

namespace detail {

inline double squared_distance(const Matrix& a, Index i, const Matrix& b, Index j) {
  double sum = 0.0;
  for (Index c = 0; c < a.cols(); ++c) {
    const double diff = a(i, c) - b(j, c);
    sum += diff * diff;
  }
  return sum;
}

inline void require_finite(const Matrix& points, const char* what) {
  for (Index j = 0; j < points.cols(); ++j)
    for (Index i = 0; i < points.rows(); ++i)
      if (!std::isfinite(points(i, j)))
        fail(ErrorKind::input, std::string(what) + " has a non-finite coordinate at row " + std::to_string(i) +
                                   ", column " + std::to_string(j));
}

}  // namespace detail

// Fully connected affinity graph. `raw` holds the unscaled kernel values
// (diagonal included); the 1/n scale only enters through `scale`.
struct WeightGraph {
  Matrix raw;
  double scale = 0.0;
  Vector degrees;

  Index n() const { return raw.rows(); }

  // The scaled weight matrix (1/n) W.
  Matrix weights() const { return scale * raw; }
};

inline WeightGraph build_weight_graph(const Matrix& points, const KernelSpec& kernel) {
  kernel.validate();
  const Index n = points.rows();
  if (n < 2) fail(ErrorKind::size, "a weight graph needs at least 2 points, got " + std::to_string(n));
  detail::require_finite(points, "point matrix");

  WeightGraph graph;
  graph.raw.resize(n, n);
  graph.scale = 1.0 / static_cast<double>(n);
  for (Index j = 0; j < n; ++j) {
    graph.raw(j, j) = 1.0;
    for (Index i = j + 1; i < n; ++i) {
      const double w = kernel.weight(detail::squared_distance(points, i, points, j));
      graph.raw(i, j) = w;
      graph.raw(j, i) = w;
    }
  }
  graph.degrees.resize(n);
  for (Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Index j = 0; j < n; ++j) sum += graph.raw(j, i);  // column i == row i
    graph.degrees(i) = graph.scale * sum;
  }
  return graph;
}

enum class LaplacianKind { unnormalized, random_walk };

inline const char* to_string(LaplacianKind kind) {
  return kind == LaplacianKind::unnormalized ? "unnormalized" : "random_walk";
}

// Tagged, non-owning view of a Laplacian; the graph must outlive it.
class Laplacian {
 public:
  Laplacian(const WeightGraph& graph, LaplacianKind kind) : graph_(&graph), kind_(kind) {}

  LaplacianKind kind() const { return kind_; }
  const WeightGraph& graph() const { return *graph_; }
  Index n() const { return graph_->n(); }

  // L = D - W for the unnormalized kind, I - D^{-1} W for the random-walk kind.
  Matrix materialize() const {
    const WeightGraph& g = *graph_;
    const Index n = g.n();
    Matrix m(n, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const double w = g.scale * g.raw(i, j);
        const double entry = (i == j ? g.degrees(i) : 0.0) - w;
        m(i, j) = kind_ == LaplacianKind::unnormalized ? entry : entry / g.degrees(i);
      }
    return m;
  }

  // The degree matrix D, which the random-walk eigenproblem uses as its metric.
  Matrix degree_matrix() const { return graph_->degrees.asDiagonal(); }

 private:
  const WeightGraph* graph_;
  LaplacianKind kind_;
};

inline Laplacian laplacian(const WeightGraph& graph, LaplacianKind kind) {
  for (Index i = 0; i < graph.n(); ++i)
    if (!(graph.degrees(i) > 0.0))
      fail(ErrorKind::degenerate_graph, "vertex " + std::to_string(i) + " has zero degree");
  return Laplacian(graph, kind);
}

}  // namespace gpod

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gpod/errors.hpp"
#include "gpod/kernel_graph.hpp"
#include "gpod/pod.hpp"
#include "gpod/spectra.hpp"
#include "gpod/types.hpp"

namespace gpod {

enum class Variant { ratiocut, ncut };

inline const char* to_string(Variant v) { return v == Variant::ratiocut ? "ratiocut" : "ncut"; }

// Coefficient applied to the RatioCut eigenfunction estimate. The
// out-of-sample algorithm divides by sqrt(lambda_k); composing the two
// eigenvector/eigenfunction relations gives 1/lambda_k instead.
enum class ScalingMode {
  inv_sqrt_lambda,
  inv_lambda,
};

inline const char* to_string(ScalingMode m) { return m == ScalingMode::inv_sqrt_lambda ? "inv-sqrt-lambda" : "inv-lambda"; }

// Everything needed to evaluate the extended eigenfunctions at new points.
struct ExtensionModel {
  Variant variant = Variant::ncut;
  Matrix train_points;
  KernelSpec kernel;
  Vector eigenvalues;
  Matrix train_vectors;
  ScalingMode scaling = ScalingMode::inv_sqrt_lambda;
  double degenerate_threshold = 1e-8;

  Index n() const { return train_points.rows(); }
  Index dimension() const { return train_points.cols(); }
  Index k() const { return train_vectors.cols(); }

  // Throws a configuration error unless the fields are mutually consistent.
  void validate() const {
    kernel.validate();
    if (train_points.rows() < 2) fail(ErrorKind::config, "extension model needs at least 2 training points");
    if (train_vectors.rows() != train_points.rows())
      fail(ErrorKind::config, "model has " + std::to_string(train_points.rows()) + " training points but " +
                                  std::to_string(train_vectors.rows()) + " eigenvector rows");
    if (eigenvalues.size() != train_vectors.cols() || eigenvalues.size() < 1)
      fail(ErrorKind::config, "model eigenvalue count does not match eigenvector columns");
    for (Index k = 1; k < eigenvalues.size(); ++k)
      if (eigenvalues(k) < eigenvalues(k - 1)) fail(ErrorKind::config, "model eigenvalues are not ascending");
    if (!(degenerate_threshold >= 0.0)) fail(ErrorKind::config, "degenerate threshold must be nonnegative");
  }
};

struct ExtensionOptions {
  std::optional<Variant> variant;  // inferred from the embedding when unset
  ScalingMode scaling = ScalingMode::inv_sqrt_lambda;
  double degenerate_threshold = 1e-8;
};

inline Variant variant_of(const SpectralEmbedding& e) {
  if (e.laplacian_kind == LaplacianKind::unnormalized && e.normalization == Normalization::identity)
    return Variant::ratiocut;
  if (e.laplacian_kind == LaplacianKind::random_walk && e.normalization == Normalization::degree)
    return Variant::ncut;
  fail(ErrorKind::config, std::string("embedding tags are inconsistent: ") + to_string(e.laplacian_kind) +
                              " Laplacian with " + to_string(e.normalization) + " normalization");
}

inline ExtensionModel fit_extension(const SpectralEmbedding& embedding, const Matrix& train_points,
                                    const KernelSpec& kernel, const ExtensionOptions& options = {}) {
  const Variant actual = variant_of(embedding);
  if (options.variant && *options.variant != actual)
    fail(ErrorKind::config, std::string("requested ") + to_string(*options.variant) + " extension from a " +
                                to_string(actual) + " embedding");
  ExtensionModel model{actual,           train_points,      kernel, embedding.eigenvalues, embedding.vectors,
                       options.scaling, options.degenerate_threshold};
  model.validate();
  return model;
}

// Extended eigenvector matrix for a batch of new points (m x K).
struct Extension {
  Matrix values;
  std::vector<Index> degenerate_columns;  // replaced by the constant 1/sqrt(m)
};

namespace detail {

inline void check_new_points(const ExtensionModel& model, const Matrix& new_points) {
  if (new_points.rows() < 1) fail(ErrorKind::size, "no new points to extend to");
  if (new_points.cols() != model.dimension())
    fail(ErrorKind::input, "new points have dimension " + std::to_string(new_points.cols()) +
                               " but the model was trained on dimension " + std::to_string(model.dimension()));
  require_finite(new_points, "new point matrix");
}

inline void apply_column_scales(const ExtensionModel& model, const std::vector<double>& scales,
                                const std::vector<bool>& degenerate, Extension& out) {
  const Index m = out.values.rows();
  const double constant = 1.0 / std::sqrt(static_cast<double>(m));
  for (Index k = 0; k < model.k(); ++k) {
    if (degenerate[static_cast<std::size_t>(k)]) {
      out.values.col(k).setConstant(constant);
      out.degenerate_columns.push_back(k);
    } else {
      out.values.col(k) *= scales[static_cast<std::size_t>(k)];
    }
  }
}

}  // namespace detail

// RatioCut extension: for a new point x,
//   s(x)   = (1/n) sum_j W(x, x_j)
//   u_k(x) = c_k (1/n) sum_j (s(x) - W(x, x_j)) u_k[j]
// with c_k = 1/sqrt(lambda_k) or 1/lambda_k per the scaling mode. Columns
// whose eigenvalue is below the degenerate threshold become constant.
inline Extension extend_ratiocut(const ExtensionModel& model, const Matrix& new_points) {
  if (model.variant != Variant::ratiocut) fail(ErrorKind::config, "extend_ratiocut needs a ratiocut model");
  detail::check_new_points(model, new_points);
  const Index n = model.n();
  const Index m = new_points.rows();
  const Index k = model.k();
  const double inv_n = 1.0 / static_cast<double>(n);

  Extension out;
  out.values.resize(m, k);
  Vector profile(n);
  for (Index i = 0; i < m; ++i) {
    double s = 0.0;
    for (Index j = 0; j < n; ++j) {
      profile(j) = model.kernel.weight(detail::squared_distance(new_points, i, model.train_points, j));
      s += profile(j);
    }
    s *= inv_n;
    for (Index c = 0; c < k; ++c) {
      double acc = 0.0;
      for (Index j = 0; j < n; ++j) acc += (s - profile(j)) * model.train_vectors(j, c);
      out.values(i, c) = inv_n * acc;
    }
  }

  std::vector<double> scales(static_cast<std::size_t>(k));
  std::vector<bool> degenerate(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c) {
    const double lambda = model.eigenvalues(c);
    degenerate[static_cast<std::size_t>(c)] = lambda < model.degenerate_threshold;
    scales[static_cast<std::size_t>(c)] =
        model.scaling == ScalingMode::inv_sqrt_lambda ? 1.0 / std::sqrt(lambda) : 1.0 / lambda;
  }
  detail::apply_column_scales(model, scales, degenerate, out);
  return out;
}

// NCut extension: u_k(x) = 1/(1 - lambda_k) * sum_j p_j(x) u_k[j], where
// p_j(x) = W(x, x_j) / sum_l W(x, x_l) is evaluated in log space so it stays
// a proper convex weight vector even when every W(x, x_j) underflows.
inline Extension extend_ncut(const ExtensionModel& model, const Matrix& new_points) {
  if (model.variant != Variant::ncut) fail(ErrorKind::config, "extend_ncut needs an ncut model");
  detail::check_new_points(model, new_points);
  const Index n = model.n();
  const Index m = new_points.rows();
  const Index k = model.k();

  Extension out;
  out.values.resize(m, k);
  Vector logw(n);
  for (Index i = 0; i < m; ++i) {
    double top = -std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      logw(j) = model.kernel.log_weight(detail::squared_distance(new_points, i, model.train_points, j));
      top = std::max(top, logw(j));
    }
    double total = 0.0;
    for (Index j = 0; j < n; ++j) {
      logw(j) = std::exp(logw(j) - top);
      total += logw(j);
    }
    for (Index c = 0; c < k; ++c) {
      double acc = 0.0;
      for (Index j = 0; j < n; ++j) acc += logw(j) * model.train_vectors(j, c);
      out.values(i, c) = acc / total;
    }
  }

  std::vector<double> scales(static_cast<std::size_t>(k));
  std::vector<bool> degenerate(static_cast<std::size_t>(k));
  for (Index c = 0; c < k; ++c) {
    const double gap = 1.0 - model.eigenvalues(c);
    degenerate[static_cast<std::size_t>(c)] = std::abs(gap) < model.degenerate_threshold;
    scales[static_cast<std::size_t>(c)] = 1.0 / gap;
  }
  detail::apply_column_scales(model, scales, degenerate, out);
  return out;
}

inline Extension extend(const ExtensionModel& model, const Matrix& new_points) {
  return model.variant == Variant::ratiocut ? extend_ratiocut(model, new_points) : extend_ncut(model, new_points);
}

struct GpodResult {
  PodResult pod;
  Extension extension;
  Index zero_rows = 0;  // rows of the extension that were all zero
};

// Clusters new points from the training eigenfunctions alone: extend,
// normalize rows, discretize with POD. No eigensolve happens here.
inline GpodResult gpod(const ExtensionModel& model, const Matrix& new_points, std::uint64_t seed,
                       const PodOptions& options = {}) {
  GpodResult result;
  result.extension = extend(model, new_points);
  RowNormalization normalized = normalize_rows(result.extension.values);
  result.zero_rows = normalized.zero_rows;
  if (normalized.rows.rows() < model.k())
    fail(ErrorKind::size, "gpod needs at least K = " + std::to_string(model.k()) + " new points, got " +
                              std::to_string(normalized.rows.rows()));
  result.pod = pod(normalized.rows, seed, options);
  return result;
}

}  // namespace gpod

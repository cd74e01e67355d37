#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "gpod/errors.hpp"
#include "gpod/random.hpp"
#include "gpod/types.hpp"

namespace gpod {

// Binary n x K indicator with exactly one 1 per row.
struct DiscreteAssignment {
  Matrix matrix;
  std::vector<int> cluster_of;

  static DiscreteAssignment from_labels(const std::vector<int>& labels, Index k) {
    DiscreteAssignment a;
    a.matrix = Matrix::Zero(static_cast<Index>(labels.size()), k);
    a.cluster_of = labels;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0 || labels[i] >= k)
        fail(ErrorKind::input, "label " + std::to_string(labels[i]) + " outside 0.." + std::to_string(k - 1));
      a.matrix(static_cast<Index>(i), labels[i]) = 1.0;
    }
    return a;
  }

  Index n() const { return matrix.rows(); }
  Index k() const { return matrix.cols(); }

  std::vector<Index> cluster_sizes() const {
    std::vector<Index> sizes(static_cast<std::size_t>(k()), 0);
    for (int c : cluster_of) ++sizes[static_cast<std::size_t>(c)];
    return sizes;
  }

  bool has_empty_cluster() const {
    for (Index s : cluster_sizes())
      if (s == 0) return true;
    return false;
  }
};

struct Rotation {
  Matrix matrix;

  static Rotation identity(Index k) { return {Matrix::Identity(k, k)}; }
  Index k() const { return matrix.rows(); }
};

struct RowNormalization {
  Matrix rows;
  Index zero_rows = 0;
};

// Scales every nonzero row to unit length; all-zero rows stay zero and are
// counted.
inline RowNormalization normalize_rows(const Matrix& embedding) {
  RowNormalization out{embedding, 0};
  for (Index i = 0; i < out.rows.rows(); ++i) {
    const double norm = out.rows.row(i).norm();
    if (norm > 0.0 && std::isfinite(norm))
      out.rows.row(i) /= norm;
    else {
      out.rows.row(i).setZero();
      ++out.zero_rows;
    }
  }
  return out;
}

namespace detail {

// Modified Gram-Schmidt over the columns of `basis`. A column whose residual
// falls below `drop_tol` (relative to its original length) is replaced by a
// seeded random direction orthogonalized against the accepted ones.
inline Matrix orthonormalize_columns(Matrix basis, Rng& rng, double drop_tol = 1e-10) {
  const Index k = basis.cols();
  for (Index c = 0; c < k; ++c) {
    const double original = basis.col(c).norm();
    for (Index p = 0; p < c; ++p) basis.col(c) -= basis.col(p).dot(basis.col(c)) * basis.col(p);
    double norm = basis.col(c).norm();
    while (!(norm > drop_tol * std::max(original, 1.0))) {
      for (Index r = 0; r < basis.rows(); ++r) basis(r, c) = rng.normal();
      for (int pass = 0; pass < 2; ++pass)
        for (Index p = 0; p < c; ++p) basis.col(c) -= basis.col(p).dot(basis.col(c)) * basis.col(p);
      norm = basis.col(c).norm();
    }
    basis.col(c) /= norm;
  }
  return basis;
}

}  // namespace detail

// Greedy start: the first column is a random row of U_hat; each further
// column is the row least aligned (in accumulated |U_hat r|) with the columns
// chosen so far. All-zero rows are never picked. The stacked rows are then
// orthonormalized so the result is a proper rotation.
inline Rotation init_rotation(const Matrix& u_hat, std::uint64_t seed) {
  const Index n = u_hat.rows();
  const Index k = u_hat.cols();
  if (k < 1) fail(ErrorKind::size, "rotation needs at least one column");
  if (n < k) fail(ErrorKind::size, "need at least K = " + std::to_string(k) + " rows, got " + std::to_string(n));

  Rng rng(seed);
  std::vector<Index> candidates;
  for (Index i = 0; i < n; ++i)
    if (u_hat.row(i).squaredNorm() > 0.0) candidates.push_back(i);

  Matrix stacked = Matrix::Zero(k, k);
  if (!candidates.empty()) {
    const Index first = candidates[static_cast<std::size_t>(rng.index(candidates.size()))];
    stacked.col(0) = u_hat.row(first).transpose();
    Vector accumulated = Vector::Zero(n);
    for (Index c = 1; c < k; ++c) {
      accumulated += (u_hat * stacked.col(c - 1)).cwiseAbs();
      Index pick = candidates.front();
      for (Index i : candidates)
        if (accumulated(i) < accumulated(pick)) pick = i;
      stacked.col(c) = u_hat.row(pick).transpose();
    }
  }
  return {detail::orthonormalize_columns(std::move(stacked), rng)};
}

// Row-wise argmax of U_hat R, lowest column on ties.
inline DiscreteAssignment discretize_step(const Matrix& u_hat, const Rotation& r) {
  const Matrix rotated = u_hat * r.matrix;
  const Index n = rotated.rows();
  const Index k = rotated.cols();
  DiscreteAssignment a;
  a.matrix = Matrix::Zero(n, k);
  a.cluster_of.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    Index best = 0;
    for (Index c = 1; c < k; ++c)
      if (rotated(i, c) > rotated(i, best)) best = c;
    a.matrix(i, best) = 1.0;
    a.cluster_of[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return a;
}

struct RotationStep {
  Rotation rotation;
  double phi = 0.0;  // sum of singular values of assignment^T U_hat
};

// Orthogonal Procrustes: with assignment^T U_hat = V Omega W^T, the rotation
// W V^T maximizes tr(R^T U_hat^T assignment) and the maximum is tr(Omega).
inline RotationStep rotation_step(const DiscreteAssignment& assignment, const Matrix& u_hat) {
  if (assignment.n() != u_hat.rows() || assignment.k() != u_hat.cols())
    fail(ErrorKind::size, "assignment is " + std::to_string(assignment.n()) + "x" + std::to_string(assignment.k()) +
                              " but embedding is " + std::to_string(u_hat.rows()) + "x" +
                              std::to_string(u_hat.cols()));
  const Index k = u_hat.cols();
  Matrix cross = Matrix::Zero(k, k);
  for (Index i = 0; i < u_hat.rows(); ++i) cross.row(assignment.cluster_of[static_cast<std::size_t>(i)]) += u_hat.row(i);

  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (!svd.singularValues().allFinite()) fail(ErrorKind::numerical, "SVD of the K x K alignment matrix failed");
  return {{svd.matrixV() * svd.matrixU().transpose()}, svd.singularValues().sum()};
}

struct PodOptions {
  double tol = 1e-10;
  int max_iter = 100;
};

struct PodResult {
  DiscreteAssignment assignment;
  Rotation rotation;  // optimal rotation for `assignment`
  std::vector<double> objective_trace;
  bool converged = false;
  int iterations = 0;
  bool empty_cluster = false;
};

// Alternates discretize_step and rotation_step from `start` until the
// Procrustes objective changes by less than tol.
inline PodResult pod(const Matrix& u_hat, Rotation start, const PodOptions& options = {}) {
  if (start.k() != u_hat.cols())
    fail(ErrorKind::size, "initial rotation is " + std::to_string(start.k()) + "x" + std::to_string(start.k()) +
                              " but embedding has " + std::to_string(u_hat.cols()) + " columns");
  if (options.max_iter < 1) fail(ErrorKind::parameter, "max_iter must be at least 1");

  PodResult result;
  Rotation current = std::move(start);
  double previous = 0.0;
  for (int it = 0; it < options.max_iter; ++it) {
    DiscreteAssignment assignment = discretize_step(u_hat, current);
    RotationStep step = rotation_step(assignment, u_hat);
    result.objective_trace.push_back(step.phi);
    result.iterations = it + 1;
    result.assignment = std::move(assignment);
    result.rotation = std::move(step.rotation);
    if (std::abs(step.phi - previous) < options.tol) {
      result.converged = true;
      break;
    }
    previous = step.phi;
    current = result.rotation;
  }
  result.empty_cluster = result.assignment.has_empty_cluster();
  return result;
}

inline PodResult pod(const Matrix& u_hat, std::uint64_t seed, const PodOptions& options = {}) {
  return pod(u_hat, init_rotation(u_hat, seed), options);
}

}  // namespace gpod

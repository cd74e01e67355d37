#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "gpod/errors.hpp"
#include "gpod/kernel_graph.hpp"
#include "gpod/pod.hpp"
#include "gpod/spectra.hpp"

namespace gpod {

struct RiskReport {
  double empirical_error = 0.0;
  double eigen_sum_scaled = 0.0;
  double discretization_gap = 0.0;
  Vector per_cluster_gap;
};

// F(U) = 1/(2n(n-1)) sum_k sum_{i,j} (1/n) W_ij (u_ki - u_kj)^2. The i == j
// terms vanish, so the full double sum is taken.
inline double empirical_error(const WeightGraph& graph, const Matrix& u) {
  const Index n = graph.n();
  if (u.rows() != n)
    fail(ErrorKind::size, "U has " + std::to_string(u.rows()) + " rows but the graph has " + std::to_string(n) +
                              " vertices");
  double total = 0.0;
  for (Index k = 0; k < u.cols(); ++k)
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const double diff = u(i, k) - u(j, k);
        total += graph.raw(i, j) * diff * diff;
      }
  const double nn = static_cast<double>(n);
  return graph.scale * total / (2.0 * nn * (nn - 1.0));
}

struct SpectralIdentity {
  double fhat = 0.0;
  double eig_sum = 0.0;  // (1/(n(n-1))) sum of the embedding's eigenvalues
  double rel_err = 0.0;
};

// The relaxed optimum's error equals the scaled eigenvalue sum for both
// Laplacian kinds (u^T L u = lambda under the matching normalization).
inline SpectralIdentity spectral_identity_check(const SpectralEmbedding& embedding, const WeightGraph& graph) {
  if (embedding.n() != graph.n())
    fail(ErrorKind::config, "embedding has " + std::to_string(embedding.n()) + " rows but the graph has " +
                                std::to_string(graph.n()) + " vertices");
  const bool consistent =
      (embedding.laplacian_kind == LaplacianKind::unnormalized && embedding.normalization == Normalization::identity) ||
      (embedding.laplacian_kind == LaplacianKind::random_walk && embedding.normalization == Normalization::degree);
  if (!consistent) fail(ErrorKind::config, "embedding normalization does not match its Laplacian kind");

  SpectralIdentity out;
  out.fhat = empirical_error(graph, embedding.vectors);
  const double nn = static_cast<double>(graph.n());
  out.eig_sum = embedding.eigenvalues.sum() / (nn * (nn - 1.0));
  out.rel_err = std::abs(out.fhat - out.eig_sum) / std::max(out.eig_sum, 1e-300);
  return out;
}

struct DiscretizationGap {
  double gap = 0.0;
  Vector per_cluster;
};

// Frobenius norm of assignment - U_hat R, and the column norms of the same
// difference.
inline DiscretizationGap discretization_gap(const DiscreteAssignment& assignment, const Matrix& u_hat,
                                            const Rotation& r) {
  if (assignment.n() != u_hat.rows() || assignment.k() != u_hat.cols() || r.k() != u_hat.cols())
    fail(ErrorKind::size, "discretization gap operands have mismatched dimensions");
  const Matrix diff = assignment.matrix - u_hat * r.matrix;
  DiscretizationGap out;
  out.per_cluster = diff.colwise().norm().transpose();
  out.gap = diff.norm();
  return out;
}

inline RiskReport risk_report(const WeightGraph& graph, const SpectralEmbedding& embedding,
                              const DiscreteAssignment& assignment, const Matrix& u_hat, const Rotation& r) {
  const SpectralIdentity identity = spectral_identity_check(embedding, graph);
  const DiscretizationGap gap = discretization_gap(assignment, u_hat, r);
  return {identity.fhat, identity.eig_sum, gap.gap, gap.per_cluster};
}

}  // namespace gpod

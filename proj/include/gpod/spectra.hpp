#pragma once

#include <lapacke.h>

#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "gpod/errors.hpp"
#include "gpod/kernel_graph.hpp"
#include "gpod/types.hpp"

namespace gpod {

enum class Normalization {
  identity,  // U^T U = I
  degree,    // U^T D U = I
};

inline const char* to_string(Normalization n) { return n == Normalization::identity ? "identity" : "degree"; }

// K smallest eigenpairs of a graph Laplacian, eigenvalues ascending; column k
// of `vectors` pairs with eigenvalues(k).
struct SpectralEmbedding {
  Vector eigenvalues;
  Matrix vectors;
  Normalization normalization = Normalization::identity;
  LaplacianKind laplacian_kind = LaplacianKind::unnormalized;

  Index n() const { return vectors.rows(); }
  Index k() const { return vectors.cols(); }
};

namespace detail {

inline std::atomic<long>& eigensolve_counter() {
  static std::atomic<long> counter{0};
  return counter;
}

inline std::function<void(Index)>& eigensolve_hook() {
  static std::function<void(Index)> hook;
  return hook;
}

}  // namespace detail

// Number of dense eigensolves performed by this process so far.
inline long eigensolve_count() { return detail::eigensolve_counter().load(); }

// Installs a callback that runs before every eigensolve (receives the matrix
// order). Tests use it to prove a code path never reaches the eigensolver.
class ScopedEigensolveHook {
 public:
  explicit ScopedEigensolveHook(std::function<void(Index)> hook)
      : previous_(std::exchange(detail::eigensolve_hook(), std::move(hook))) {}
  ~ScopedEigensolveHook() { detail::eigensolve_hook() = std::move(previous_); }

  ScopedEigensolveHook(const ScopedEigensolveHook&) = delete;
  ScopedEigensolveHook& operator=(const ScopedEigensolveHook&) = delete;

 private:
  std::function<void(Index)> previous_;
};

namespace detail {

// Lowest `k` eigenpairs of the symmetric matrix whose lower triangle is in
// `sym` (destroyed). Uses LAPACK's MRRR driver restricted to an index range.
inline std::pair<Vector, Matrix> symmetric_lowest(Matrix& sym, Index k) {
  const Index n = sym.rows();
  if (auto& hook = eigensolve_hook()) hook(n);
  eigensolve_counter().fetch_add(1);

  lapack_int found = 0;
  Vector all_values(n);
  Matrix vectors(n, k);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', static_cast<lapack_int>(n), sym.data(),
                                         static_cast<lapack_int>(n), 0.0, 0.0, 1, static_cast<lapack_int>(k), 0.0,
                                         &found, all_values.data(), vectors.data(), static_cast<lapack_int>(n),
                                         support.data());
  if (info != 0 || found != k)
    fail(ErrorKind::numerical, "symmetric eigensolver (dsyevr) failed on a " + std::to_string(n) + "x" +
                                   std::to_string(n) + " matrix: info = " + std::to_string(info) + ", " +
                                   std::to_string(found) + " of " + std::to_string(k) + " eigenpairs converged");
  // Cheap guard against a miscompiled or misbehaving BLAS backend.
  const double drift = (vectors.transpose() * vectors - Matrix::Identity(k, k)).cwiseAbs().maxCoeff();
  if (!(drift < 1e-8))
    fail(ErrorKind::numerical, "eigenvectors returned by LAPACK are not orthonormal (max deviation " +
                                   std::to_string(drift) + "); check the linked BLAS");
  return {all_values.head(k), std::move(vectors)};
}

// Largest-magnitude entry of each column made positive; ties go to the
// lowest row index.
inline void fix_signs(Matrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index best = 0;
    for (Index r = 1; r < vectors.rows(); ++r)
      if (std::abs(vectors(r, c)) > std::abs(vectors(best, c))) best = r;
    if (vectors(best, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

inline void check_order(const Laplacian& lap, Index k, LaplacianKind expected) {
  if (lap.kind() != expected)
    fail(ErrorKind::config, std::string("expected a ") + to_string(expected) + " Laplacian, got " +
                                to_string(lap.kind()));
  if (k < 1 || k > lap.n())
    fail(ErrorKind::size, "requested " + std::to_string(k) + " eigenpairs from a graph with " +
                              std::to_string(lap.n()) + " vertices");
}

}  // namespace detail

// Relaxed RatioCut: K smallest eigenpairs of L = D - W, orthonormal columns.
inline SpectralEmbedding smallest_eigenpairs_unnormalized(const Laplacian& lap, Index k) {
  detail::check_order(lap, k, LaplacianKind::unnormalized);
  Matrix sym = lap.materialize();
  auto [values, vectors] = detail::symmetric_lowest(sym, k);
  detail::fix_signs(vectors);
  return {std::move(values), std::move(vectors), Normalization::identity, LaplacianKind::unnormalized};
}

// Relaxed NCut: K smallest eigenpairs of L_rw = I - D^{-1} W, solved as
// L u = lambda D u through v = D^{1/2} u on D^{-1/2} L D^{-1/2}; columns
// satisfy u^T D u = 1.
inline SpectralEmbedding smallest_eigenpairs_random_walk(const Laplacian& lap, Index k) {
  detail::check_order(lap, k, LaplacianKind::random_walk);
  const WeightGraph& g = lap.graph();
  const Index n = g.n();
  Vector inv_sqrt_degree(n);
  for (Index i = 0; i < n; ++i) {
    if (!(g.degrees(i) >= 1e-300))
      fail(ErrorKind::degenerate_graph, "vertex " + std::to_string(i) + " has vanishing degree " +
                                            std::to_string(g.degrees(i)));
    inv_sqrt_degree(i) = 1.0 / std::sqrt(g.degrees(i));
  }
  Matrix sym(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = j; i < n; ++i) {
      const double l = (i == j ? g.degrees(i) : 0.0) - g.scale * g.raw(i, j);
      sym(i, j) = l * inv_sqrt_degree(i) * inv_sqrt_degree(j);
    }
  auto [values, vectors] = detail::symmetric_lowest(sym, k);
  vectors = inv_sqrt_degree.asDiagonal() * vectors;
  detail::fix_signs(vectors);
  return {std::move(values), std::move(vectors), Normalization::degree, LaplacianKind::random_walk};
}

inline SpectralEmbedding smallest_eigenpairs(const Laplacian& lap, Index k) {
  return lap.kind() == LaplacianKind::unnormalized ? smallest_eigenpairs_unnormalized(lap, k)
                                                   : smallest_eigenpairs_random_walk(lap, k);
}

}  // namespace gpod

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gpod/pod.hpp"
#include "test_support.hpp"

namespace gpod {
namespace {

// Row i in cluster labels[i], shuffled order, every cluster nonempty.
DiscreteAssignment planted(Index n, Index k, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i < k ? i : static_cast<Index>(rng.index(static_cast<std::uint64_t>(k))));
  return DiscreteAssignment::from_labels(labels, k);
}

TEST(NormalizeRows, Examples) {
  Matrix m(3, 2);
  m << 3.0, 4.0, 0.0, 0.0, -1.0, 1.0;
  const RowNormalization r = normalize_rows(m);
  EXPECT_NEAR(r.rows(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(r.rows(0, 1), 0.8, 1e-15);
  EXPECT_EQ(r.rows(1, 0), 0.0);
  EXPECT_EQ(r.rows(1, 1), 0.0);
  EXPECT_EQ(r.zero_rows, 1);
}

TEST(NormalizeRows, NormsAreZeroOrOne) {
  Matrix m = testing::random_points(50, 4, 3, 10.0).array() - 5.0;
  m.row(7).setZero();
  const RowNormalization r = normalize_rows(m);
  for (Index i = 0; i < 50; ++i) {
    const double norm = r.rows.row(i).norm();
    EXPECT_TRUE(std::abs(norm) <= 1e-12 || std::abs(norm - 1.0) <= 1e-12);
  }
}

TEST(InitRotation, BinaryInputGivesPermutation) {
  const DiscreteAssignment b = planted(30, 4, 2);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Rotation r = init_rotation(b.matrix, seed);
    for (Index i = 0; i < 4; ++i)
      for (Index j = 0; j < 4; ++j) EXPECT_TRUE(r.matrix(i, j) == 0.0 || r.matrix(i, j) == 1.0);
    EXPECT_EQ(r.matrix.colwise().sum(), Eigen::RowVectorXd::Ones(4));
    EXPECT_EQ(r.matrix.rowwise().sum(), Vector::Ones(4));
  }
}

TEST(InitRotation, SingleColumnIsSignOfRow) {
  Matrix u(3, 1);
  u << -1.0, -1.0, -1.0;
  EXPECT_EQ(init_rotation(u, 0).matrix(0, 0), -1.0);
  u << 1.0, 1.0, 1.0;
  EXPECT_EQ(init_rotation(u, 0).matrix(0, 0), 1.0);
}

TEST(InitRotation, DeterministicAndOrthonormal) {
  const Matrix u = normalize_rows(testing::random_points(40, 3, 5).array() - 0.5).rows;
  const Rotation a = init_rotation(u, 42);
  const Rotation b = init_rotation(u, 42);
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_LE((a.matrix.transpose() * a.matrix - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(InitRotation, DependentPicksAreCompleted) {
  Matrix u(4, 2);  // every row on the same line
  u << 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0;
  const Rotation r = init_rotation(u, 1);
  EXPECT_LE((r.matrix.transpose() * r.matrix - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(InitRotation, TooFewRows) {
  try {
    init_rotation(Matrix::Identity(2, 3), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::size);
  }
}

TEST(DiscretizeStep, RowArgmaxWithLowestTieBreak) {
  Matrix u(3, 2);
  u << 0.9, 0.1, 0.2, 0.8, 0.5, 0.5;
  const DiscreteAssignment a = discretize_step(u, Rotation::identity(2));
  EXPECT_EQ(a.cluster_of, (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(a.matrix.rowwise().sum(), Vector::Ones(3));
}

TEST(DiscretizeStep, BinaryInputIsFixed) {
  const DiscreteAssignment b = planted(20, 3, 9);
  EXPECT_EQ(discretize_step(b.matrix, Rotation::identity(3)).cluster_of, b.cluster_of);
}

TEST(RotationStep, AlreadyBinary) {
  // cluster sizes 5, 3, 2 keep the singular values distinct
  std::vector<int> labels{0, 0, 0, 0, 0, 1, 1, 1, 2, 2};
  const DiscreteAssignment b = DiscreteAssignment::from_labels(labels, 3);
  const RotationStep s = rotation_step(b, b.matrix);
  EXPECT_NEAR(s.phi, 10.0, 1e-12);
  EXPECT_LE((s.rotation.matrix - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(RotationStep, RecoversPlantedRotation) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Index k = 2 + static_cast<Index>(seed % 4);
    const DiscreteAssignment b = planted(60, k, seed);
    const Matrix q = testing::random_orthonormal(k, seed + 100);
    const Matrix u = b.matrix * q;
    const RotationStep s = rotation_step(b, u);
    EXPECT_LE((b.matrix - u * s.rotation.matrix).norm(), 1e-8);
    EXPECT_LE((s.rotation.matrix.transpose() * s.rotation.matrix - Matrix::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(RotationStep, PhiIsProcrustesMaximumOnGrid) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix u = normalize_rows(testing::random_points(25, 2, seed).array() - 0.5).rows;
    const DiscreteAssignment a = discretize_step(u, Rotation::identity(2));
    const Matrix cross = a.matrix.transpose() * u;
    double grid_best = -1e300;
    for (double t = 0.0; t < 2.0 * std::numbers::pi; t += 1e-3) {
      const double c = std::cos(t), s = std::sin(t);
      Matrix rot(2, 2), ref(2, 2);
      rot << c, -s, s, c;
      ref << c, s, s, -c;
      grid_best = std::max({grid_best, (cross * rot).trace(), (cross * ref).trace()});
    }
    const RotationStep step = rotation_step(a, u);
    EXPECT_GE(step.phi, grid_best - 1e-12);
    EXPECT_LE(step.phi - grid_best, 1e-3);
    EXPECT_NEAR((cross * step.rotation.matrix).trace(), step.phi, 1e-12);
  }
}

TEST(Pod, BinaryInputIsFixedPoint) {
  const DiscreteAssignment b = planted(40, 3, 4);
  const PodResult r = pod(b.matrix, 7);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_TRUE(testing::same_partition(r.assignment.cluster_of, b.cluster_of));
}

TEST(Pod, RecoversPlantedPartition) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Index k = 2 + static_cast<Index>(seed % 5);
    const DiscreteAssignment b = planted(80, k, seed);
    const Matrix u = b.matrix * testing::random_orthonormal(k, 1000 + seed);
    const PodResult r = pod(u, seed);
    EXPECT_TRUE(testing::same_partition(r.assignment.cluster_of, b.cluster_of)) << "seed " << seed;
  }
}

TEST(Pod, TraceIsNonDecreasing) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix u = normalize_rows(testing::random_points(100, 4, seed).array() - 0.5).rows;
    const PodResult r = pod(u, seed);
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
      EXPECT_GE(r.objective_trace[t], r.objective_trace[t - 1] - 1e-12);
    if (r.converged) {
      const auto& tr = r.objective_trace;
      ASSERT_GE(tr.size(), 1u);
      const double prev = tr.size() >= 2 ? tr[tr.size() - 2] : 0.0;
      EXPECT_LT(std::abs(tr.back() - prev), 1e-10);
    }
  }
}

TEST(Pod, OwnOutputIsFixedPoint) {
  const Matrix u = normalize_rows(testing::random_points(60, 3, 8).array() - 0.5).rows;
  const PodResult first = pod(u, 3);
  const PodResult again = pod(first.assignment.matrix, 3);
  EXPECT_TRUE(testing::same_partition(again.assignment.cluster_of, first.assignment.cluster_of));
}

TEST(Pod, RotatingTheEmbeddingAndStartGivesSamePartition) {
  const Matrix u = normalize_rows(testing::random_points(70, 3, 12).array() - 0.5).rows;
  const Matrix q = testing::random_orthonormal(3, 77);
  const Rotation start = init_rotation(u, 5);
  const PodResult a = pod(u, start);
  const PodResult b = pod(u * q, Rotation{q.transpose() * start.matrix});
  EXPECT_TRUE(testing::same_partition(a.assignment.cluster_of, b.assignment.cluster_of));
}

TEST(Pod, IterationCapIsNotAnError) {
  const Matrix u = normalize_rows(testing::random_points(200, 5, 1).array() - 0.5).rows;
  const PodResult r = pod(u, 1, PodOptions{1e-10, 1});
  EXPECT_EQ(r.iterations, 1);
  EXPECT_FALSE(r.converged);
}

TEST(Pod, EmptyClusterIsFlagged) {
  Matrix u(4, 2);  // all rows identical -> one cluster stays empty
  u << 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0;
  const PodResult r = pod(u, 0);
  EXPECT_TRUE(r.empty_cluster);
}

}  // namespace
}  // namespace gpod

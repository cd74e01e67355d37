#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "gpod/extension.hpp"
#include "gpod/metrics.hpp"
#include "gpod/model_io.hpp"
#include "test_support.hpp"

namespace gpod {
namespace {

struct Trained {
  Matrix points;
  WeightGraph graph;
  SpectralEmbedding embedding;
};

Trained train(const Matrix& points, double sigma, LaplacianKind kind, Index k) {
  Trained t{points, build_weight_graph(points, KernelSpec::gaussian(sigma)), {}};
  t.embedding = smallest_eigenpairs(laplacian(t.graph, kind), k);
  return t;
}

Matrix two_blob_centres() {
  Matrix c(2, 2);
  c << 0.0, 0.0, 30.0, 0.0;
  return c;
}

TEST(FitExtension, TagsVariantFromEmbedding) {
  const Matrix pts = testing::random_points(20, 2, 1);
  const Trained rc = train(pts, 0.5, LaplacianKind::unnormalized, 2);
  const Trained nc = train(pts, 0.5, LaplacianKind::random_walk, 2);
  EXPECT_EQ(fit_extension(rc.embedding, pts, KernelSpec::gaussian(0.5)).variant, Variant::ratiocut);
  EXPECT_EQ(fit_extension(nc.embedding, pts, KernelSpec::gaussian(0.5)).variant, Variant::ncut);
  try {
    fit_extension(rc.embedding, pts, KernelSpec::gaussian(0.5), {Variant::ncut});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
  SpectralEmbedding mixed = rc.embedding;
  mixed.normalization = Normalization::degree;
  EXPECT_THROW(fit_extension(mixed, pts, KernelSpec::gaussian(0.5)), Error);
}

TEST(ExtendNcut, RestrictionReproducesTrainingVectors) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Matrix pts = testing::random_points(30 + 10 * static_cast<Index>(seed), 2, seed);
    const Trained t = train(pts, 0.3, LaplacianKind::random_walk, 4);
    // The identity being relied on: D^{-1} W u = (1 - lambda) u.
    const Matrix w = t.graph.weights();
    const Matrix lhs = t.graph.degrees.cwiseInverse().asDiagonal() * w * t.embedding.vectors;
    const Matrix rhs = t.embedding.vectors * (Vector::Ones(4) - t.embedding.eigenvalues).asDiagonal();
    ASSERT_LE((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);

    const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.3));
    const Extension ext = extend_ncut(model, pts);
    EXPECT_TRUE(ext.degenerate_columns.empty());
    EXPECT_LE((ext.values - t.embedding.vectors).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(ExtendRatiocut, TrainingPointIdentity) {
  // At a training point x_i, with sum_j u_k[j] = 0 (columns orthogonal to the
  // constant vector), the estimate reduces to -(d_i - lambda_k) u_k[i] times
  // the column scale.
  const Matrix pts = testing::random_points(40, 2, 3);
  const Trained t = train(pts, 0.4, LaplacianKind::unnormalized, 3);
  ExtensionOptions opts;
  opts.scaling = ScalingMode::inv_lambda;
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.4), opts);
  const Extension ext = extend_ratiocut(model, pts);
  ASSERT_EQ(ext.degenerate_columns, (std::vector<Index>{0}));
  for (Index k = 1; k < 3; ++k) {
    const double lambda = t.embedding.eigenvalues(k);
    for (Index i = 0; i < 40; ++i) {
      const double expected = -(t.graph.degrees(i) - lambda) * t.embedding.vectors(i, k) / lambda;
      EXPECT_NEAR(ext.values(i, k), expected, 1e-9 * (1.0 + std::abs(expected)));
    }
  }
}

TEST(ExtendRatiocut, ScalingModesDifferBySqrtLambda) {
  const Matrix pts = testing::random_points(30, 2, 4);
  const Trained t = train(pts, 0.4, LaplacianKind::unnormalized, 3);
  const Matrix fresh = testing::random_points(7, 2, 99);
  ExtensionOptions literal, composed;
  composed.scaling = ScalingMode::inv_lambda;
  const Extension a = extend_ratiocut(fit_extension(t.embedding, pts, KernelSpec::gaussian(0.4), literal), fresh);
  const Extension b = extend_ratiocut(fit_extension(t.embedding, pts, KernelSpec::gaussian(0.4), composed), fresh);
  for (Index k = 1; k < 3; ++k)
    EXPECT_LE((a.values.col(k) / std::sqrt(t.embedding.eigenvalues(k)) - b.values.col(k)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ExtendRatiocut, DuplicatePointMatchesTrainingRow) {
  const Matrix pts = testing::random_points(25, 3, 6);
  const Trained t = train(pts, 0.5, LaplacianKind::unnormalized, 3);
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.5));
  const Extension all = extend_ratiocut(model, pts);
  Matrix single(2, 3);
  single.row(0) = pts.row(11);
  single.row(1) = pts.row(4);
  const Extension dup = extend_ratiocut(model, single);
  for (Index k = 1; k < 3; ++k) {
    EXPECT_EQ(dup.values(0, k), all.values(11, k));
    EXPECT_EQ(dup.values(1, k), all.values(4, k));
  }
}

TEST(ExtendRatiocut, ZeroEigenvalueBecomesConstantColumn) {
  const Matrix pts = testing::random_points(25, 2, 2);
  const Trained t = train(pts, 0.5, LaplacianKind::unnormalized, 2);
  ASSERT_LT(t.embedding.eigenvalues(0), 1e-8);
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.5));
  const Extension ext = extend_ratiocut(model, testing::random_points(9, 2, 50));
  EXPECT_EQ(ext.degenerate_columns, (std::vector<Index>{0}));
  for (Index i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(ext.values(i, 0), 1.0 / 3.0);
}

TEST(ExtendNcut, MirrorSymmetry) {
  Matrix centres(1, 2);
  centres << 3.0, 0.0;
  const auto [left_blob, unused] = testing::blobs(centres, 20, 0.5, 8);
  Matrix pts(40, 2);
  pts.topRows(20) = left_blob;
  pts.bottomRows(20) = -left_blob;
  const Trained t = train(pts, 1.0, LaplacianKind::random_walk, 2);
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(1.0));
  Matrix fresh(3, 2);
  fresh << 0.0, 0.0, 1.3, 0.4, -1.3, -0.4;
  const Extension ext = extend_ncut(model, fresh);
  EXPECT_NEAR(std::abs(ext.values(1, 1)), std::abs(ext.values(2, 1)), 1e-10);
  EXPECT_NEAR(ext.values(1, 1), -ext.values(2, 1), 1e-10);
  EXPECT_NEAR(ext.values(0, 1), 0.0, 1e-10);
}

TEST(ExtendNcut, UnitEigenvalueBecomesConstantColumn) {
  const Matrix pts = testing::random_points(10, 2, 5);
  const Trained t = train(pts, 0.5, LaplacianKind::random_walk, 2);
  ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.5));
  model.eigenvalues(1) = 1.0 - 1e-12;
  const Extension ext = extend_ncut(model, testing::random_points(4, 2, 6));
  EXPECT_EQ(ext.degenerate_columns, (std::vector<Index>{1}));
  for (Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(ext.values(i, 1), 0.5);
}

TEST(Extension, FarPointsStayFinite) {
  const Matrix pts = testing::random_points(30, 2, 7);
  const double sigma = 0.2;
  Matrix far(4, 2);
  far << 100 * sigma, 0.0, 0.0, -100 * sigma, 60 * sigma, 80 * sigma, 1.0 + 100 * sigma, 1.0;
  for (auto kind : {LaplacianKind::unnormalized, LaplacianKind::random_walk}) {
    const Trained t = train(pts, sigma, kind, 3);
    const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(sigma));
    const Extension ext = extend(model, far);
    EXPECT_TRUE(ext.values.allFinite());
    EXPECT_TRUE(gpod(model, far, 1).pod.assignment.matrix.allFinite());
  }
}

TEST(Extension, BatchesAreIndependent) {
  const Matrix pts = testing::random_points(30, 2, 17);
  const Trained t = train(pts, 0.3, LaplacianKind::random_walk, 3);
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.3));
  const Matrix fresh = testing::random_points(10, 2, 18);
  const Extension whole = extend(model, fresh);
  const Extension head = extend(model, fresh.topRows(4));
  const Extension tail = extend(model, fresh.bottomRows(6));
  EXPECT_EQ(whole.values.topRows(4), head.values);
  EXPECT_EQ(whole.values.bottomRows(6), tail.values);
}

TEST(Extension, DimensionMismatchNamesBoth) {
  const Matrix pts = testing::random_points(10, 2, 1);
  const Trained t = train(pts, 0.5, LaplacianKind::random_walk, 2);
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.5));
  try {
    extend(model, testing::random_points(3, 3, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::input);
    EXPECT_NE(std::string(e.what()).find("dimension 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("dimension 2"), std::string::npos);
  }
  Matrix bad(1, 2);
  bad << std::nan(""), 0.0;
  EXPECT_THROW(extend(model, bad), Error);
}

TEST(Gpod, SeparatedBlobsOutOfSample) {
  const auto [train_pts, train_labels] = testing::blobs(two_blob_centres(), 100, 1.0, 1);
  const auto [test_pts, test_labels] = testing::blobs(two_blob_centres(), 25, 1.0, 2);
  // inter-blob distance 30 >= 20 sigma with sigma = 1.5
  const Trained t = train(train_pts, 1.5, LaplacianKind::random_walk, 2);
  const ExtensionModel model = fit_extension(t.embedding, train_pts, KernelSpec::gaussian(1.5));
  const GpodResult g = gpod(model, test_pts, 3);
  EXPECT_EQ(accuracy(g.pod.assignment.cluster_of, test_labels), 1.0);
}

// At 20 sigma separation lambda_2 underflows to ~0, so RatioCut's second column
// is degenerate and carries no cluster information. Blobs close enough for
// lambda_2 to clear the threshold are separated exactly.
TEST(Gpod, RatioCutBlobsOutOfSample) {
  const Matrix far = two_blob_centres();
  const Trained disconnected = train(testing::blobs(far, 100, 1.0, 1).first, 1.5, LaplacianKind::unnormalized, 2);
  EXPECT_LT(disconnected.embedding.eigenvalues(1), 1e-8);

  Matrix near(2, 2);
  near << 0.0, 0.0, 10.0, 0.0;
  const auto [train_pts, train_labels] = testing::blobs(near, 100, 1.0, 1);
  const auto [test_pts, test_labels] = testing::blobs(near, 25, 1.0, 2);
  const Trained t = train(train_pts, 1.5, LaplacianKind::unnormalized, 2);
  ASSERT_GT(t.embedding.eigenvalues(1), 1e-8);
  for (auto scaling : {ScalingMode::inv_sqrt_lambda, ScalingMode::inv_lambda}) {
    const ExtensionModel model = fit_extension(t.embedding, train_pts, KernelSpec::gaussian(1.5), {std::nullopt, scaling});
    const GpodResult g = gpod(model, test_pts, 3);
    EXPECT_EQ(g.extension.degenerate_columns, (std::vector<Index>{0}));
    EXPECT_EQ(accuracy(g.pod.assignment.cluster_of, test_labels), 1.0) << to_string(scaling);
  }
}

TEST(Gpod, OnePointPerClusterGetsDistinctClusters) {
  Matrix centres(3, 2);
  centres << 0.0, 0.0, 40.0, 0.0, 0.0, 40.0;
  const auto [pts, labels] = testing::blobs(centres, 40, 1.0, 4);
  const Trained t = train(pts, 1.5, LaplacianKind::random_walk, 3);
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(1.5));
  const GpodResult g = gpod(model, centres, 9);
  auto c = g.pod.assignment.cluster_of;
  std::sort(c.begin(), c.end());
  EXPECT_EQ(c, (std::vector<int>{0, 1, 2}));
}

TEST(Gpod, NcutOnTrainingPointsMatchesDirectPod) {
  const Matrix pts = testing::random_points(60, 2, 31);
  const Trained t = train(pts, 0.25, LaplacianKind::random_walk, 3);
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.25));
  const GpodResult g = gpod(model, pts, 5);
  const PodResult direct = pod(normalize_rows(t.embedding.vectors).rows, 5);
  EXPECT_TRUE(testing::same_partition(g.pod.assignment.cluster_of, direct.assignment.cluster_of));
}

TEST(Gpod, NeverCallsTheEigensolver) {
  const Matrix pts = testing::random_points(50, 2, 13);
  const Matrix fresh = testing::random_points(20, 2, 14);
  for (auto kind : {LaplacianKind::unnormalized, LaplacianKind::random_walk}) {
    const Trained t = train(pts, 0.3, kind, 3);
    const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.3));
    ScopedEigensolveHook poison([](Index) { throw std::logic_error("eigensolver invoked during extension"); });
    EXPECT_NO_THROW(gpod(model, fresh, 1));
    // positive control: the poisoned hook does fire on a real solve
    EXPECT_THROW(smallest_eigenpairs(laplacian(t.graph, kind), 2), std::logic_error);
  }
}

TEST(ModelIo, RoundTripIsExact) {
  const Matrix pts = testing::random_points(15, 3, 44);
  const Trained t = train(pts, 0.37, LaplacianKind::unnormalized, 3);
  ExtensionOptions opts;
  opts.scaling = ScalingMode::inv_lambda;
  opts.degenerate_threshold = 1e-9;
  const ExtensionModel model = fit_extension(t.embedding, pts, KernelSpec::gaussian(0.37), opts);
  const ExtensionModel back = model_from_json(nlohmann::json::parse(model_to_json(model).dump()));
  EXPECT_EQ(back.variant, model.variant);
  EXPECT_EQ(back.scaling, model.scaling);
  EXPECT_EQ(back.kernel.sigma, model.kernel.sigma);
  EXPECT_EQ(back.degenerate_threshold, model.degenerate_threshold);
  EXPECT_EQ(back.train_points, model.train_points);
  EXPECT_EQ(back.train_vectors, model.train_vectors);
  EXPECT_EQ(back.eigenvalues, model.eigenvalues);
}

TEST(ModelIo, RejectsForeignDocuments) {
  EXPECT_THROW(model_from_json(nlohmann::json{{"format", "other"}}), Error);
  nlohmann::json doc = model_to_json(fit_extension(train(testing::random_points(6, 2, 1), 0.5, LaplacianKind::random_walk, 2).embedding,
                                                   testing::random_points(6, 2, 1), KernelSpec::gaussian(0.5)));
  doc["version"] = 99;
  EXPECT_THROW(model_from_json(doc), Error);
}

}  // namespace
}  // namespace gpod

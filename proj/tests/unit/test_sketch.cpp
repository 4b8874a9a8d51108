#include "sketchreg/error.hpp"
#include "sketchreg/sketch.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace sketchreg;

namespace {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

}  // namespace

TEST(MakeSketch, SizeValidation) {
  for (SketchKind kind : {SketchKind::gaussian, SketchKind::countsketch, SketchKind::srht}) {
    EXPECT_THROW(SketchOperator::make(kind, 0, 10, 1), Error);
    EXPECT_THROW(SketchOperator::make(kind, 10, 10, 1), Error);
    EXPECT_THROW(SketchOperator::make(kind, 11, 10, 1), Error);
    EXPECT_NO_THROW(SketchOperator::make(kind, 3, 10, 1));
  }
  try {
    SketchOperator::make(SketchKind::countsketch, 0, 4, 1);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invalid_size);
  }
}

TEST(MakeSketch, CountSketchTablesAreDeterministic) {
  const auto s1 = SketchOperator::make(SketchKind::countsketch, 2, 4, 7);
  const auto s2 = SketchOperator::make(SketchKind::countsketch, 2, 4, 7);
  EXPECT_EQ(s1.buckets(), s2.buckets());
  EXPECT_EQ(s1.signs(), s2.signs());
}

TEST(MakeSketch, SrhtAtLargeScaleIsLegal) {
  const auto sk = SketchOperator::make(SketchKind::srht, 1000, 100000, 3);
  EXPECT_EQ(sk.padded_rows(), 131072u);
  EXPECT_EQ(sk.sampled_rows().size(), 1000u);
}

TEST(MakeSketch, GaussianEntriesHaveVarianceOneOverS) {
  // S e_i is column i of S; 1000 columns x 100 rows = 1e5 samples
  const std::size_t s = 100;
  const std::size_t n = 1000;
  const auto sk = SketchOperator::make(SketchKind::gaussian, s, n, 11);
  const Matrix sm = sk.apply(Matrix(Matrix::Identity(n, n)));
  const double mean = sm.mean();
  const double var = (sm.array() - mean).square().mean();
  EXPECT_LE(std::abs(mean), 0.01);
  EXPECT_NEAR(var, 1.0 / s, 0.1 / s);
}

TEST(ApplySketch, CountSketchBucketSums) {
  const auto sk = SketchOperator::countsketch_from_tables(2, {0, 1, 0, 1}, {1, -1, 1, 1});
  Vector x(4);
  x << 1, 2, 3, 4;
  const Vector y = sk.apply(x);
  EXPECT_DOUBLE_EQ(y(0), 4.0);
  EXPECT_DOUBLE_EQ(y(1), 2.0);
}

TEST(ApplySketch, CountSketchHasOneNonzeroPerInputRow) {
  const auto sk = SketchOperator::make(SketchKind::countsketch, 5, 40, 2);
  for (std::size_t i = 0; i < 40; ++i) {
    Vector e = Vector::Zero(40);
    e(static_cast<Eigen::Index>(i)) = 1.0;
    const Vector y = sk.apply(e);
    EXPECT_EQ((y.array() != 0.0).count(), 1);
    EXPECT_EQ(y(sk.buckets()[i]), static_cast<double>(sk.signs()[i]));
  }
}

TEST(ApplySketch, GaussianOfZeroIsZero) {
  const auto sk = SketchOperator::make(SketchKind::gaussian, 4, 20, 3);
  EXPECT_TRUE(sk.apply(Matrix(Matrix::Zero(20, 3))).isZero(0.0));
}

TEST(ApplySketch, SrhtMatchesDenseProduct) {
  const std::size_t n = 8;
  const auto sk = SketchOperator::make(SketchKind::srht, 3, n, 21);
  const Matrix m = random_matrix(static_cast<Eigen::Index>(n), 2, 4);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(8, 8);
  for (std::size_t i = 0; i < 8; ++i) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sk.signs()[i];
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(3, 8);
  for (std::size_t k = 0; k < 3; ++k) p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(sk.sampled_rows()[k])) = 1.0;
  const Eigen::MatrixXd dense = std::sqrt(8.0 / 3.0) * p * oracle::dense_hadamard(8) * d;
  EXPECT_LE((sk.apply(m) - dense * Eigen::MatrixXd(m)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplySketch, SrhtPadsNonPowerOfTwoInputs) {
  const std::size_t n = 6;
  const auto sk = SketchOperator::make(SketchKind::srht, 4, n, 5);
  EXPECT_EQ(sk.padded_rows(), 8u);
  const Matrix m = random_matrix(6, 2, 6);
  Matrix padded = Matrix::Zero(8, 2);
  padded.topRows(6) = m;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(8, 8);
  for (std::size_t i = 0; i < 8; ++i) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sk.signs()[i];
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(4, 8);
  for (std::size_t k = 0; k < 4; ++k) p(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(sk.sampled_rows()[k])) = 1.0;
  const Eigen::MatrixXd dense = std::sqrt(8.0 / 4.0) * p * oracle::dense_hadamard(8) * d;
  EXPECT_LE((sk.apply(m) - dense * Eigen::MatrixXd(padded)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ApplySketch, RowMismatchThrows) {
  const auto sk = SketchOperator::make(SketchKind::countsketch, 3, 10, 1);
  try {
    sk.apply(Matrix(Matrix::Zero(9, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::dimension_mismatch);
  }
}

TEST(ApplySketch, BitwiseReproducible) {
  const Matrix m = random_matrix(300, 4, 8);
  for (SketchKind kind : {SketchKind::gaussian, SketchKind::countsketch, SketchKind::srht}) {
    const Matrix a = SketchOperator::make(kind, 40, 300, 99).apply(m);
    const Matrix b = SketchOperator::make(kind, 40, 300, 99).apply(m);
    EXPECT_TRUE((a.array() == b.array()).all()) << to_string(kind);
  }
}

TEST(EmbeddingDistortion, IdentityIsExact) {
  const Matrix a = random_matrix(50, 3, 1);
  const auto sk = SketchOperator::make(SketchKind::identity, 50, 50, 0);
  EXPECT_EQ(embedding_distortion(sk, a, 20), 0.0);
}

TEST(EmbeddingDistortion, RandomSketchesEmbedWell) {
  const Matrix a = random_matrix(2048, 10, 12);
  const auto g = SketchOperator::make(SketchKind::gaussian, 200, 2048, 4);
  EXPECT_LE(embedding_distortion(g, a, 100, 1), 0.5);
  const auto c = SketchOperator::make(SketchKind::countsketch, 100, 2048, 4);
  EXPECT_LE(embedding_distortion(c, a, 100, 1), 0.5);
}

TEST(SketchDefaults, SizesPerKind) {
  EXPECT_EQ(default_sketch_size(SketchKind::gaussian, 20), 80u);
  EXPECT_EQ(default_sketch_size(SketchKind::srht, 20), 87u);  // ceil(20 log2 20) = 87 > 80
  EXPECT_EQ(default_sketch_size(SketchKind::srht, 4), 16u);
  EXPECT_EQ(default_sketch_size(SketchKind::countsketch, 20), 420u);
}

TEST(SketchKindNames, RoundTrip) {
  for (SketchKind kind : {SketchKind::gaussian, SketchKind::countsketch, SketchKind::srht, SketchKind::identity}) {
    EXPECT_EQ(parse_sketch_kind(to_string(kind)), kind);
  }
  EXPECT_THROW(parse_sketch_kind("fourier"), Error);
}

#include "sketchreg/dense_linalg.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/feasible_set.hpp"

#include "../support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace sketchreg;

namespace {

Vector random_vector(Eigen::Index n, unsigned seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Upper factor with prescribed condition number.
Matrix graded_r(Eigen::Index d, double kappa, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(3 * d, d);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> q1(g);
  Eigen::HouseholderQR<Eigen::MatrixXd> q2(Eigen::MatrixXd(g.topRows(d)));
  const Eigen::MatrixXd u = q1.householderQ() * Eigen::MatrixXd::Identity(3 * d, d);
  const Eigen::MatrixXd v = q2.householderQ();
  Vector s(d);
  for (Eigen::Index i = 0; i < d; ++i) s(i) = std::pow(kappa, -static_cast<double>(i) / static_cast<double>(d - 1));
  return qr_upper(Matrix(u * s.asDiagonal() * v.transpose()));
}

}  // namespace

TEST(ProjectEuclidean, Unconstrained) {
  const auto w = FeasibleSet::unconstrained(3);
  const Vector x = random_vector(3, 1);
  EXPECT_EQ(project_euclidean(w, x), x);
}

TEST(ProjectEuclidean, L2RadialScaling) {
  const auto w = FeasibleSet::l2_ball(2, 1.0);
  Vector x(2);
  x << 3, 4;
  const Vector p = project_euclidean(w, x);
  EXPECT_NEAR(p(0), 0.6, 1e-15);
  EXPECT_NEAR(p(1), 0.8, 1e-15);
}

TEST(ProjectEuclidean, L1SoftThreshold) {
  const auto w = FeasibleSet::l1_ball(2, 1.0);
  Vector x(2);
  x << 2, 1;
  const Vector p = project_euclidean(w, x);
  EXPECT_NEAR(p(0), 1.0, 1e-15);
  EXPECT_NEAR(p(1), 0.0, 1e-15);
  EXPECT_TRUE(p.isApprox(oracle::l1_projection_bisect(x, 1.0), 1e-12));
}

TEST(ProjectEuclidean, L1MatchesThresholdBisection) {
  for (unsigned seed = 0; seed < 50; ++seed) {
    const Vector x = random_vector(10, seed, 2.0);
    const double radius = 0.5 + seed % 5;
    const Vector p = project_l1_ball(x, radius);
    EXPECT_LE((p - oracle::l1_projection_bisect(x, radius)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE(p.lpNorm<1>(), radius + 1e-12);
  }
}

TEST(ProjectEuclidean, IdempotentAndNonexpansive) {
  for (auto w : {FeasibleSet::l2_ball(6, 1.5), FeasibleSet::l1_ball(6, 1.5)}) {
    for (unsigned seed = 0; seed < 30; ++seed) {
      const Vector x = random_vector(6, seed, 3.0);
      const Vector y = random_vector(6, 1000 + seed, 3.0);
      const Vector px = project_euclidean(w, x);
      EXPECT_TRUE(w.contains(px));
      EXPECT_LE((project_euclidean(w, px) - px).norm(), 1e-14);
      EXPECT_LE((px - project_euclidean(w, y)).norm(), (x - y).norm() + 1e-12);
    }
    const Vector inside = 0.01 * random_vector(6, 5);
    EXPECT_EQ(project_euclidean(w, inside), inside);
  }
}

TEST(FeasibleSetFactory, RejectsBadRadius) {
  EXPECT_THROW(FeasibleSet::l2_ball(3, 0.0), Error);
  EXPECT_THROW(FeasibleSet::l1_ball(3, -1.0), Error);
  EXPECT_THROW(FeasibleSet::unconstrained(3, 0.0), Error);
}

TEST(DiameterParam, Formulas) {
  EXPECT_NEAR(diameter_param(FeasibleSet::l2_ball(4, std::sqrt(2.0))), 1.0, 1e-15);
  EXPECT_NEAR(diameter_param(FeasibleSet::l1_ball(4, 2.0)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(diameter_param(FeasibleSet::unconstrained(4, 3.0)), 3.0 / std::sqrt(2.0), 1e-15);
  try {
    diameter_param(FeasibleSet::unconstrained(4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::unbounded);
  }
}

TEST(DiameterParam, L1MaxOverVertices) {
  // max ||x||^2 / 2 over the cross-polytope is attained at a vertex
  const double rho = 2.0;
  double best = 0.0;
  for (int j = 0; j < 4; ++j) {
    for (double sg : {1.0, -1.0}) {
      Vector v = Vector::Zero(4);
      v(j) = sg * rho;
      best = std::max(best, 0.5 * v.squaredNorm());
    }
  }
  EXPECT_NEAR(diameter_param(FeasibleSet::l1_ball(4, rho)), std::sqrt(best), 1e-15);
}

TEST(DiameterParamTransformed, ScalesWithR) {
  Matrix r = Matrix::Zero(2, 2);
  r << 3, 0, 0, 1;
  EXPECT_NEAR(diameter_param_transformed(FeasibleSet::l2_ball(2, 1.0), r), 3.0 / std::sqrt(2.0), 1e-14);
  r << 1, 2, 0, 2;  // column norms 1 and sqrt(8)
  EXPECT_NEAR(diameter_param_transformed(FeasibleSet::l1_ball(2, 1.0), r), std::sqrt(8.0) / std::sqrt(2.0), 1e-14);
  EXPECT_THROW(diameter_param_transformed(FeasibleSet::unconstrained(2), r), Error);
}

TEST(ProxRMetric, UnconstrainedIdentityIsGradientStep) {
  const auto w = FeasibleSet::unconstrained(3);
  const Vector x = random_vector(3, 1);
  const Vector c = random_vector(3, 2);
  EXPECT_LE((prox_r_metric(w, Matrix::Identity(3, 3), x, c, 1.0) - (x - c)).norm(), 1e-15);
}

TEST(ProxRMetric, UnconstrainedUsesInverseMetric) {
  const auto w = FeasibleSet::unconstrained(4);
  const Matrix r = graded_r(4, 1e3, 3);
  const Vector x = random_vector(4, 4);
  const Vector c = random_vector(4, 5);
  const Eigen::MatrixXd inv = oracle::explicit_inverse(r);
  const Vector expect = x - 0.3 * inv * inv.transpose() * c;
  EXPECT_LE((prox_r_metric(w, r, x, c, 0.3) - expect).norm(), 1e-9 * expect.norm());
}

TEST(ProxRMetric, IdentityMetricReducesToProjection) {
  for (auto w : {FeasibleSet::l2_ball(5, 1.0), FeasibleSet::l1_ball(5, 1.0)}) {
    for (unsigned seed = 0; seed < 20; ++seed) {
      const Vector x = random_vector(5, seed, 2.0);
      const Vector c = random_vector(5, 100 + seed);
      const Vector got = prox_r_metric(w, Matrix::Identity(5, 5), x, c, 0.7);
      EXPECT_LE((got - project_euclidean(w, x - 0.7 * c)).norm(), 1e-9);
    }
  }
}

TEST(ProxRMetric, FeasiblePointWithZeroGradientIsFixed) {
  const Matrix r = graded_r(3, 10.0, 6);
  const auto w = FeasibleSet::l2_ball(3, 5.0);
  const Vector x = random_vector(3, 7);
  EXPECT_EQ(prox_r_metric(w, r, x, Vector::Zero(3), 1.0), x);
}

TEST(ProxRMetric, L1TwoDimensionalHandCase) {
  Matrix r = Matrix::Zero(2, 2);
  r << 1, 0, 0, 2;
  const auto w = FeasibleSet::l1_ball(2, 1.0);
  Vector x(2);
  x << 2, 0;
  for (double eta : {0.1, 1.0, 10.0}) {
    const Vector got = prox_r_metric(w, r, x, Vector::Zero(2), eta);
    EXPECT_NEAR(got(0), 1.0, 1e-12);
    EXPECT_NEAR(got(1), 0.0, 1e-12);
  }
  // brute-force grid over the boundary agrees
  auto q = [&](const Vector& z) { return 0.5 * (r * (z - x)).squaredNorm(); };
  const Vector grid = oracle::grid_qp_l1_2d(q, 1.0);
  EXPECT_NEAR(grid(0), 1.0, 1e-4);
  EXPECT_NEAR(grid(1), 0.0, 1e-4);
}

TEST(ProxRMetric, L1MatchesGridOnRandom2D) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Matrix r = graded_r(2, 5.0, 40 + seed);
    const Vector x = random_vector(2, 60 + seed, 3.0);
    const auto w = FeasibleSet::l1_ball(2, 1.0);
    const Vector got = prox_r_metric(w, r, x, Vector::Zero(2), 1.0);
    auto q = [&](const Vector& z) { return 0.5 * (r * (z - x)).squaredNorm(); };
    if (x.lpNorm<1>() <= 1.0) {
      EXPECT_EQ(got, x);
      continue;
    }
    const Vector grid = oracle::grid_qp_l1_2d(q, 1.0);
    EXPECT_LE(q(got), q(grid) + 1e-9);
    EXPECT_LE((got - grid).norm(), 1e-3);
  }
}

TEST(ProxRMetric, BallsMatchFistaOnModerateConditioning) {
  for (unsigned seed = 0; seed < 6; ++seed) {
    const Matrix r = graded_r(6, 30.0, 80 + seed);
    const Vector x = random_vector(6, 90 + seed, 2.0);
    const Vector c = random_vector(6, 95 + seed);
    const double eta = 0.5;
    const Eigen::MatrixXd inv = oracle::explicit_inverse(r);
    const Vector center = x - eta * inv * inv.transpose() * c;
    for (auto w : {FeasibleSet::l2_ball(6, 0.8), FeasibleSet::l1_ball(6, 0.8)}) {
      const Vector got = prox_r_metric(w, r, x, c, eta);
      const Vector ref = oracle::fista(r, center, [&](const Vector& z) { return project_euclidean(w, z); });
      auto q = [&](const Vector& z) { return 0.5 * (r * (z - center)).squaredNorm(); };
      EXPECT_TRUE(w.contains(got));
      EXPECT_LE(q(got), q(ref) * (1.0 + 1e-9) + 1e-12) << to_string(w.kind());
      EXPECT_LE((got - ref).norm(), 1e-6) << to_string(w.kind());
    }
  }
}

TEST(ProxRMetric, StaysAccurateOnSeverelyIllConditionedR) {
  // the metric of a kappa = 1e8 problem factored exactly
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Matrix r = graded_r(12, 1e8, 200 + seed);
    const Vector x = random_vector(12, 210 + seed, 5.0);
    for (auto w : {FeasibleSet::l2_ball(12, 1.0), FeasibleSet::l1_ball(12, 1.0)}) {
      const MetricProx prox(w, r);
      const Vector got = prox(x, Vector::Zero(12), 1.0);
      EXPECT_TRUE(w.contains(got));
      EXPECT_LE(prox.kkt_residual(got, x), 1e-10);
    }
  }
}

TEST(MetricProx, KktResidualDetectsWrongAnswers) {
  const Matrix r = graded_r(4, 10.0, 300);
  const auto w = FeasibleSet::l2_ball(4, 1.0);
  const MetricProx prox(w, r);
  const Vector center = random_vector(4, 301, 4.0);
  const Vector good = prox(center, Vector::Zero(4), 1.0);
  EXPECT_LE(prox.kkt_residual(good, center), 1e-10);
  const Vector bad = project_euclidean(w, center);  // Euclidean, not R-metric
  EXPECT_GT(prox.kkt_residual(bad, center), 1e-4);
}

TEST(MetricProx, RejectsShapeAndStepErrors) {
  const auto w = FeasibleSet::l2_ball(3, 1.0);
  EXPECT_THROW(MetricProx(w, Matrix::Identity(2, 2)), Error);
  Matrix singular = Matrix::Identity(3, 3);
  singular(2, 2) = 0.0;
  EXPECT_THROW(MetricProx(w, singular), Error);
  const MetricProx prox(w, Matrix::Identity(3, 3));
  EXPECT_THROW(prox(Vector::Zero(3), Vector::Zero(3), 0.0), Error);
  EXPECT_THROW(prox(Vector::Zero(2), Vector::Zero(3), 1.0), Error);
}

TEST(ConstraintKindNames, RoundTrip) {
  for (auto k : {ConstraintKind::none, ConstraintKind::l1, ConstraintKind::l2}) {
    EXPECT_EQ(parse_constraint_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_constraint_kind("box"), Error);
}

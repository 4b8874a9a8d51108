#include "sketchreg/bench.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/random.hpp"

#include <fmt/format.h>

#include <cmath>

namespace sketchreg {

namespace {

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  // fill row by row so the draw order does not depend on storage order
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

Eigen::MatrixXd orthonormal_columns(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian(rng, rows, cols));
  return qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols);
}

}  // namespace

SyntheticData gen_synthetic(const DatasetSpec& spec) {
  if (spec.d < 1 || spec.n <= spec.d) {
    throw Error(Errc::invalid_size, fmt::format("need n > d >= 1, got n={} d={}", spec.n, spec.d));
  }
  if (!(spec.target_kappa >= 1.0) || !std::isfinite(spec.target_kappa)) {
    throw Error(Errc::invalid_argument, fmt::format("kappa must be >= 1, got {}", spec.target_kappa));
  }
  if (!(spec.noise_std >= 0.0)) throw Error(Errc::invalid_argument, "noise std must be nonnegative");

  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto d = static_cast<Eigen::Index>(spec.d);
  Rng rng(spec.seed);

  const double half = 0.5 * std::log(spec.target_kappa);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Vector sigma(d);
  for (Eigen::Index i = 0; i < d; ++i) sigma(i) = std::exp(half * unit(rng));
  sigma(0) = std::exp(half);
  if (d > 1) sigma(d - 1) = std::exp(-half);

  const Eigen::MatrixXd q1 = orthonormal_columns(rng, n, d);
  const Eigen::MatrixXd q2 = orthonormal_columns(rng, d, d);

  SyntheticData out;
  out.a = q1 * sigma.asDiagonal() * q2.transpose();
  std::normal_distribution<double> normal(0.0, 1.0);
  out.x_planted.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) out.x_planted(j) = normal(rng);
  out.b = out.a * out.x_planted;
  for (Eigen::Index i = 0; i < n; ++i) out.b(i) += spec.noise_std * normal(rng);
  return out;
}

}  // namespace sketchreg

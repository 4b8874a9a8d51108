#include "sketchreg/sketch.hpp"

#include "sketchreg/error.hpp"
#include "sketchreg/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sketchreg {

std::string_view to_string(SketchKind kind) {
  switch (kind) {
    case SketchKind::gaussian: return "gaussian";
    case SketchKind::countsketch: return "countsketch";
    case SketchKind::srht: return "srht";
    case SketchKind::identity: return "identity";
  }
  return "unknown";
}

SketchKind parse_sketch_kind(std::string_view name) {
  if (name == "gaussian") return SketchKind::gaussian;
  if (name == "countsketch") return SketchKind::countsketch;
  if (name == "srht") return SketchKind::srht;
  if (name == "identity") return SketchKind::identity;
  throw Error(Errc::invalid_argument, fmt::format("unknown sketch kind '{}'", name));
}

std::size_t default_sketch_size(SketchKind kind, std::size_t d) {
  switch (kind) {
    case SketchKind::gaussian:
      return 4 * d;
    case SketchKind::srht: {
      const auto dlog = static_cast<std::size_t>(
          std::ceil(static_cast<double>(d) * std::log2(static_cast<double>(std::max<std::size_t>(d, 1)))));
      return std::max(4 * d, dlog);
    }
    case SketchKind::countsketch:
      return d * d + d;
    case SketchKind::identity:
      return 0;
  }
  return 0;
}

SketchOperator SketchOperator::make(SketchKind kind, std::size_t s, std::size_t n, std::uint64_t seed) {
  if (kind == SketchKind::identity) {
    if (s != n || n == 0) {
      throw Error(Errc::invalid_size, fmt::format("identity sketch needs s == n, got s={} n={}", s, n));
    }
  } else if (s == 0 || s >= n) {
    throw Error(Errc::invalid_size, fmt::format("sketch size must satisfy 0 < s < n, got s={} n={}", s, n));
  }

  SketchOperator op;
  op.kind_ = kind;
  op.s_ = s;
  op.n_ = n;
  op.seed_ = seed;
  Rng rng(seed);

  switch (kind) {
    case SketchKind::gaussian:
    case SketchKind::identity:
      break;
    case SketchKind::countsketch: {
      std::uniform_int_distribution<std::uint32_t> bucket(0, static_cast<std::uint32_t>(s - 1));
      std::bernoulli_distribution coin(0.5);
      op.buckets_.resize(n);
      op.signs_.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        op.buckets_[i] = bucket(rng);
        op.signs_[i] = coin(rng) ? 1 : -1;
      }
      break;
    }
    case SketchKind::srht: {
      op.n_pad_ = next_power_of_two(n);
      std::bernoulli_distribution coin(0.5);
      op.signs_.resize(op.n_pad_);
      for (auto& sg : op.signs_) sg = coin(rng) ? 1 : -1;
      // partial Fisher-Yates: first s entries of a random permutation
      std::vector<std::size_t> perm(op.n_pad_);
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      for (std::size_t k = 0; k < s; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, op.n_pad_ - 1);
        std::swap(perm[k], perm[pick(rng)]);
      }
      op.sampled_rows_.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(s));
      std::sort(op.sampled_rows_.begin(), op.sampled_rows_.end());
      break;
    }
  }
  return op;
}

SketchOperator SketchOperator::countsketch_from_tables(std::size_t s, std::vector<std::uint32_t> buckets,
                                                       std::vector<std::int8_t> signs) {
  if (buckets.size() != signs.size()) {
    throw Error(Errc::dimension_mismatch, "bucket and sign tables differ in length");
  }
  if (s == 0 || s >= buckets.size()) {
    throw Error(Errc::invalid_size,
                fmt::format("sketch size must satisfy 0 < s < n, got s={} n={}", s, buckets.size()));
  }
  for (std::size_t i = 0; i < buckets.size(); ++i) {
    if (buckets[i] >= s || (signs[i] != 1 && signs[i] != -1)) {
      throw Error(Errc::invalid_argument, fmt::format("bad countsketch table entry at row {}", i));
    }
  }
  SketchOperator op;
  op.kind_ = SketchKind::countsketch;
  op.s_ = s;
  op.n_ = buckets.size();
  op.buckets_ = std::move(buckets);
  op.signs_ = std::move(signs);
  return op;
}

Matrix SketchOperator::apply(const Matrix& m) const {
  if (static_cast<std::size_t>(m.rows()) != n_) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("sketch expects {} input rows, got {}", n_, m.rows()));
  }
  switch (kind_) {
    case SketchKind::gaussian: return apply_gaussian(m);
    case SketchKind::countsketch: return apply_countsketch(m);
    case SketchKind::srht: return apply_srht(m);
    case SketchKind::identity: return m;
  }
  return m;
}

Vector SketchOperator::apply(const Vector& v) const {
  Matrix col = v;
  return apply(col).col(0);
}

Matrix SketchOperator::apply_gaussian(const Matrix& m) const {
  Rng rng(seed_);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(s_));
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(s_), m.cols());
  Vector column(static_cast<Eigen::Index>(s_));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index k = 0; k < column.size(); ++k) column(k) = scale * normal(rng);
    out.noalias() += column * m.row(i);
  }
  return out;
}

Matrix SketchOperator::apply_countsketch(const Matrix& m) const {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(s_), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const auto bucket = static_cast<Eigen::Index>(buckets_[static_cast<std::size_t>(i)]);
    if (signs_[static_cast<std::size_t>(i)] > 0) {
      out.row(bucket) += m.row(i);
    } else {
      out.row(bucket) -= m.row(i);
    }
  }
  return out;
}

Matrix SketchOperator::apply_srht(const Matrix& m) const {
  Matrix padded = Matrix::Zero(static_cast<Eigen::Index>(n_pad_), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    padded.row(i) = static_cast<double>(signs_[static_cast<std::size_t>(i)]) * m.row(i);
  }
  fwht_rows_inplace(padded);
  const double scale = std::sqrt(static_cast<double>(n_pad_) / static_cast<double>(s_));
  Matrix out(static_cast<Eigen::Index>(s_), m.cols());
  for (std::size_t k = 0; k < s_; ++k) {
    out.row(static_cast<Eigen::Index>(k)) = scale * padded.row(static_cast<Eigen::Index>(sampled_rows_[k]));
  }
  return out;
}

double embedding_distortion(const SketchOperator& sk, const Matrix& a, std::size_t trials,
                            std::uint64_t seed) {
  const Matrix sa = sk.apply(a);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector x(a.cols());
  double worst = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = normal(rng);
    x.normalize();
    const double ax = (a * x).norm();
    if (ax == 0.0) continue;
    worst = std::max(worst, std::abs((sa * x).norm() / ax - 1.0));
  }
  return worst;
}

}  // namespace sketchreg

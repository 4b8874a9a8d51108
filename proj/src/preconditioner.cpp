#include "sketchreg/preconditioner.hpp"

#include "sketchreg/error.hpp"
#include "sketchreg/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sketchreg {

Matrix build_r(const Matrix& a, const SketchOperator& sk) {
  if (sk.cols() != static_cast<std::size_t>(a.rows())) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("sketch has {} columns, A has {} rows", sk.cols(), a.rows()));
  }
  return qr_upper(sk.apply(a));
}

HadamardTransformed build_hd_with_signs(const Matrix& a, const Vector& b, std::vector<std::int8_t> signs) {
  if (a.rows() != b.size()) {
    throw Error(Errc::dimension_mismatch, fmt::format("A has {} rows, b has {}", a.rows(), b.size()));
  }
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const std::size_t n_pad = next_power_of_two(n);
  if (signs.size() != n_pad) {
    throw Error(Errc::dimension_mismatch, fmt::format("need {} signs, got {}", n_pad, signs.size()));
  }
  const Eigen::Index d = a.cols();
  // Transform [A b] in one pass; the last column becomes HDb.
  Matrix aug = Matrix::Zero(static_cast<Eigen::Index>(n_pad), d + 1);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double sg = signs[static_cast<std::size_t>(i)];
    aug.row(i).head(d) = sg * a.row(i);
    aug(i, d) = sg * b(i);
  }
  fwht_rows_inplace(aug);

  HadamardTransformed out;
  out.signs = std::move(signs);
  out.n_pad = n_pad;
  out.hda = aug.leftCols(d);
  out.hdb = aug.col(d);
  return out;
}

HadamardTransformed build_hd(const Matrix& a, const Vector& b, std::uint64_t seed) {
  const std::size_t n_pad = next_power_of_two(static_cast<std::size_t>(a.rows()));
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::int8_t> signs(n_pad);
  for (auto& sg : signs) sg = coin(rng) ? 1 : -1;
  return build_hd_with_signs(a, b, std::move(signs));
}

std::size_t resolve_sketch_size(SketchKind kind, std::size_t requested, std::size_t d, std::size_t n) {
  if (kind == SketchKind::identity) return n;
  if (requested != 0) return requested;
  return std::min(default_sketch_size(kind, d), n - 1);
}

namespace {

struct SketchedFactor {
  Matrix r;
  Vector y;
};

SketchedFactor sketch_and_factor(const Matrix& a, const Vector& b, SketchKind kind, std::size_t s,
                                 std::uint64_t seed) {
  if (s < static_cast<std::size_t>(a.cols())) {
    throw Error(Errc::rank_deficient, fmt::format("{} sketch rows cannot keep rank {}", s, a.cols()));
  }
  const auto sk = SketchOperator::make(kind, s, static_cast<std::size_t>(a.rows()), seed);
  Matrix aug(a.rows(), a.cols() + 1);
  aug.leftCols(a.cols()) = a;
  aug.col(a.cols()) = b;
  const Matrix sketched = sk.apply(aug);
  const Matrix sa = sketched.leftCols(a.cols());
  QRFactors qr = qr_thin(sa);
  SketchedFactor out;
  out.y = qr.q.transpose() * sketched.col(a.cols());
  out.r = std::move(qr.r);
  return out;
}

}  // namespace

Preconditioner build_preconditioner(const Matrix& a, const Vector& b, const PreconditionerOptions& opts) {
  if (a.rows() != b.size()) {
    throw Error(Errc::dimension_mismatch, fmt::format("A has {} rows, b has {}", a.rows(), b.size()));
  }
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const std::size_t d = static_cast<std::size_t>(a.cols());

  Preconditioner pre;
  pre.sketch_kind = opts.sketch;
  pre.sketch_size = resolve_sketch_size(opts.sketch, opts.sketch_size, d, n);
  pre.sketch_seed = derive_seed(opts.seed, SeedStream::sketch);

  SketchedFactor factor;
  try {
    factor = sketch_and_factor(a, b, opts.sketch, pre.sketch_size, pre.sketch_seed);
  } catch (const Error& e) {
    if (e.code() != Errc::rank_deficient || opts.sketch == SketchKind::identity) throw;
    // one retry: doubled size, fresh seed
    pre.sketch_size = std::min(2 * pre.sketch_size, n - 1);
    pre.sketch_seed = derive_seed(opts.seed, SeedStream::retry);
    factor = sketch_and_factor(a, b, opts.sketch, pre.sketch_size, pre.sketch_seed);
  }
  pre.r_factor = std::move(factor.r);
  pre.sketched_solution = std::move(factor.y);

  if (opts.with_hadamard) {
    pre.hd = build_hd(a, b, derive_seed(opts.seed, SeedStream::hadamard_signs));
  }
  pre.build_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return pre;
}

RowNormSpread row_norm_spread(std::span<const double> hdu_row_norms, double c) {
  RowNormSpread out;
  double frob2 = 0.0;
  for (double v : hdu_row_norms) {
    out.max_norm = std::max(out.max_norm, v);
    frob2 += v * v;
  }
  const double n = static_cast<double>(hdu_row_norms.size());
  if (n == 0.0) return out;
  out.bound = (1.0 + std::sqrt(8.0 * std::log(c * n))) * std::sqrt(frob2) / std::sqrt(n);
  return out;
}

}  // namespace sketchreg

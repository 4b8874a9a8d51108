#pragma once

#include "sketchreg/dense_linalg.hpp"
#include "sketchreg/sketch.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace sketchreg {

/// Randomized Hadamard transform of a zero-padded regression problem.
struct HadamardTransformed {
  std::vector<std::int8_t> signs;  // diagonal D, length n_pad
  std::size_t n_pad = 0;           // smallest power of two >= n
  Matrix hda;                      // n_pad x d, H D [A; 0]
  Vector hdb;                      // n_pad,     H D [b; 0]
};

/// Everything the solvers need from the two preconditioning steps.
struct Preconditioner {
  Matrix r_factor;            // d x d upper triangular; U = A R^{-1} is well conditioned
  Vector sketched_solution;   // y-space sketch-and-solve estimate Q^T S b (so x = R^{-1} y)
  HadamardTransformed hd;     // empty (n_pad == 0) when built without the transform
  SketchKind sketch_kind = SketchKind::countsketch;
  std::size_t sketch_size = 0;
  std::uint64_t sketch_seed = 0;
  double build_seconds = 0.0;
};

/// Upper factor R of qr_thin(S A). Propagates Errc::rank_deficient.
Matrix build_r(const Matrix& a, const SketchOperator& sk);

/// Pads A and b with zero rows to n_pad, flips signs by D (drawn from
/// `seed`) and applies the orthonormal Walsh-Hadamard transform.
HadamardTransformed build_hd(const Matrix& a, const Vector& b, std::uint64_t seed);

/// Same transform with a caller-chosen sign diagonal (length n_pad).
HadamardTransformed build_hd_with_signs(const Matrix& a, const Vector& b, std::vector<std::int8_t> signs);

/// The row sketch size used when `requested` is zero: the kind's default,
/// capped at n - 1 (identity always uses n).
std::size_t resolve_sketch_size(SketchKind kind, std::size_t requested, std::size_t d, std::size_t n);

struct PreconditionerOptions {
  SketchKind sketch = SketchKind::countsketch;
  std::size_t sketch_size = 0;  // 0: resolve_sketch_size default
  std::uint64_t seed = 0;       // the solver seed; streams are derived from it
  bool with_hadamard = true;
};

/// Builds R (one retry with doubled sketch size on RankDeficient) and,
/// optionally, the Hadamard-transformed problem.
Preconditioner build_preconditioner(const Matrix& a, const Vector& b, const PreconditionerOptions& opts);

struct RowNormSpread {
  double max_norm = 0.0;
  double bound = 0.0;
};

/// Observed max row norm of H D U against (1 + sqrt(8 log(c n))) alpha / sqrt(n)
/// with alpha = ||U||_F (recovered from the row norms) and n the row count.
RowNormSpread row_norm_spread(std::span<const double> hdu_row_norms, double c = 10.0);

}  // namespace sketchreg

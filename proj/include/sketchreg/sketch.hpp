#pragma once

#include "sketchreg/dense_linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace sketchreg {

enum class SketchKind {
  gaussian,
  countsketch,
  srht,
  // s = n row restriction (S = I). Degenerate, gives the exact R factor of A.
  identity,
};

std::string_view to_string(SketchKind kind);
/// Accepts "gaussian", "countsketch", "srht", "identity".
SketchKind parse_sketch_kind(std::string_view name);

/// Default row count when the user does not choose one:
/// gaussian 4d, srht max(4d, ceil(d log2 d)), countsketch d^2 + d.
std::size_t default_sketch_size(SketchKind kind, std::size_t d);

/// An oblivious subspace embedding S in R^{s x n}. Immutable once built.
///
/// - gaussian: i.i.d. N(0, 1/s) entries, regenerated from the seed on every
///   apply, one input row at a time.
/// - countsketch: row i of the input goes to bucket h(i) with sign sigma(i).
/// - srht: sqrt(n_pad / s) * P H D, where D is a random sign diagonal of
///   length n_pad, H the orthonormal Walsh-Hadamard matrix and P samples s
///   rows uniformly without replacement. Inputs are zero-padded to n_pad.
class SketchOperator {
 public:
  /// Throws Errc::invalid_size unless 0 < s < n (identity requires s == n).
  static SketchOperator make(SketchKind kind, std::size_t s, std::size_t n, std::uint64_t seed);

  /// CountSketch with explicit hash and sign tables.
  static SketchOperator countsketch_from_tables(std::size_t s, std::vector<std::uint32_t> buckets,
                                                std::vector<std::int8_t> signs);

  /// Returns S m. Throws Errc::dimension_mismatch if m.rows() != n().
  Matrix apply(const Matrix& m) const;
  Vector apply(const Vector& v) const;

  SketchKind kind() const { return kind_; }
  std::size_t rows() const { return s_; }
  std::size_t cols() const { return n_; }
  std::uint64_t seed() const { return seed_; }

  const std::vector<std::uint32_t>& buckets() const { return buckets_; }
  const std::vector<std::int8_t>& signs() const { return signs_; }
  const std::vector<std::size_t>& sampled_rows() const { return sampled_rows_; }
  std::size_t padded_rows() const { return n_pad_; }

 private:
  SketchOperator() = default;

  Matrix apply_gaussian(const Matrix& m) const;
  Matrix apply_countsketch(const Matrix& m) const;
  Matrix apply_srht(const Matrix& m) const;

  SketchKind kind_ = SketchKind::gaussian;
  std::size_t s_ = 0;
  std::size_t n_ = 0;
  std::size_t n_pad_ = 0;
  std::uint64_t seed_ = 0;
  std::vector<std::uint32_t> buckets_;      // countsketch
  std::vector<std::int8_t> signs_;          // countsketch (length n), srht (length n_pad)
  std::vector<std::size_t> sampled_rows_;   // srht, sorted
};

inline SketchOperator make_sketch(SketchKind kind, std::size_t s, std::size_t n, std::uint64_t seed) {
  return SketchOperator::make(kind, s, n, seed);
}

inline Matrix apply(const SketchOperator& sk, const Matrix& m) { return sk.apply(m); }

/// Estimates the embedding constant: max over `trials` random unit x of
/// | ||S A x|| / ||A x|| - 1 |.
double embedding_distortion(const SketchOperator& sk, const Matrix& a, std::size_t trials,
                            std::uint64_t seed = 0);

}  // namespace sketchreg

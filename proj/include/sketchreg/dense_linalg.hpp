#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>

namespace sketchreg {

/// Row-major dense matrix. Rows of A are contiguous, which is what the row
/// sampling in the stochastic solvers and the row butterflies of the
/// Hadamard transform want.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

struct QRFactors {
  Matrix q;  // s x d, orthonormal columns
  Matrix r;  // d x d, upper triangular, nonnegative diagonal
};

/// Thin Householder QR with the sign convention diag(R) >= 0.
/// Throws Errc::rank_deficient if some |R_ii| < 1e-12 * ||m||_F.
QRFactors qr_thin(const Matrix& m);

/// Upper factor only; same convention and error as qr_thin.
Matrix qr_upper(const Matrix& m);

/// Solves R z = rhs, or R^T z = rhs when `transposed`. R must be upper
/// triangular. Throws Errc::singular_factor on a zero pivot.
Vector tri_solve(const Matrix& r, const Vector& rhs, bool transposed = false);

/// Computes R^{-1} R^{-T} c with two triangular solves.
Vector solve_normal_metric(const Matrix& r, const Vector& c);

constexpr bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

constexpr std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

/// Orthonormal Walsh-Hadamard transform v <- (H_n / sqrt(n)) v, in place,
/// O(n log n). Throws Errc::not_power_of_two.
void fwht_inplace(std::span<double> v);
void fwht_inplace(Vector& v);

/// Applies the orthonormal Walsh-Hadamard transform along the row index of
/// `m`, i.e. to every column at once. m.rows() must be a power of two.
void fwht_rows_inplace(Matrix& m);

/// Singular values in decreasing order (diagnostics only).
Vector singular_values(const Matrix& m);

/// sigma_max / sigma_min. Throws Errc::rank_deficient when
/// sigma_min < 1e-14 sigma_max.
double condition_number(const Matrix& m);

/// ||Ax - b||_2^2.
double objective(const Matrix& a, const Vector& b, const Vector& x);

/// Throws Errc::invalid_argument when any entry is NaN or infinite.
void require_finite(const Matrix& m, const char* what);
void require_finite(const Vector& v, const char* what);

}  // namespace sketchreg

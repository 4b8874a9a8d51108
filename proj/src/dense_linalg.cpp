#include "sketchreg/dense_linalg.hpp"

#include "sketchreg/error.hpp"

#include <fmt/format.h>

#include <cmath>

namespace sketchreg {

namespace {

void check_rank(const Matrix& r, double frob) {
  const double tol = 1e-12 * frob;
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (!(std::abs(r(i, i)) >= tol) || frob == 0.0) {
      throw Error(Errc::rank_deficient,
                  fmt::format("|R({0},{0})| = {1:.3e} below 1e-12 * ||m||_F = {2:.3e}", i,
                              std::abs(r(i, i)), tol));
    }
  }
}

void check_tall(const Matrix& m) {
  if (m.rows() < m.cols() || m.cols() == 0) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("need n_rows >= n_cols >= 1, got {}x{}", m.rows(), m.cols()));
  }
}

}  // namespace

QRFactors qr_thin(const Matrix& m) {
  check_tall(m);
  const Eigen::Index s = m.rows();
  const Eigen::Index d = m.cols();
  Eigen::HouseholderQR<Matrix> qr(m);
  QRFactors out;
  out.r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  out.q = qr.householderQ() * Matrix::Identity(s, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (out.r(i, i) < 0.0) {
      out.r.row(i) *= -1.0;
      out.q.col(i) *= -1.0;
    }
  }
  check_rank(out.r, m.norm());
  return out;
}

Matrix qr_upper(const Matrix& m) {
  check_tall(m);
  const Eigen::Index d = m.cols();
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix r = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < d; ++i) {
    if (r(i, i) < 0.0) r.row(i) *= -1.0;
  }
  check_rank(r, m.norm());
  return r;
}

Vector tri_solve(const Matrix& r, const Vector& rhs, bool transposed) {
  if (r.rows() != r.cols() || r.rows() != rhs.size()) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("tri_solve: factor {}x{}, rhs {}", r.rows(), r.cols(), rhs.size()));
  }
  for (Eigen::Index i = 0; i < r.rows(); ++i) {
    if (r(i, i) == 0.0 || !std::isfinite(r(i, i))) {
      throw Error(Errc::singular_factor, fmt::format("zero pivot at {}", i));
    }
  }
  if (transposed) {
    return r.transpose().triangularView<Eigen::Lower>().solve(rhs);
  }
  return r.triangularView<Eigen::Upper>().solve(rhs);
}

Vector solve_normal_metric(const Matrix& r, const Vector& c) {
  return tri_solve(r, tri_solve(r, c, /*transposed=*/true));
}

void fwht_inplace(std::span<double> v) {
  const std::size_t n = v.size();
  if (!is_power_of_two(n)) {
    throw Error(Errc::not_power_of_two, fmt::format("length {} is not a power of two", n));
  }
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        const double x = v[j];
        const double y = v[j + h];
        v[j] = x + y;
        v[j + h] = x - y;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& x : v) x *= scale;
}

void fwht_inplace(Vector& v) { fwht_inplace(std::span<double>(v.data(), v.size())); }

void fwht_rows_inplace(Matrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  const auto d = static_cast<std::size_t>(m.cols());
  if (!is_power_of_two(n)) {
    throw Error(Errc::not_power_of_two, fmt::format("row count {} is not a power of two", n));
  }
  double* data = m.data();
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += 2 * h) {
      for (std::size_t j = i; j < i + h; ++j) {
        double* top = data + j * d;
        double* bot = data + (j + h) * d;
        for (std::size_t k = 0; k < d; ++k) {
          const double x = top[k];
          const double y = bot[k];
          top[k] = x + y;
          bot[k] = x - y;
        }
      }
    }
  }
  m *= 1.0 / std::sqrt(static_cast<double>(n));
}

Vector singular_values(const Matrix& m) {
  Eigen::MatrixXd col_major = m;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(col_major);
  return svd.singularValues();
}

double condition_number(const Matrix& m) {
  check_tall(m);
  const Vector sv = singular_values(m);
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin >= 1e-14 * smax) || smax == 0.0) {
    throw Error(Errc::rank_deficient,
                fmt::format("sigma_min {:.3e} < 1e-14 sigma_max {:.3e}", smin, smax));
  }
  return smax / smin;
}

double objective(const Matrix& a, const Vector& b, const Vector& x) {
  return (a * x - b).squaredNorm();
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw Error(Errc::invalid_argument, fmt::format("{} has non-finite entries", what));
}

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw Error(Errc::invalid_argument, fmt::format("{} has non-finite entries", what));
}

}  // namespace sketchreg

#pragma once

// Independent reference implementations used only by the tests. None of
// these share code with the library paths they check.

#include "sketchreg/dense_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using sketchreg::Matrix;
using sketchreg::Vector;

// Sylvester construction, scaled by 1/sqrt(n).
inline Eigen::MatrixXd dense_hadamard(std::size_t n) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Ones(1, 1);
  while (static_cast<std::size_t>(h.rows()) < n) {
    const auto m = h.rows();
    Eigen::MatrixXd next(2 * m, 2 * m);
    next << h, h, h, -h;
    h = next;
  }
  return h / std::sqrt(static_cast<double>(n));
}

inline Eigen::MatrixXd explicit_inverse(const Matrix& r) { return Eigen::MatrixXd(r).inverse(); }

// Least squares via the normal equations in long double.
inline Vector normal_equations_solve(const Matrix& a, const Vector& b) {
  using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using LVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const LMat al = a.cast<long double>();
  const LMat g = al.transpose() * al;
  const LVec rhs = al.transpose() * b.cast<long double>();
  return g.ldlt().solve(rhs).cast<double>();
}

// l1-ball projection by bisection on the soft-threshold level theta.
inline Vector l1_projection_bisect(const Vector& x, double radius) {
  if (x.lpNorm<1>() <= radius) return x;
  auto shrink = [&](double theta) {
    Vector out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) out(i) = std::copysign(std::max(std::abs(x(i)) - theta, 0.0), x(i));
    return out;
  };
  double lo = 0.0;
  double hi = x.cwiseAbs().maxCoeff();
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shrink(mid).lpNorm<1>() > radius) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return shrink(hi);
}

// FISTA on 1/2 ||R (x - center)||^2 over a set given by its Euclidean projection.
inline Vector fista(const Matrix& r, const Vector& center, const std::function<Vector(const Vector&)>& project,
                    int iterations = 20000) {
  const Eigen::MatrixXd g = Eigen::MatrixXd(r).transpose() * Eigen::MatrixXd(r);
  const double lip = g.operatorNorm();
  Vector x = project(Vector::Zero(center.size()));
  Vector y = x;
  double t = 1.0;
  for (int k = 0; k < iterations; ++k) {
    const Vector next = project(y - g * (y - center) / lip);
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    y = next + ((t - 1.0) / t_next) * (next - x);
    x = next;
    t = t_next;
  }
  return x;
}

// Brute-force 2-D minimization of q over the l1 ball of radius rho: a fine
// boundary scan plus the interior stationary point.
inline Vector grid_qp_l1_2d(const std::function<double(const Vector&)>& q, double rho, int steps = 400000) {
  Vector best = Vector::Zero(2);
  double best_val = q(best);
  const double pi = std::acos(-1.0);
  for (int k = 0; k < steps; ++k) {
    // parametrize the diamond |x| + |y| = rho by angle
    const double th = 2.0 * pi * k / steps;
    const double cx = std::cos(th);
    const double cy = std::sin(th);
    Vector p(2);
    p << rho * cx / (std::abs(cx) + std::abs(cy)), rho * cy / (std::abs(cx) + std::abs(cy));
    const double v = q(p);
    if (v < best_val) {
      best_val = v;
      best = p;
    }
  }
  return best;
}

}  // namespace oracle

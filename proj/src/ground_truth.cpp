#include "sketchreg/bench.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/preconditioner.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>

namespace sketchreg {

namespace {
std::atomic<std::size_t> g_clipped{0};
}

double relative_error(double f_x, double f_star) {
  if (!(f_star > 1e-14)) {
    throw Error(Errc::degenerate_optimum, fmt::format("f* = {:.3e} is too small for a relative error", f_star));
  }
  const double rel = (f_x - f_star) / f_star;
  if (rel < 0.0) {
    g_clipped.fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return rel;
}

std::size_t clipped_relative_errors() { return g_clipped.load(std::memory_order_relaxed); }

Vector least_squares_qr(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw Error(Errc::dimension_mismatch, fmt::format("A has {} rows, b has {}", a.rows(), b.size()));
  }
  const QRFactors qr = qr_thin(a);
  return tri_solve(qr.r, qr.q.transpose() * b);
}

namespace {

// Preconditioned projected gradient at eta = 1/2 until the iterate stops
// moving (1e-13 relative) or 500 iterations.
Vector polish(const Matrix& a, const Vector& b, const FeasibleSet& w, const Matrix& r, Vector x) {
  const MetricProx prox(w, r);
  for (int t = 0; t < 500; ++t) {
    const Vector next = prox(x, 2.0 * (a.transpose() * (a * x - b)), 0.5);
    const double moved = (next - x).norm();
    x = next;
    if (moved <= 1e-13 * std::max(1.0, x.norm())) break;
  }
  return x;
}

}  // namespace

GroundTruth ground_truth(const Matrix& a, const Vector& b, const FeasibleSet& w) {
  const Vector x_ls = least_squares_qr(a, b);
  GroundTruth out;
  if (!w.bounded() || w.contains(x_ls, 0.0)) {
    out.x = x_ls;
    out.objective = objective(a, b, x_ls);
    return out;
  }

  const auto n = static_cast<std::size_t>(a.rows());
  const auto d = static_cast<std::size_t>(a.cols());
  const Matrix r_exact = qr_upper(a);
  const Vector first = polish(a, b, w, r_exact, Vector::Zero(a.cols()));

  const std::size_t s = full_gradient_sketch_size(SketchKind::gaussian, 0, d, n);
  Matrix r_sketch = r_exact;
  if (s < n) r_sketch = build_r(a, SketchOperator::make(SketchKind::gaussian, s, n, 0x5EED));
  const Vector second = polish(a, b, w, r_sketch, project_euclidean(w, x_ls));

  const double f1 = objective(a, b, first);
  const double f2 = objective(a, b, second);
  if (std::abs(f1 - f2) > 1e-10 * std::max(f1, f2)) {
    throw Error(Errc::oracle_disagreement, fmt::format("constrained optimum runs disagree: {:.17g} vs {:.17g}", f1, f2));
  }
  out.x = f1 <= f2 ? first : second;
  out.objective = std::min(f1, f2);
  return out;
}

FeasibleSet make_feasible_set(ConstraintKind kind, const Matrix& a, const Vector& b, double radius_scale,
                              std::optional<double> bound) {
  const auto d = static_cast<std::size_t>(a.cols());
  if (kind == ConstraintKind::none) return FeasibleSet::unconstrained(d, bound);
  if (!(radius_scale > 0.0)) throw Error(Errc::invalid_argument, "radius scale must be positive");
  const Vector x_ls = least_squares_qr(a, b);
  if (kind == ConstraintKind::l2) return FeasibleSet::l2_ball(d, radius_scale * x_ls.norm());
  return FeasibleSet::l1_ball(d, radius_scale * x_ls.lpNorm<1>());
}

}  // namespace sketchreg

#pragma once

#include "sketchreg/dense_linalg.hpp"

#include <cstddef>
#include <optional>
#include <string_view>

namespace sketchreg {

enum class ConstraintKind { none, l1, l2 };

std::string_view to_string(ConstraintKind kind);
/// Accepts "none", "l1", "l2".
ConstraintKind parse_constraint_kind(std::string_view name);

/// A closed convex set W containing the origin: all of R^d, or an l1 / l2
/// ball of radius rho > 0.
class FeasibleSet {
 public:
  /// `bound` is an optional user estimate B of ||x|| over the region of
  /// interest; only the step-size rule reads it.
  static FeasibleSet unconstrained(std::size_t d, std::optional<double> bound = std::nullopt);
  static FeasibleSet l2_ball(std::size_t d, double radius);
  static FeasibleSet l1_ball(std::size_t d, double radius);

  ConstraintKind kind() const { return kind_; }
  std::size_t dimension() const { return d_; }
  double radius() const { return radius_; }
  std::optional<double> user_bound() const { return bound_; }
  bool bounded() const { return kind_ != ConstraintKind::none; }

  /// Membership with an absolute slack `tol` on the norm constraint.
  bool contains(const Vector& x, double tol = 1e-12) const;

 private:
  FeasibleSet(ConstraintKind kind, std::size_t d, double radius, std::optional<double> bound)
      : kind_(kind), d_(d), radius_(radius), bound_(bound) {}

  ConstraintKind kind_;
  std::size_t d_;
  double radius_;
  std::optional<double> bound_;
};

/// argmin_{z in W} ||z - x||_2.
Vector project_euclidean(const FeasibleSet& w, const Vector& x);

/// Euclidean projection onto the l1 ball by sorting, O(d log d).
Vector project_l1_ball(const Vector& x, double radius);

/// D_W = sqrt(max_W ||x||^2/2 - min_W ||x||^2/2). For balls rho / sqrt(2);
/// unconstrained uses the user bound B as B / sqrt(2), else throws
/// Errc::unbounded.
double diameter_param(const FeasibleSet& w);

/// D of the image set R W, the set the y = R x iterates live in.
/// l2: ||R||_2 rho / sqrt(2); l1: rho max_j ||R e_j|| / sqrt(2).
/// Throws Errc::unbounded for unconstrained sets.
double diameter_param_transformed(const FeasibleSet& w, const Matrix& r);

/// Solves argmin_{x in W} 1/2 ||R (x_prev - x)||^2 + eta <c, x> for a fixed
/// upper-triangular R. The factorizations of R are computed once at
/// construction, so one instance serves a whole solver run.
///
/// - unconstrained: x_prev - eta R^{-1} R^{-T} c.
/// - l2 ball: the multiplier of the norm constraint is found by bisection on
///   the secular equation in the singular basis of R.
/// - l1 ball: exact LASSO homotopy on the active set.
///
/// Results lie in W up to 1e-12; the KKT residual is checked against
/// `kkt_tolerance` and Errc::inner_solver_stall is raised past it.
class MetricProx {
 public:
  MetricProx(const FeasibleSet& w, Matrix r, double kkt_tolerance = 1e-10, std::size_t max_inner = 10'000);

  Vector operator()(const Vector& x_prev, const Vector& c, double eta) const;

  /// Scaled KKT residual of x for the problem with unconstrained minimizer
  /// `center` (= x_prev - eta R^{-1} R^{-T} c). Zero at the solution.
  double kkt_residual(const Vector& x, const Vector& center) const;

  const Matrix& r() const { return r_; }
  const FeasibleSet& set() const { return set_; }

 private:
  Vector solve_l2(const Vector& center) const;
  Vector solve_l1(const Vector& center) const;

  FeasibleSet set_;
  Matrix r_;
  double kkt_tolerance_;
  std::size_t max_inner_;
  // l2: R = P diag(sigma) V^T
  Vector sigma_;
  Matrix v_;
};

/// One-shot form of MetricProx.
Vector prox_r_metric(const FeasibleSet& w, const Matrix& r, const Vector& x_prev, const Vector& c, double eta);

}  // namespace sketchreg

#include "sketchreg/feasible_set.hpp"

#include "sketchreg/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace sketchreg {

std::string_view to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::none: return "none";
    case ConstraintKind::l1: return "l1";
    case ConstraintKind::l2: return "l2";
  }
  return "unknown";
}

ConstraintKind parse_constraint_kind(std::string_view name) {
  if (name == "none") return ConstraintKind::none;
  if (name == "l1") return ConstraintKind::l1;
  if (name == "l2") return ConstraintKind::l2;
  throw Error(Errc::invalid_argument, fmt::format("unknown constraint '{}'", name));
}

FeasibleSet FeasibleSet::unconstrained(std::size_t d, std::optional<double> bound) {
  if (bound && !(*bound > 0.0)) throw Error(Errc::invalid_argument, "distance bound must be positive");
  return FeasibleSet(ConstraintKind::none, d, 0.0, bound);
}

FeasibleSet FeasibleSet::l2_ball(std::size_t d, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(Errc::invalid_argument, fmt::format("ball radius must be positive, got {}", radius));
  }
  return FeasibleSet(ConstraintKind::l2, d, radius, std::nullopt);
}

FeasibleSet FeasibleSet::l1_ball(std::size_t d, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(Errc::invalid_argument, fmt::format("ball radius must be positive, got {}", radius));
  }
  return FeasibleSet(ConstraintKind::l1, d, radius, std::nullopt);
}

bool FeasibleSet::contains(const Vector& x, double tol) const {
  const double slack = tol * std::max(1.0, radius_);
  switch (kind_) {
    case ConstraintKind::none: return true;
    case ConstraintKind::l2: return x.norm() <= radius_ + slack;
    case ConstraintKind::l1: return x.lpNorm<1>() <= radius_ + slack;
  }
  return false;
}

Vector project_l1_ball(const Vector& x, double radius) {
  if (x.lpNorm<1>() <= radius) return x;
  std::vector<double> mags(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(x(i));
  std::sort(mags.begin(), mags.end(), std::greater<>());
  double running = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < mags.size(); ++k) {
    running += mags[k];
    const double candidate = (running - radius) / static_cast<double>(k + 1);
    if (mags[k] - candidate > 0.0) theta = candidate;
  }
  Vector out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double mag = std::max(std::abs(x(i)) - theta, 0.0);
    out(i) = std::copysign(mag, x(i));
  }
  return out;
}

Vector project_euclidean(const FeasibleSet& w, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != w.dimension()) {
    throw Error(Errc::dimension_mismatch, fmt::format("set has dimension {}, x has {}", w.dimension(), x.size()));
  }
  switch (w.kind()) {
    case ConstraintKind::none:
      return x;
    case ConstraintKind::l2: {
      const double norm = x.norm();
      if (norm <= w.radius()) return x;
      return x * (w.radius() / norm);
    }
    case ConstraintKind::l1:
      return project_l1_ball(x, w.radius());
  }
  return x;
}

double diameter_param(const FeasibleSet& w) {
  switch (w.kind()) {
    case ConstraintKind::l2:
    case ConstraintKind::l1:
      // max ||x||_2 over either ball is rho (a vertex for l1); min is 0
      return w.radius() / std::sqrt(2.0);
    case ConstraintKind::none:
      if (w.user_bound()) return *w.user_bound() / std::sqrt(2.0);
      throw Error(Errc::unbounded, "unconstrained set has no diameter without a user bound");
  }
  return 0.0;
}

double diameter_param_transformed(const FeasibleSet& w, const Matrix& r) {
  switch (w.kind()) {
    case ConstraintKind::l2:
      return singular_values(r)(0) * w.radius() / std::sqrt(2.0);
    case ConstraintKind::l1: {
      double widest = 0.0;
      for (Eigen::Index j = 0; j < r.cols(); ++j) widest = std::max(widest, r.col(j).norm());
      return widest * w.radius() / std::sqrt(2.0);
    }
    case ConstraintKind::none:
      throw Error(Errc::unbounded, "unconstrained set has no transformed diameter");
  }
  return 0.0;
}

}  // namespace sketchreg

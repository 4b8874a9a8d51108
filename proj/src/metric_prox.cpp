#include "sketchreg/error.hpp"
#include "sketchreg/feasible_set.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sketchreg {

namespace {

// Least-squares pieces on the active columns R_A = Q T:
// solves T^T T z = rhs, i.e. (R_A^T R_A) z = rhs.
struct ActiveFactor {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr;
  Eigen::MatrixXd t;

  ActiveFactor(const Matrix& r, const std::vector<Eigen::Index>& active) {
    Eigen::MatrixXd cols(r.rows(), static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) cols.col(static_cast<Eigen::Index>(k)) = r.col(active[k]);
    qr.compute(cols);
    const auto m = static_cast<Eigen::Index>(active.size());
    t = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  }

  Eigen::VectorXd gram_solve(const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd z = t.transpose().triangularView<Eigen::Lower>().solve(rhs);
    return t.triangularView<Eigen::Upper>().solve(z);
  }

  // argmin_z ||R_A z - v||
  Eigen::VectorXd least_squares(const Eigen::VectorXd& v) const {
    const auto m = t.rows();
    Eigen::VectorXd qtv = qr.householderQ().transpose() * v;
    return t.triangularView<Eigen::Upper>().solve(qtv.head(m));
  }
};

double sign_of(double v) { return v >= 0.0 ? 1.0 : -1.0; }

}  // namespace

MetricProx::MetricProx(const FeasibleSet& w, Matrix r, double kkt_tolerance, std::size_t max_inner)
    : set_(w), r_(std::move(r)), kkt_tolerance_(kkt_tolerance), max_inner_(max_inner) {
  const auto d = static_cast<Eigen::Index>(set_.dimension());
  if (r_.rows() != d || r_.cols() != d) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("R is {}x{}, feasible set has dimension {}", r_.rows(), r_.cols(), d));
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (r_(i, i) == 0.0 || !std::isfinite(r_(i, i))) {
      throw Error(Errc::singular_factor, fmt::format("zero pivot at R({0},{0})", i));
    }
  }
  if (set_.kind() == ConstraintKind::l2) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(r_), Eigen::ComputeFullV);
    sigma_ = svd.singularValues();
    v_ = svd.matrixV();
  }
}

Vector MetricProx::operator()(const Vector& x_prev, const Vector& c, double eta) const {
  if (x_prev.size() != r_.rows() || c.size() != r_.rows()) {
    throw Error(Errc::dimension_mismatch, "prox inputs do not match the dimension of R");
  }
  if (!(eta > 0.0)) throw Error(Errc::invalid_argument, fmt::format("step size must be positive, got {}", eta));

  Vector center = x_prev;
  if (!c.isZero(0.0)) center -= eta * solve_normal_metric(r_, c);

  switch (set_.kind()) {
    case ConstraintKind::none:
      return center;
    case ConstraintKind::l2:
      if (center.norm() <= set_.radius()) return center;
      break;
    case ConstraintKind::l1:
      if (center.lpNorm<1>() <= set_.radius()) return center;
      break;
  }

  Vector x = set_.kind() == ConstraintKind::l2 ? solve_l2(center) : solve_l1(center);
  const double res = kkt_residual(x, center);
  if (!(res <= kkt_tolerance_)) {
    throw Error(Errc::inner_solver_stall, fmt::format("KKT residual {:.3e} above {:.1e}", res, kkt_tolerance_));
  }
  return x;
}

// In the singular basis of R the solution is x~_i = s_i^2 w_i / (s_i^2 + lam);
// lam > 0 is chosen so that ||x~|| = rho. Newton on 1/||x~(lam)|| - 1/rho,
// which is close to linear in lam, guarded by a bisection bracket.
Vector MetricProx::solve_l2(const Vector& center) const {
  const double rho = set_.radius();
  const Vector w = v_.transpose() * center;
  const Vector s2 = sigma_.array().square();

  auto point = [&](double lam) -> Vector { return (s2.array() * w.array() / (s2.array() + lam)).matrix(); };

  double lo = 0.0;
  double hi = s2.maxCoeff() * w.norm() / rho;
  double lam = 0.0;
  Vector xt = w;
  for (std::size_t it = 0; it < max_inner_; ++it) {
    const double phi = xt.norm();
    if (std::abs(phi - rho) <= 4.0 * std::numeric_limits<double>::epsilon() * rho) break;
    if (phi > rho) {
      lo = lam;
    } else {
      hi = lam;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;

    // d phi / d lam = -(1/phi) sum x~_i^2 / (s_i^2 + lam)
    const double dphi = -(xt.array().square() / (s2.array() + lam)).sum() / phi;
    double next = lam - (1.0 / phi - 1.0 / rho) / (dphi / (phi * phi));
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    lam = next;
    xt = point(lam);
  }

  Vector x = v_ * xt;
  const double norm = x.norm();
  if (norm > rho) x *= rho / norm;
  return x;
}

// LASSO homotopy on 1/2 ||R x - v||^2 + lam ||x||_1 with v = R center.
// Starting from lam = ||R^T v||_inf (x = 0) the path is followed until
// ||x||_1 reaches rho, handling variables joining and leaving the active set.
Vector MetricProx::solve_l1(const Vector& center) const {
  const double rho = set_.radius();
  const auto d = r_.cols();
  const Vector v = r_ * center;

  Vector x = Vector::Zero(d);
  Vector corr = r_.transpose() * v;
  Eigen::Index first = 0;
  double lam = corr.cwiseAbs().maxCoeff(&first);

  std::vector<Eigen::Index> active{first};
  std::vector<double> signs{sign_of(corr(first))};
  std::vector<char> in_active(static_cast<std::size_t>(d), 0);
  in_active[static_cast<std::size_t>(first)] = 1;

  const double tiny = 1e-14 * lam;
  bool reached = false;
  for (std::size_t it = 0; it < max_inner_ && !reached; ++it) {
    const ActiveFactor fac(r_, active);
    Eigen::VectorXd s_a(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) s_a(static_cast<Eigen::Index>(k)) = signs[k];
    const Eigen::VectorXd u = fac.gram_solve(s_a);

    Vector dir = Vector::Zero(d);
    for (std::size_t k = 0; k < active.size(); ++k) dir(active[k]) = u(static_cast<Eigen::Index>(k));
    const Vector a = r_.transpose() * (r_ * dir);

    double l1 = 0.0;
    for (std::size_t k = 0; k < active.size(); ++k) l1 += signs[k] * x(active[k]);
    const double slope = s_a.dot(u);

    double gamma = lam;
    enum class Event { floor, stop, join, drop } event = Event::floor;
    Eigen::Index who = -1;

    const double g_stop = (rho - l1) / slope;
    if (g_stop >= 0.0 && g_stop <= gamma) {
      gamma = g_stop;
      event = Event::stop;
    }
    for (Eigen::Index j = 0; j < d; ++j) {
      if (in_active[static_cast<std::size_t>(j)]) continue;
      for (double sg : {1.0, -1.0}) {
        const double denom = 1.0 - sg * a(j);
        if (std::abs(denom) < 1e-15) continue;
        const double g = (lam - sg * corr(j)) / denom;
        if (g > tiny && g < gamma) {
          gamma = g;
          event = Event::join;
          who = j;
        }
      }
    }
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double uk = u(static_cast<Eigen::Index>(k));
      if (uk == 0.0) continue;
      const double g = -x(active[k]) / uk;
      if (g > tiny && g < gamma) {
        gamma = g;
        event = Event::drop;
        who = static_cast<Eigen::Index>(k);
      }
    }

    x += gamma * dir;
    lam -= gamma;
    corr = r_.transpose() * (v - r_ * x);

    switch (event) {
      case Event::stop:
      case Event::floor:
        reached = true;
        break;
      case Event::join:
        active.push_back(who);
        signs.push_back(sign_of(corr(who)));
        in_active[static_cast<std::size_t>(who)] = 1;
        break;
      case Event::drop: {
        const auto k = static_cast<std::size_t>(who);
        x(active[k]) = 0.0;
        in_active[static_cast<std::size_t>(active[k])] = 0;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(k));
        signs.erase(signs.begin() + static_cast<std::ptrdiff_t>(k));
        break;
      }
    }
  }
  if (!reached) {
    throw Error(Errc::inner_solver_stall, fmt::format("l1 homotopy did not finish in {} steps", max_inner_));
  }

  // Recompute the final segment in one shot: x_A = x0 - lam u with x0 the
  // least-squares fit on the active columns and lam fixed by ||x_A||_1 = rho.
  {
    const ActiveFactor fac(r_, active);
    Eigen::VectorXd s_a(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) s_a(static_cast<Eigen::Index>(k)) = signs[k];
    const Eigen::VectorXd u = fac.gram_solve(s_a);
    const Eigen::VectorXd x0 = fac.least_squares(v);
    const double lam_star = (s_a.dot(x0) - rho) / s_a.dot(u);
    const Eigen::VectorXd xa = x0 - lam_star * u;
    bool consistent = lam_star >= 0.0;
    for (Eigen::Index k = 0; k < xa.size() && consistent; ++k) consistent = s_a(k) * xa(k) >= 0.0;
    if (consistent) {
      x.setZero();
      for (std::size_t k = 0; k < active.size(); ++k) x(active[k]) = xa(static_cast<Eigen::Index>(k));
    }
  }

  const double norm1 = x.lpNorm<1>();
  if (norm1 > rho) x *= rho / norm1;
  return x;
}

// Norm of the projected-gradient map (x - P_W(x - g / L)) L for the
// quadratic 1/2 ||R(x - center)||^2, scaled by ||R||_F (||R(x - center)|| + ||R x||).
double MetricProx::kkt_residual(const Vector& x, const Vector& center) const {
  const Vector rdiff = r_ * (x - center);
  const Vector g = r_.transpose() * rdiff;
  const double lip = r_.squaredNorm();
  const Vector mapped = (x - project_euclidean(set_, x - g / lip)) * lip;
  const double scale = r_.norm() * (rdiff.norm() + (r_ * x).norm()) + std::numeric_limits<double>::min();
  return mapped.norm() / scale;
}

Vector prox_r_metric(const FeasibleSet& w, const Matrix& r, const Vector& x_prev, const Vector& c, double eta) {
  return MetricProx(w, r)(x_prev, c, eta);
}

}  // namespace sketchreg

#include "sketchreg/bench.hpp"
#include "sketchreg/error.hpp"
#include "sketchreg/solvers.hpp"
#include "solver_common.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace sketchreg {

double step_size_eq4(double smoothness, double diameter, std::size_t iterations, double sigma2) {
  if (!(smoothness > 0.0) || iterations == 0 || diameter < 0.0 || sigma2 < 0.0) {
    throw Error(Errc::invalid_argument, "step size rule needs L > 0, T >= 1, D >= 0, sigma2 >= 0");
  }
  const double l_branch = 1.0 / (2.0 * smoothness);
  if (sigma2 == 0.0) return l_branch;
  return std::min(l_branch, std::sqrt(diameter * diameter / (2.0 * static_cast<double>(iterations) * sigma2)));
}

EpochSchedule epoch_schedule(double smoothness, double strong_convexity, double v0, double sigma2, std::size_t s,
                             std::size_t cap) {
  if (!(smoothness > 0.0) || !(strong_convexity > 0.0) || !(v0 > 0.0) || sigma2 < 0.0 || s == 0) {
    throw Error(Errc::invalid_argument, "epoch schedule needs L, mu, V0 > 0, sigma2 >= 0 and s >= 1");
  }
  const double shrink = std::ldexp(v0, -static_cast<int>(s));  // V0 2^-s
  const double n_real = std::max(4.0 * std::sqrt(2.0 * smoothness / strong_convexity),
                                 64.0 * sigma2 / (3.0 * strong_convexity * shrink));
  if (!(n_real <= static_cast<double>(cap))) {
    throw Error(Errc::epoch_budget_exceeded, fmt::format("epoch {} needs {:.3g} iterations (cap {})", s, n_real, cap));
  }
  EpochSchedule out;
  out.length = static_cast<std::size_t>(std::ceil(n_real));
  const double n = static_cast<double>(out.length);
  out.step = 1.0 / (4.0 * smoothness);
  if (sigma2 > 0.0) {
    const double noise = std::sqrt(3.0 * 2.0 * shrink / (2.0 * strong_convexity * sigma2 * n * (n + 1.0) * (n + 1.0)));
    out.step = std::min(out.step, noise);
  }
  return out;
}

double acc_alpha(std::size_t t) { return 2.0 / (static_cast<double>(t) + 1.0); }

std::vector<std::size_t> sample_batch(Rng& rng, std::size_t n_pad, std::size_t r) {
  std::uniform_int_distribution<std::size_t> pick(0, n_pad - 1);
  std::vector<std::size_t> rows(r);
  for (auto& i : rows) i = pick(rng);
  return rows;
}

Vector batch_gradient(const HadamardTransformed& hd, const Vector& x, std::span<const std::size_t> rows) {
  Vector c = Vector::Zero(hd.hda.cols());
  for (std::size_t i : rows) {
    const auto row = hd.hda.row(static_cast<Eigen::Index>(i));
    const double resid = row.dot(x) - hd.hdb(static_cast<Eigen::Index>(i));
    c.noalias() += resid * row.transpose();
  }
  c *= 2.0 * static_cast<double>(hd.n_pad) / static_cast<double>(rows.size());
  return c;
}

namespace {

// y -> U^T U y with U = A R^{-1}
Vector gram_apply(const Matrix& a, const Matrix& r, const Vector& y) {
  const Vector ax = a * tri_solve(r, y);
  return tri_solve(r, a.transpose() * ax, true);
}

Vector random_unit(Rng& rng, Eigen::Index d) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = normal(rng);
  return v.normalized();
}

}  // namespace

ProblemConstants estimate_constants(const Matrix& a, const Vector& b, const Preconditioner& pre, const Vector& x0,
                                    std::uint64_t seed) {
  constexpr int kPowerSteps = 20;
  constexpr int kProbes = 200;
  const Matrix& r = pre.r_factor;
  const Eigen::Index d = a.cols();

  Rng rng(derive_seed(seed, SeedStream::power_iteration));
  Vector v = random_unit(rng, d);
  double lam_max = 0.0;
  for (int k = 0; k < kPowerSteps; ++k) {
    const Vector gv = gram_apply(a, r, v);
    lam_max = v.dot(gv);
    v = gv.normalized();
  }
  lam_max = std::max(lam_max, v.dot(gram_apply(a, r, v)));

  // (lam_max I - U^T U) has top eigenvalue lam_max - lam_min
  Vector w = random_unit(rng, d);
  double gap = 0.0;
  for (int k = 0; k < kPowerSteps; ++k) {
    const Vector gw = lam_max * w - gram_apply(a, r, w);
    gap = w.dot(gw);
    w = gw.normalized();
  }
  const double lam_min = std::max(lam_max - gap, 1e-3 * lam_max);

  ProblemConstants out;
  out.smoothness = 2.0 * lam_max;
  out.strong_convexity = 2.0 * lam_min;

  if (pre.hd.n_pad > 0) {
    const Vector full = tri_solve(r, 2.0 * (a.transpose() * (a * x0 - b)), true);
    Rng probe(derive_seed(seed, SeedStream::variance_probe));
    double acc = 0.0;
    for (int k = 0; k < kProbes; ++k) {
      const auto rows = sample_batch(probe, pre.hd.n_pad, 1);
      acc += (tri_solve(r, batch_gradient(pre.hd, x0, rows), true) - full).squaredNorm();
    }
    out.sigma2 = 2.0 * acc / kProbes;
  }
  return out;
}

std::size_t full_gradient_sketch_size(SketchKind kind, std::size_t requested, std::size_t d, std::size_t n) {
  if (kind == SketchKind::identity) return n;
  if (requested != 0) return requested;
  return std::min(std::max(default_sketch_size(kind, d), 30 * d), n - 1);
}

namespace detail {

Tracer::Tracer(const Matrix& a, const Vector& b, const SolverConfig& cfg, SolveReport& report)
    : a_(a), b_(b), cfg_(cfg), report_(report) {
  if (cfg_.f_star && !(*cfg_.f_star > 1e-14)) {
    throw Error(Errc::degenerate_optimum, fmt::format("f* = {:.3e} is too small for a relative error", *cfg_.f_star));
  }
}

void Tracer::start() {
  banked_ = 0.0;
  segment_start_ = std::chrono::steady_clock::now();
}

double Tracer::running_seconds() const {
  return banked_ + std::chrono::duration<double>(std::chrono::steady_clock::now() - segment_start_).count();
}

bool Tracer::due(std::size_t iteration) const {
  if (cfg_.tolerance > 0.0 && cfg_.f_star) return true;
  if (cfg_.record_iterates) return true;
  return cfg_.record_every != 0 && iteration % cfg_.record_every == 0;
}

bool Tracer::out_of_time() const { return cfg_.time_budget && running_seconds() >= *cfg_.time_budget; }

bool Tracer::record(std::size_t iteration, const Vector& x, bool force) {
  if (!force && !due(iteration)) return false;
  if (iteration == last_recorded_ && !report_.trace.empty()) return report_.converged;
  const double now = running_seconds();

  TracePoint p;
  p.iteration = iteration;
  p.elapsed_seconds = now;
  p.objective = objective(a_, b_, x);
  p.relative_error = cfg_.f_star ? relative_error(p.objective, *cfg_.f_star) : std::numeric_limits<double>::quiet_NaN();
  report_.trace.push_back(p);
  if (cfg_.record_iterates) report_.iterates.push_back(x);
  last_recorded_ = iteration;

  banked_ = now;
  segment_start_ = std::chrono::steady_clock::now();
  if (cfg_.tolerance > 0.0 && cfg_.f_star && p.relative_error <= cfg_.tolerance) report_.converged = true;
  return report_.converged;
}

void Tracer::finish(std::size_t iterations_run, const Vector& x_last) {
  record(iterations_run, x_last, true);
  report_.iterations_run = iterations_run;
  report_.solve_seconds = report_.trace.back().elapsed_seconds;
}

Vector start_point(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg) {
  if (a.rows() != b.size()) {
    throw Error(Errc::dimension_mismatch, fmt::format("A has {} rows, b has {}", a.rows(), b.size()));
  }
  if (static_cast<std::size_t>(a.cols()) != w.dimension()) {
    throw Error(Errc::dimension_mismatch,
                fmt::format("A has {} columns, feasible set has dimension {}", a.cols(), w.dimension()));
  }
  if (cfg.batch_size == 0) throw Error(Errc::invalid_argument, "batch size must be at least 1");
  if (cfg.step_size && !(*cfg.step_size > 0.0)) throw Error(Errc::invalid_argument, "step size must be positive");
  if (!cfg.x0) return Vector::Zero(a.cols());
  if (cfg.x0->size() != a.cols()) throw Error(Errc::dimension_mismatch, "x0 has the wrong length");
  if (!w.contains(*cfg.x0)) throw Error(Errc::invalid_argument, "x0 lies outside the feasible set");
  return *cfg.x0;
}

double y_space_diameter(const FeasibleSet& w, const Preconditioner& pre, const Vector& x0,
                        const std::optional<double>& user_bound) {
  if (w.bounded()) return diameter_param_transformed(w, pre.r_factor);
  if (user_bound) return *user_bound / std::sqrt(2.0);
  return (pre.sketched_solution - pre.r_factor * x0).norm() / std::sqrt(2.0);
}

}  // namespace detail

}  // namespace sketchreg

#include "sketchreg/solvers.hpp"
#include "solver_common.hpp"

#include <algorithm>
#include <cmath>

namespace sketchreg {

namespace {

struct RawConstants {
  double smoothness = 0.0;  // 2 sigma_max^2(A)
  double row_smoothness = 0.0;  // 2 n max_j ||a_j||^2, worst single-row curvature
  double sigma2 = 0.0;
};

RawConstants raw_constants(const Matrix& a, const Vector& b, const Vector& x0, std::uint64_t seed) {
  RawConstants out;
  Rng rng(derive_seed(seed, SeedStream::power_iteration));
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(a.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
  v.normalize();
  double lam = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector gv = a.transpose() * (a * v);
    lam = v.dot(gv);
    v = gv.normalized();
  }
  out.smoothness = 2.0 * lam;
  const double n = static_cast<double>(a.rows());
  out.row_smoothness = 2.0 * n * a.rowwise().squaredNorm().maxCoeff();

  const Vector full = 2.0 * (a.transpose() * (a * x0 - b));
  Rng probe(derive_seed(seed, SeedStream::variance_probe));
  std::uniform_int_distribution<Eigen::Index> pick(0, a.rows() - 1);
  double acc = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index j = pick(probe);
    const Vector cj = 2.0 * n * (a.row(j).dot(x0) - b(j)) * a.row(j).transpose();
    acc += (cj - full).squaredNorm();
  }
  out.sigma2 = 2.0 * acc / 200.0;
  return out;
}

}  // namespace

// x_t = P_W(x_{t-1} - eta c), c = (2n/r) sum_j a_j (a_j^T x - b_j) over raw rows.
SolveReport plain_sgd_baseline(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg) {
  const Vector x0 = detail::start_point(a, b, w, cfg);
  SolveReport rep;
  rep.solver = "sgd";

  if (cfg.step_size) {
    rep.step_size = *cfg.step_size;
  } else {
    const RawConstants rc = raw_constants(a, b, x0, cfg.seed);
    rep.smoothness = rc.smoothness;
    rep.sigma2 = cfg.sigma2.value_or(rc.sigma2);
    // without a diameter only the curvature cap applies; the single-row
    // curvature keeps small batches from blowing up
    const double cap = 1.0 / (2.0 * std::max(rc.smoothness, rc.row_smoothness / static_cast<double>(cfg.batch_size)));
    std::optional<double> diam;
    if (w.bounded() || w.user_bound()) diam = diameter_param(w);
    if (!w.bounded() && cfg.distance_bound) diam = *cfg.distance_bound / std::sqrt(2.0);
    rep.step_size = cap;
    if (diam) {
      rep.step_size = std::min(cap, step_size_eq4(rc.smoothness, *diam, std::max<std::size_t>(cfg.iterations, 1),
                                                  rep.sigma2 / static_cast<double>(cfg.batch_size)));
    }
  }

  const double n = static_cast<double>(a.rows());
  const double scale = 2.0 * n / static_cast<double>(cfg.batch_size);
  Rng rng(derive_seed(cfg.seed, SeedStream::sampling));
  std::uniform_int_distribution<Eigen::Index> pick(0, a.rows() - 1);
  detail::Tracer tracer(a, b, cfg, rep);

  Vector x = x0;
  Vector sum = Vector::Zero(x.size());
  Vector avg = x0;
  Vector c(x.size());
  tracer.start();
  tracer.record(0, x0, true);
  std::size_t t = 0;
  while (t < cfg.iterations) {
    c.setZero();
    for (std::size_t k = 0; k < cfg.batch_size; ++k) {
      const Eigen::Index j = pick(rng);
      c.noalias() += (a.row(j).dot(x) - b(j)) * a.row(j).transpose();
    }
    x = project_euclidean(w, x - rep.step_size * scale * c);
    ++t;
    sum += x;
    if (tracer.due(t) || t == cfg.iterations) {
      avg = sum / static_cast<double>(t);
      if (tracer.record(t, avg)) break;
    }
    if (tracer.out_of_time()) break;
  }
  if (t > 0) avg = sum / static_cast<double>(t);
  rep.final_x = x;
  rep.final_x_avg = avg;
  tracer.finish(t, avg);
  return rep;
}

}  // namespace sketchreg

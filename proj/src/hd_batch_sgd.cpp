#include "sketchreg/solvers.hpp"
#include "solver_common.hpp"

namespace sketchreg {

SolveReport hd_pw_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg) {
  PreconditionerOptions opts;
  opts.sketch = cfg.sketch;
  opts.sketch_size = cfg.sketch_size;
  opts.seed = cfg.seed;
  return hd_pw_batch_sgd(a, b, w, cfg, build_preconditioner(a, b, opts));
}

SolveReport hd_pw_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg,
                            const Preconditioner& pre) {
  const Vector x0 = detail::start_point(a, b, w, cfg);
  SolveReport rep;
  rep.solver = "hdpwbatch";
  rep.preconditioning_seconds = pre.build_seconds;
  rep.sketch_size = pre.sketch_size;

  const ProblemConstants pc = estimate_constants(a, b, pre, x0, cfg.seed);
  rep.smoothness = pc.smoothness;
  rep.strong_convexity = pc.strong_convexity;
  rep.sigma2 = cfg.sigma2.value_or(pc.sigma2);
  if (cfg.step_size) {
    rep.step_size = *cfg.step_size;
  } else {
    const double diam = detail::y_space_diameter(w, pre, x0, cfg.distance_bound);
    rep.step_size = step_size_eq4(pc.smoothness, diam, std::max<std::size_t>(cfg.iterations, 1),
                                  rep.sigma2 / static_cast<double>(cfg.batch_size));
  }

  const MetricProx prox(w, pre.r_factor);
  Rng rng(derive_seed(cfg.seed, SeedStream::sampling));
  detail::Tracer tracer(a, b, cfg, rep);

  Vector x = x0;
  Vector sum = Vector::Zero(x.size());
  Vector avg = x0;
  tracer.start();
  tracer.record(0, x0, true);
  std::size_t t = 0;
  while (t < cfg.iterations) {
    const auto rows = sample_batch(rng, pre.hd.n_pad, cfg.batch_size);
    x = prox(x, batch_gradient(pre.hd, x, rows), rep.step_size);
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

#include "sketchreg/error.hpp"
#include "sketchreg/solvers.hpp"
#include "solver_common.hpp"

#include <chrono>

namespace sketchreg {

namespace {

Preconditioner full_gradient_preconditioner(const Matrix& a, const Vector& b, const SolverConfig& cfg) {
  PreconditionerOptions opts;
  opts.sketch = cfg.sketch;
  opts.sketch_size = full_gradient_sketch_size(cfg.sketch, cfg.sketch_size, static_cast<std::size_t>(a.cols()),
                                               static_cast<std::size_t>(a.rows()));
  opts.seed = cfg.seed;
  opts.with_hadamard = false;
  return build_preconditioner(a, b, opts);
}

}  // namespace

SolveReport pw_gradient(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg) {
  return pw_gradient(a, b, w, cfg, full_gradient_preconditioner(a, b, cfg));
}

SolveReport pw_gradient(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg,
                        const Preconditioner& pre) {
  Vector x = detail::start_point(a, b, w, cfg);
  SolveReport rep;
  rep.solver = "pwgrad";
  rep.preconditioning_seconds = pre.build_seconds;
  rep.sketch_size = pre.sketch_size;
  rep.step_size = cfg.step_size.value_or(0.5);

  const MetricProx prox(w, pre.r_factor);
  detail::Tracer tracer(a, b, cfg, rep);
  tracer.start();
  bool done = tracer.record(0, x, true);
  std::size_t t = 0;
  while (!done && t < cfg.iterations && !tracer.out_of_time()) {
    const Vector c = 2.0 * (a.transpose() * (a * x - b));
    x = prox(x, c, rep.step_size);
    ++t;
    done = tracer.record(t, x);
  }
  rep.final_x = x;
  rep.final_x_avg = x;
  tracer.finish(t, x);
  return rep;
}

SolveReport ihs(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg, bool fresh_sketch) {
  Vector x = detail::start_point(a, b, w, cfg);
  SolveReport rep;
  rep.solver = fresh_sketch ? "ihs" : "ihs-fixed";
  rep.step_size = cfg.step_size.value_or(1.0);

  const auto n = static_cast<std::size_t>(a.rows());
  const auto d = static_cast<std::size_t>(a.cols());
  const std::size_t s = full_gradient_sketch_size(cfg.sketch, cfg.sketch_size, d, n);
  rep.sketch_size = s;

  // The fixed variant shares the pw_gradient sketch (same derived seed), so
  // the two produce the same R and hence the same iterates.
  std::optional<MetricProx> fixed;
  if (!fresh_sketch) {
    const Preconditioner pre = full_gradient_preconditioner(a, b, cfg);
    rep.preconditioning_seconds = pre.build_seconds;
    rep.sketch_size = pre.sketch_size;
    fixed.emplace(w, pre.r_factor);
  }

  detail::Tracer tracer(a, b, cfg, rep);
  tracer.start();
  bool done = tracer.record(0, x, true);
  std::size_t t = 0;
  while (!done && t < cfg.iterations && !tracer.out_of_time()) {
    const Vector c = a.transpose() * (a * x - b);
    if (fixed) {
      x = (*fixed)(x, c, rep.step_size);
    } else {
      const auto sk = SketchOperator::make(cfg.sketch, s, n, derive_seed(cfg.seed, SeedStream::fresh_sketch, t));
      x = MetricProx(w, build_r(a, sk))(x, c, rep.step_size);
    }
    ++t;
    done = tracer.record(t, x);
  }
  rep.final_x = x;
  rep.final_x_avg = x;
  tracer.finish(t, x);
  return rep;
}

}  // namespace sketchreg

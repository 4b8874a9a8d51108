#include "sketchreg/solvers.hpp"
#include "solver_common.hpp"

namespace sketchreg {

SolveReport hd_pw_acc_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg) {
  PreconditionerOptions opts;
  opts.sketch = cfg.sketch;
  opts.sketch_size = cfg.sketch_size;
  opts.seed = cfg.seed;
  return hd_pw_acc_batch_sgd(a, b, w, cfg, build_preconditioner(a, b, opts));
}

// Each epoch runs the accelerated recursion from p_{s-1}:
//   x~  = (1 - q_t) x^ + q_t x_{t-1}
//   x_t = argmin_W 1/2||R(x - x_{t-1})||^2 + eta_t mu/2 ||R(x - x~)||^2 + eta_t <c(x~), x>
//   x^  = (1 - alpha_t) x^ + alpha_t x_t
// with alpha_t = q_t = 2/(t+1), eta_t = eta_s t; the epoch returns x^.
// The gradient is taken at x~, the point the averaging scheme linearizes at.
SolveReport hd_pw_acc_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg,
                                const Preconditioner& pre) {
  const Vector x0 = detail::start_point(a, b, w, cfg);
  SolveReport rep;
  rep.solver = "hdpwacc";
  rep.preconditioning_seconds = pre.build_seconds;
  rep.sketch_size = pre.sketch_size;

  const ProblemConstants pc = estimate_constants(a, b, pre, x0, cfg.seed);
  rep.smoothness = pc.smoothness;
  rep.strong_convexity = pc.strong_convexity;
  rep.sigma2 = cfg.sigma2.value_or(pc.sigma2);
  const double v0 = cfg.v0.value_or(objective(a, b, x0));
  const double batch_sigma2 = rep.sigma2 / static_cast<double>(cfg.batch_size);
  const double mu = pc.strong_convexity;

  const MetricProx prox(w, pre.r_factor);
  Rng rng(derive_seed(cfg.seed, SeedStream::sampling));
  detail::Tracer tracer(a, b, cfg, rep);

  Vector p = x0;
  std::size_t total = 0;
  bool stop = false;
  tracer.start();
  tracer.record(0, x0, true);
  for (std::size_t s = 1; s <= cfg.epochs && !stop; ++s) {
    const EpochSchedule sched = epoch_schedule(pc.smoothness, mu, v0, batch_sigma2, s, cfg.epoch_cap);
    const double eta_s = cfg.step_size.value_or(sched.step);
    if (s == 1) rep.step_size = eta_s;
    rep.epoch_lengths.push_back(sched.length);

    Vector x_prev = p;
    Vector x_hat = p;
    for (std::size_t t = 1; t <= sched.length; ++t) {
      if (total >= cfg.iterations || tracer.out_of_time()) {
        stop = true;
        break;
      }
      const double alpha = acc_alpha(t);
      const double eta_t = eta_s * static_cast<double>(t);
      const Vector x_tilde = (1.0 - alpha) * x_hat + alpha * x_prev;
      const auto rows = sample_batch(rng, pre.hd.n_pad, cfg.batch_size);
      const Vector c = batch_gradient(pre.hd, x_tilde, rows);
      const Vector z = (eta_t * mu * x_tilde + x_prev) / (1.0 + eta_t * mu);
      x_prev = prox(z, c, eta_t / (1.0 + eta_t * mu));
      x_hat = (1.0 - alpha) * x_hat + alpha * x_prev;
      ++total;
      // only epoch ends count toward the tolerance
      if (t < sched.length && tracer.due(total) && cfg.tolerance == 0.0) tracer.record(total, x_hat);
    }
    p = x_hat;
    if (!stop && tracer.record(total, p, true)) stop = true;
  }
  rep.final_x = p;
  rep.final_x_avg = p;
  tracer.finish(total, p);
  return rep;
}

}  // namespace sketchreg

#pragma once

#include "sketchreg/dense_linalg.hpp"
#include "sketchreg/feasible_set.hpp"
#include "sketchreg/preconditioner.hpp"
#include "sketchreg/random.hpp"
#include "sketchreg/sketch.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sketchreg {

struct SolverConfig {
  std::size_t batch_size = 1;     // r
  std::size_t iterations = 1000;  // T; a cap on total inner iterations for the accelerated solver
  std::optional<double> step_size;       // unset: automatic rule of each solver
  std::size_t epochs = 10;               // S, accelerated solver only
  std::optional<double> v0;              // unset: f(x0)
  std::optional<double> sigma2;          // unset: probed at x0
  std::optional<double> distance_bound;  // B >= ||R (x0 - x*)||, unconstrained step-size rule
  std::uint64_t seed = 42;
  std::size_t record_every = 1;  // 0: record only the start and the end
  SketchKind sketch = SketchKind::countsketch;
  std::size_t sketch_size = 0;   // 0: solver default
  std::optional<Vector> x0;      // unset: zero (always feasible)
  std::optional<double> f_star;  // enables relative error in the trace
  double tolerance = 0.0;        // stop once relative error <= tolerance (needs f_star)
  std::optional<double> time_budget;  // seconds of solve time, preconditioning excluded
  bool record_iterates = false;
  std::size_t epoch_cap = 10'000'000;
};

struct TracePoint {
  std::size_t iteration = 0;
  double elapsed_seconds = 0.0;  // solve time only, trace evaluation excluded
  double objective = 0.0;
  double relative_error = 0.0;   // NaN without f_star
};

struct SolveReport {
  std::string solver;
  std::vector<TracePoint> trace;
  Vector final_x;
  Vector final_x_avg;  // running average for the SGD solvers, else final_x
  std::size_t iterations_run = 0;
  double preconditioning_seconds = 0.0;
  double solve_seconds = 0.0;
  bool converged = false;  // tolerance reached

  // diagnostics of the automatic rules
  double step_size = 0.0;
  double smoothness = 0.0;         // L
  double strong_convexity = 0.0;   // mu
  double sigma2 = 0.0;
  std::size_t sketch_size = 0;
  std::vector<std::size_t> epoch_lengths;
  std::vector<Vector> iterates;    // when record_iterates; the traced point of every iteration
};

/// eta = min(1 / (2L), sqrt(D^2 / (2 T sigma2))). sigma2 = 0 gives the 1/(2L) branch.
double step_size_eq4(double smoothness, double diameter, std::size_t iterations, double sigma2);

struct EpochSchedule {
  std::size_t length = 0;  // N_s
  double step = 0.0;       // eta_s
};

/// Epoch s (1-based) of the multi-epoch accelerated scheme:
///   N_s   = ceil(max{4 sqrt(2L/mu), 64 sigma2 / (3 mu V0 2^-s)})
///   eta_s = min{1/(4L), sqrt(3 V0 2^-(s-1) / (2 mu sigma2 N_s (N_s+1)^2))}
/// Throws Errc::epoch_budget_exceeded when N_s > cap.
EpochSchedule epoch_schedule(double smoothness, double strong_convexity, double v0, double sigma2, std::size_t s,
                             std::size_t cap = 10'000'000);

/// alpha_t = 2 / (t + 1).
double acc_alpha(std::size_t t);

/// r indices drawn i.i.d. uniformly from [0, n_pad).
std::vector<std::size_t> sample_batch(Rng& rng, std::size_t n_pad, std::size_t r);

/// c = (2 n_pad / r) sum_j (HDA)_j^T ((HDA)_j x - (HDb)_j): an unbiased
/// estimate of 2 A^T (A x - b).
Vector batch_gradient(const HadamardTransformed& hd, const Vector& x, std::span<const std::size_t> rows);

struct ProblemConstants {
  double smoothness = 0.0;        // L = 2 sigma_max^2(U)
  double strong_convexity = 0.0;  // mu = 2 sigma_min^2(U)
  double sigma2 = 0.0;            // single-row gradient variance in y = R x coordinates, x2 safety
};

/// Power iteration on U^T U (20 steps; shifted for sigma_min) and a
/// 200-sample probe of the single-row gradient variance at x0.
ProblemConstants estimate_constants(const Matrix& a, const Vector& b, const Preconditioner& pre, const Vector& x0,
                                    std::uint64_t seed);

/// Default sketch size of pw_gradient and ihs: the kind default raised to
/// 30 d (eta = 1/2 needs the sketched metric within a factor ~1.4 of A^T A),
/// capped at n - 1.
std::size_t full_gradient_sketch_size(SketchKind kind, std::size_t requested, std::size_t d, std::size_t n);

/// Mini-batch SGD on the two-step preconditioned problem. final_x is x_T,
/// final_x_avg the average of x_1..x_T, which is also what the trace follows.
SolveReport hd_pw_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg);
SolveReport hd_pw_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg,
                            const Preconditioner& pre);

/// Multi-epoch accelerated mini-batch SGD with restarts; sigma2 enters the
/// schedule as sigma2 / r. Traces the running x-hat.
SolveReport hd_pw_acc_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg);
SolveReport hd_pw_acc_batch_sgd(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg,
                                const Preconditioner& pre);

/// Preconditioned projected gradient: x+ = prox_R(x, 2 A^T (A x - b), eta), eta = 1/2 by default.
SolveReport pw_gradient(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg);
SolveReport pw_gradient(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg,
                        const Preconditioner& pre);

/// Iterative Hessian sketch: x+ = prox_{R_t}(x, A^T (A x - b), 1) with R_t
/// from QR(S_t A). With fresh_sketch = false the pw_gradient sketch is reused
/// and the iterates coincide with pw_gradient at eta = 1/2.
SolveReport ihs(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg, bool fresh_sketch);

/// Uniform-sampling projected mini-batch SGD on the raw problem.
SolveReport plain_sgd_baseline(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg);

}  // namespace sketchreg

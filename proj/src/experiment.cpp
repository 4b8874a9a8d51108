#include "sketchreg/bench.hpp"
#include "sketchreg/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace sketchreg {

std::string_view to_string(SolverId id) {
  switch (id) {
    case SolverId::hdpwbatch: return "hdpwbatch";
    case SolverId::hdpwacc: return "hdpwacc";
    case SolverId::pwgrad: return "pwgrad";
    case SolverId::ihs: return "ihs";
    case SolverId::ihs_fixed: return "ihs-fixed";
    case SolverId::sgd: return "sgd";
  }
  return "unknown";
}

SolverId parse_solver_id(std::string_view name) {
  for (SolverId id : {SolverId::hdpwbatch, SolverId::hdpwacc, SolverId::pwgrad, SolverId::ihs, SolverId::ihs_fixed,
                      SolverId::sgd}) {
    if (name == to_string(id)) return id;
  }
  throw Error(Errc::invalid_argument, fmt::format("unknown solver '{}'", name));
}

SolveReport run_solver(SolverId id, const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg) {
  switch (id) {
    case SolverId::hdpwbatch: return hd_pw_batch_sgd(a, b, w, cfg);
    case SolverId::hdpwacc: return hd_pw_acc_batch_sgd(a, b, w, cfg);
    case SolverId::pwgrad: return pw_gradient(a, b, w, cfg);
    case SolverId::ihs: return ihs(a, b, w, cfg, true);
    case SolverId::ihs_fixed: return ihs(a, b, w, cfg, false);
    case SolverId::sgd: return plain_sgd_baseline(a, b, w, cfg);
  }
  throw Error(Errc::invalid_argument, "unknown solver");
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

namespace {

double final_error(const SolveReport& rep) {
  return rep.trace.empty() ? std::numeric_limits<double>::quiet_NaN() : rep.trace.back().relative_error;
}

}  // namespace

ExperimentResult run_experiment(const Matrix& a, const Vector& b, const FeasibleSet& w, const GroundTruth& truth,
                                const ExperimentSpec& spec) {
  if (spec.solvers.empty()) throw Error(Errc::invalid_argument, "experiment has no solvers");
  if (spec.seeds.empty()) throw Error(Errc::invalid_argument, "experiment has no seeds");

  ExperimentResult out;
  out.f_star = truth.objective;
  out.n = static_cast<std::size_t>(a.rows());
  out.d = static_cast<std::size_t>(a.cols());
  out.runs.resize(spec.solvers.size());
  for (std::size_t i = 0; i < spec.solvers.size(); ++i) {
    out.runs[i].label = spec.solvers[i].label;
    out.runs[i].id = spec.solvers[i].id;
    out.runs[i].seeds = spec.seeds;
    out.runs[i].reports.resize(spec.seeds.size());
  }

  const std::size_t jobs = spec.solvers.size() * spec.seeds.size();
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t job = next++; job < jobs; job = next++) {
      const std::size_t si = job / spec.seeds.size();
      const std::size_t ki = job % spec.seeds.size();
      try {
        SolverConfig cfg = spec.solvers[si].cfg;
        cfg.seed = spec.seeds[ki];
        cfg.f_star = truth.objective;
        out.runs[si].reports[ki] = run_solver(spec.solvers[si].id, a, b, w, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::clamp<std::size_t>(spec.threads, 1, jobs);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (auto& runs : out.runs) {
    std::vector<double> errs;
    for (const auto& rep : runs.reports) errs.push_back(final_error(rep));
    runs.best = static_cast<std::size_t>(std::min_element(errs.begin(), errs.end()) - errs.begin());
    runs.best_error = errs[runs.best];
    runs.median_error = median(errs);
  }
  return out;
}

double error_at_iteration(const SolveReport& report, std::size_t iteration) {
  double err = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : report.trace) {
    if (p.iteration > iteration) break;
    err = p.relative_error;
  }
  return err;
}

double error_at_time(const SolveReport& report, double seconds) {
  double err = std::numeric_limits<double>::quiet_NaN();
  for (const auto& p : report.trace) {
    if (p.elapsed_seconds > seconds) break;
    err = p.relative_error;
  }
  return err;
}

std::optional<std::size_t> first_iteration_below(const SolveReport& report, double target) {
  for (const auto& p : report.trace) {
    if (p.relative_error <= target) return p.iteration;
  }
  return std::nullopt;
}

std::optional<std::size_t> min_iterations_to_target(const std::function<double(std::size_t)>& final_error,
                                                    double target, std::size_t start, std::size_t t_max,
                                                    double resolution) {
  std::size_t lo = 0;
  std::size_t hi = std::max<std::size_t>(start, 1);
  while (!(final_error(hi) <= target)) {
    if (hi >= t_max) return std::nullopt;
    lo = hi;
    hi = std::min(2 * hi, t_max);
  }
  while (hi - lo > 1 && static_cast<double>(hi) > (1.0 + resolution) * static_cast<double>(lo)) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (final_error(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

std::vector<SweepRow> batch_sweep(const Matrix& a, const Vector& b, const FeasibleSet& w, double f_star,
                                  const std::vector<std::size_t>& batches, const std::vector<std::uint64_t>& seeds,
                                  double target, const SolverConfig& base, std::size_t t_max) {
  std::vector<Preconditioner> pres;
  for (std::uint64_t seed : seeds) {
    PreconditionerOptions opts;
    opts.sketch = base.sketch;
    opts.sketch_size = base.sketch_size;
    opts.seed = seed;
    pres.push_back(build_preconditioner(a, b, opts));
  }

  std::vector<SweepRow> rows;
  for (std::size_t r : batches) {
    SweepRow row;
    row.batch = r;
    std::vector<double> counts;
    bool all = true;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      auto run = [&](std::size_t t) {
        SolverConfig cfg = base;
        cfg.batch_size = r;
        cfg.iterations = t;
        cfg.seed = seeds[k];
        cfg.record_every = 0;
        cfg.tolerance = 0.0;
        cfg.f_star = f_star;
        return hd_pw_batch_sgd(a, b, w, cfg, pres[k]).trace.back().relative_error;
      };
      const auto found = min_iterations_to_target(run, target, 64, t_max);
      row.iterations.push_back(found);
      if (found) {
        counts.push_back(static_cast<double>(*found));
      } else {
        all = false;
      }
    }
    row.median = all ? median(counts) : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace sketchreg

#pragma once

#include "sketchreg/dense_linalg.hpp"
#include "sketchreg/feasible_set.hpp"
#include "sketchreg/solvers.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sketchreg {

struct DatasetSpec {
  std::size_t n = 8192;
  std::size_t d = 20;
  double target_kappa = 1e3;
  double noise_std = 0.1;
  std::uint64_t seed = 42;
};

struct SyntheticData {
  Matrix a;
  Vector b;
  Vector x_planted;  // b = A x_planted + noise
};

/// A = Q1 diag(s) Q2^T with random orthogonal factors and singular values
/// log-uniform in [kappa^-1/2, kappa^1/2] (both ends pinned, so cond(A) is
/// the target); x_planted ~ N(0, I); b = A x_planted + noise_std N(0, I).
SyntheticData gen_synthetic(const DatasetSpec& spec);

struct Dataset {
  Matrix a;
  Vector b;
};

/// Rows of d+1 comma-separated reals, the last one being b. Blank lines are
/// skipped. With `normalize`, each column of A is shifted to zero mean and
/// scaled to unit (population) variance; constant columns are only centered.
/// Throws Errc::parse_error (with line number) and Errc::ragged_rows.
Dataset load_csv(const std::filesystem::path& path, bool normalize = false);

/// Writes [A b] with 17 significant digits, so load_csv reads back the same bits.
void write_dataset_csv(const std::filesystem::path& path, const Matrix& a, const Vector& b);

struct TraceRow {
  std::string solver;
  std::uint64_t seed = 0;
  const SolveReport* report = nullptr;
};

/// Header `solver,seed,iteration,elapsed_seconds,objective,relative_error`.
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);

/// (f_x - f*) / f*, clipped at 0 (clips are counted). Throws
/// Errc::degenerate_optimum when f* <= 1e-14.
double relative_error(double f_x, double f_star);
std::size_t clipped_relative_errors();

/// Thin-QR least-squares solution.
Vector least_squares_qr(const Matrix& a, const Vector& b);

struct GroundTruth {
  Vector x;
  double objective = 0.0;
};

/// Unconstrained: QR solve. Constrained: two pw_gradient runs (exact R from
/// x = 0; a Gaussian-sketch R from the projected least-squares point), each
/// up to 500 iterations; Errc::oracle_disagreement if their objectives differ
/// by more than 1e-10 relative.
GroundTruth ground_truth(const Matrix& a, const Vector& b, const FeasibleSet& w);

/// The ball radius used by the experiments: radius_scale times the l2 or l1
/// norm of the unconstrained least-squares solution.
FeasibleSet make_feasible_set(ConstraintKind kind, const Matrix& a, const Vector& b, double radius_scale = 1.0,
                              std::optional<double> bound = std::nullopt);

enum class SolverId { hdpwbatch, hdpwacc, pwgrad, ihs, ihs_fixed, sgd };

std::string_view to_string(SolverId id);
/// Accepts hdpwbatch, hdpwacc, pwgrad, ihs, ihs-fixed, sgd.
SolverId parse_solver_id(std::string_view name);

SolveReport run_solver(SolverId id, const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg);

struct SolverEntry {
  std::string label;
  SolverId id = SolverId::pwgrad;
  SolverConfig cfg;  // seed and f_star are filled in per run
};

struct ExperimentSpec {
  std::vector<SolverEntry> solvers;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  std::size_t threads = 1;
};

struct SolverRuns {
  std::string label;
  SolverId id = SolverId::pwgrad;
  std::vector<std::uint64_t> seeds;
  std::vector<SolveReport> reports;  // one per seed, same order
  std::size_t best = 0;              // index of the lowest final relative error
  double best_error = 0.0;
  double median_error = 0.0;
};

struct ExperimentResult {
  double f_star = 0.0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<SolverRuns> runs;
};

/// Runs every solver on every seed against the same ground truth. Runs are
/// independent and may use worker threads; aggregation is sequential.
ExperimentResult run_experiment(const Matrix& a, const Vector& b, const FeasibleSet& w, const GroundTruth& truth,
                                const ExperimentSpec& spec);

/// Relative error of the last trace point at or before the budget, NaN if none.
double error_at_iteration(const SolveReport& report, std::size_t iteration);
double error_at_time(const SolveReport& report, double seconds);

/// First traced iteration with relative error <= target.
std::optional<std::size_t> first_iteration_below(const SolveReport& report, double target);

/// Smallest T with final_error(T) <= target: doubling from `start`, then
/// bisection until hi / lo <= 1 + resolution. nullopt past `t_max`.
std::optional<std::size_t> min_iterations_to_target(const std::function<double(std::size_t)>& final_error,
                                                    double target, std::size_t start, std::size_t t_max,
                                                    double resolution = 0.05);

struct SweepRow {
  std::size_t batch = 0;
  std::vector<std::optional<std::size_t>> iterations;  // per seed
  double median = 0.0;                                 // NaN if any seed missed t_max
};

/// For each r, per seed: the fewest HDpwBatchSGD iterations whose averaged
/// iterate reaches `target`, with the automatic step size re-derived for every T.
std::vector<SweepRow> batch_sweep(const Matrix& a, const Vector& b, const FeasibleSet& w, double f_star,
                                  const std::vector<std::size_t>& batches, const std::vector<std::uint64_t>& seeds,
                                  double target, const SolverConfig& base, std::size_t t_max = 2'000'000);

double median(std::vector<double> values);

}  // namespace sketchreg

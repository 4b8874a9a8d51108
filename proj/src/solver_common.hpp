#pragma once

#include "sketchreg/solvers.hpp"

#include <chrono>

namespace sketchreg::detail {

/// Collects the trace of one run. The solve clock is paused while the
/// objective of a traced point is evaluated.
class Tracer {
 public:
  Tracer(const Matrix& a, const Vector& b, const SolverConfig& cfg, SolveReport& report);

  void start();
  /// Records x at `iteration` if due (or when forced). Returns true once the
  /// configured tolerance is met.
  bool record(std::size_t iteration, const Vector& x, bool force = false);
  bool due(std::size_t iteration) const;
  bool out_of_time() const;
  void finish(std::size_t iterations_run, const Vector& x_last);

 private:
  double running_seconds() const;

  const Matrix& a_;
  const Vector& b_;
  const SolverConfig& cfg_;
  SolveReport& report_;
  std::chrono::steady_clock::time_point segment_start_;
  double banked_ = 0.0;
  std::size_t last_recorded_ = static_cast<std::size_t>(-1);
};

/// Validates shapes and the start point; returns x0 (zero by default).
Vector start_point(const Matrix& a, const Vector& b, const FeasibleSet& w, const SolverConfig& cfg);

/// D in y = R x coordinates for the step-size rule: the transformed ball
/// diameter, or for unconstrained problems B / sqrt(2) with B the user bound
/// or the distance from R x0 to the sketch-and-solve estimate.
double y_space_diameter(const FeasibleSet& w, const Preconditioner& pre, const Vector& x0,
                        const std::optional<double>& user_bound);

}  // namespace sketchreg::detail

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sketchreg {

/// Failure categories raised by the library. The CLI maps input-type codes
/// to exit status 2 and numerical ones to exit status 3.
enum class Errc {
  // input / shape errors
  invalid_size,
  dimension_mismatch,
  not_power_of_two,
  invalid_argument,
  parse_error,
  ragged_rows,
  io_error,
  unbounded,
  // numerical failures
  rank_deficient,
  singular_factor,
  inner_solver_stall,
  epoch_budget_exceeded,
  oracle_disagreement,
  degenerate_optimum,
};

constexpr std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::invalid_size: return "InvalidSize";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::not_power_of_two: return "NotPowerOfTwo";
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::parse_error: return "ParseError";
    case Errc::ragged_rows: return "RaggedRows";
    case Errc::io_error: return "IOError";
    case Errc::unbounded: return "Unbounded";
    case Errc::rank_deficient: return "RankDeficient";
    case Errc::singular_factor: return "SingularFactor";
    case Errc::inner_solver_stall: return "InnerSolverStall";
    case Errc::epoch_budget_exceeded: return "EpochBudgetExceeded";
    case Errc::oracle_disagreement: return "OracleDisagreement";
    case Errc::degenerate_optimum: return "DegenerateOptimum";
  }
  return "Unknown";
}

constexpr bool is_numerical_failure(Errc code) {
  switch (code) {
    case Errc::rank_deficient:
    case Errc::singular_factor:
    case Errc::inner_solver_stall:
    case Errc::epoch_budget_exceeded:
    case Errc::oracle_disagreement:
    case Errc::degenerate_optimum:
      return true;
    default:
      return false;
  }
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sketchreg

#include "sketchreg/bench.hpp"
#include "sketchreg/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

namespace sketchreg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_field(std::string_view field, std::size_t line) {
  field = trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw Error(Errc::parse_error, fmt::format("line {}: '{}' is not a finite number", line, field));
  }
  return value;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, bool normalize) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, fmt::format("cannot open '{}'", path.string()));

  std::vector<double> values;
  std::size_t width = 0;
  std::size_t rows = 0;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    std::string_view rest = trim(text);
    if (rest.empty()) continue;
    std::size_t fields = 0;
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_field(rest.substr(0, comma), line));
      ++fields;
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (rows == 0) {
      if (fields < 2) throw Error(Errc::parse_error, fmt::format("line {}: need at least 2 columns", line));
      width = fields;
    } else if (fields != width) {
      throw Error(Errc::ragged_rows, fmt::format("line {}: {} fields, expected {}", line, fields, width));
    }
    ++rows;
  }
  if (rows == 0) throw Error(Errc::parse_error, fmt::format("'{}' contains no data rows", path.string()));

  const auto n = static_cast<Eigen::Index>(rows);
  const auto d = static_cast<Eigen::Index>(width - 1);
  const Eigen::Map<const Matrix> all(values.data(), n, d + 1);
  Dataset out;
  out.a = all.leftCols(d);
  out.b = all.col(d);

  if (normalize) {
    for (Eigen::Index j = 0; j < d; ++j) {
      auto col = out.a.col(j);
      const double mean = col.mean();
      col.array() -= mean;
      const double sd = std::sqrt(col.squaredNorm() / static_cast<double>(n));
      if (sd > 0.0) col /= sd;
    }
  }
  return out;
}

void write_dataset_csv(const std::filesystem::path& path, const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) throw Error(Errc::dimension_mismatch, "A and b differ in row count");
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, fmt::format("cannot write '{}'", path.string()));
  std::string line;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < a.cols(); ++j) fmt::format_to(std::back_inserter(line), "{:.17g},", a(i, j));
    fmt::format_to(std::back_inserter(line), "{:.17g}\n", b(i));
    out << line;
  }
  if (!out) throw Error(Errc::io_error, fmt::format("write to '{}' failed", path.string()));
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::io_error, fmt::format("cannot write '{}'", path.string()));
  out << "solver,seed,iteration,elapsed_seconds,objective,relative_error\n";
  for (const auto& row : rows) {
    for (const auto& p : row.report->trace) {
      out << fmt::format("{},{},{},{:.15g},{:.17g},{:.17g}\n", row.solver, row.seed, p.iteration, p.elapsed_seconds,
                         p.objective, p.relative_error);
    }
  }
  if (!out) throw Error(Errc::io_error, fmt::format("write to '{}' failed", path.string()));
}

}  // namespace sketchreg

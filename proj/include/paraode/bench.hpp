#pragma once

#include <optional>
#include <string>
#include <vector>

#include "paraode/ieks.hpp"
#include "paraode/problems.hpp"

namespace paraode {

enum class Method { kParaIeks, kSeqIeks, kEks };

Method method_by_name(const std::string& name);
std::string method_name(Method method);

// One cell of a benchmark sweep.  rmse is empty when the cell failed.
struct RunRecord {
  std::string problem;
  std::string method;
  int nu = 0;
  int grid_size = 0;
  std::optional<double> rmse;
  double runtime_seconds = 0.0;
  int iterations = 0;
  double sigma_hat = 0.0;
  bool converged = false;
  std::size_t combine_invocations = 0;
  std::size_t sequential_depth = 0;
};

// Stable schema of the benchmark CSV.
extern const char* const kRunRecordHeader;

std::string csv_row(const RunRecord& record);
std::string to_csv(const std::vector<RunRecord>& records);

// Work-precision chart (runtime vs. error, log-log), one polyline per
// problem/method/nu series.  Cells without a positive rmse are skipped.
std::string to_svg(const std::vector<RunRecord>& records);

// Entry point behind the `paraode` binary; returns the process exit code
// (0 success, 2 solver did not converge, 1 usage or runtime error).
int run_cli(int argc, const char* const* argv);

}  // namespace paraode
